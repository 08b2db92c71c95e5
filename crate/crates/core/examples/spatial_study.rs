//! Spatial convergence study for one table row.
//!
//! ```text
//! cargo run --release --example spatial_study -- [alpha] [gamma] [m] [case] [samples] [N]
//! ```
//!
//! Defaults: `0.5 0.6 1 a 20 100`, `T = 0.01`, `M ∈ {20,40,80,160}`
//! against `M_ref = 640`. The noise keeps `L = 19` modes on every mesh.

use std::time::Instant;

use frac_ch::harness::{run_spatial_study, write_table, Case, ExperimentPlan, StudyKind};

fn main() -> frac_ch::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let num = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let case: Case = args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(Case::A);
    let mut plan = ExperimentPlan::new(
        StudyKind::Spatial,
        case,
        num(0, 0.5),
        num(1, 0.6),
        num(2, 1.0) as u32,
        vec![20, 40, 80, 160],
        640,
    );
    plan.samples = num(4, 20.0) as usize;
    plan.fixed_resolution = Some(num(5, 100.0) as usize);
    plan.seed = 7;

    let start = Instant::now();
    let result = run_spatial_study(&plan)?;
    write_table(&result.table, std::io::stdout())?;
    let d = &result.diagnostics;
    eprintln!(
        "{} samples in {:.1?}; max mass defect {:.2e}; max Newton iterations {}",
        d.samples_used,
        start.elapsed(),
        d.max_mass_defect,
        d.max_newton_iters
    );
    Ok(())
}
