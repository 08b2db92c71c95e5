//! With `α = 1`, `γ = 0` the scheme is classical backward Euler for the
//! stochastic Cahn-Hilliard equation. Prints the trajectory summary of one
//! path for case (b).
//!
//! ```text
//! cargo run --release --example classical_limit -- [seed]
//! ```

use frac_ch::fem1d::{FeSpace, UniformMesh1D};
use frac_ch::noise::{project_increments, sample_path, NoiseSpec};
use frac_ch::solver::{initial_state, run_path_from, InitialCondition, SchemeConfig};

fn main() -> frac_ch::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let (m, n, t) = (64, 100, 0.01);
    let mesh = UniformMesh1D::new(m)?;
    let space = FeSpace::new(mesh)?;
    let spec = NoiseSpec::new(1, m - 1, t, n)?;
    let track = project_increments(&sample_path(&spec, seed), &spec, &space)?;
    let cfg = SchemeConfig::new(1.0, 0.0, 1.0, t, n, mesh)?;
    let u0 = initial_state(&InitialCondition::Cosine, &space)?;
    let h = run_path_from(&cfg, u0, &track)?;

    println!("n,t,u(0),L2 norm,newton");
    for k in (0..=n).step_by(10) {
        let it = if k == 0 { 0 } else { h.reports[k - 1].newton_iters };
        println!("{k},{:.4},{:.6e},{:.6e},{it}", k as f64 * cfg.tau(), h.states[k][0], space.l2_norm(&h.states[k]));
    }
    println!("max mass defect {:.2e}", h.max_mass_defect);
    Ok(())
}
