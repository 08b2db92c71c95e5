//! Seeded truncated Q-Wiener paths: empirical mode variances against
//! `γ_j T`, and exact nested coarsening.
//!
//! ```text
//! cargo run --release --example noise_paths -- [m] [samples]
//! ```

use frac_ch::noise::{coarsen, sample_path_for, NoiseSpec};

fn main() -> frac_ch::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let m: u32 = args.first().and_then(|s| s.parse().ok()).unwrap_or(1);
    let samples: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let (trunc, steps, t) = (6, 64, 0.01);
    let spec = NoiseSpec::new(m, trunc, t, steps)?;

    let mut var = vec![0.0; trunc + 1];
    for s in 0..samples {
        let p = sample_path_for(&spec, 42, s);
        for (j, v) in var.iter_mut().enumerate().skip(1) {
            *v += p.value(j, steps).powi(2) / samples as f64;
        }
    }
    println!("j,gamma_j,var(beta_j(T))/T");
    for (j, v) in var.iter().enumerate().skip(1) {
        println!("{j},{:.4},{:.4}", spec.eigenvalue(j), v / t);
    }

    let p = sample_path_for(&spec, 42, 0);
    let nested = coarsen(&coarsen(&p, 2)?, 4)?;
    let direct = coarsen(&p, 8)?;
    println!("nested coarsening bit-identical: {}", nested.increments() == direct.increments());
    Ok(())
}
