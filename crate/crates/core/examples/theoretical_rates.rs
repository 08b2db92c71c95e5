//! Predicted convergence orders over a grid of `(α, γ)` for each noise
//! regularity `m`.
//!
//! ```text
//! cargo run --release --example theoretical_rates
//! ```

use frac_ch::harness::{beta_limit, theoretical_rate};

fn main() -> frac_ch::Result<()> {
    for m in [0u32, 1, 2] {
        let beta = beta_limit(m);
        println!("# m = {m}, beta = {beta}");
        println!("gamma,alpha,eta,temporal_fixed,temporal_strict,spatial");
        for gamma in [0.3, 0.5, 0.8] {
            for alpha in [0.25, 0.5, 0.75] {
                match theoretical_rate(alpha, gamma, beta) {
                    Ok(r) => println!(
                        "{gamma},{alpha},{:.3},{:.3},{:.3},{:.3}",
                        r.eta, r.temporal_fixed, r.temporal_strict, r.spatial
                    ),
                    Err(e) => println!("{gamma},{alpha},,,,{e}"),
                }
            }
        }
    }
    Ok(())
}
