//! Convolution-quadrature weights of `(1 - ξ)^ℓ` and the discrete
//! fractional derivative of `t^2` against its exact value.
//!
//! ```text
//! cargo run --release --example cq_weights -- [order] [n]
//! ```

use frac_ch::fracops::{cq_weights, frac_apply_scalar};
use statrs::function::gamma::gamma;

fn main() -> frac_ch::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let order: f64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(8);

    let w = cq_weights(order, n)?;
    println!("j,a_j");
    for (j, a) in w.as_slice().iter().enumerate() {
        println!("{j},{a:e}");
    }

    // ∂^ℓ t² = Γ(3)/Γ(3-ℓ) t^{2-ℓ}; backward-Euler CQ is first order
    println!("\nsteps,discrete,exact,error");
    for steps in [10, 20, 40, 80, 160] {
        let tau = 1.0 / steps as f64;
        let hist: Vec<f64> = (0..=steps).map(|k| (k as f64 * tau).powi(2)).collect();
        let w = cq_weights(order, steps)?;
        let d = frac_apply_scalar(&w, tau, &hist, steps)?;
        let exact = 2.0 / gamma(3.0 - order);
        println!("{steps},{d:.10},{exact:.10},{:.3e}", (d - exact).abs());
    }
    Ok(())
}
