//! Mittag-Leffler function on the negative real axis, with both
//! evaluation branches shown near the switch radius.
//!
//! ```text
//! cargo run --release --example mittag_leffler -- [alpha]
//! ```

use frac_ch::mlf::{mittag_leffler, ml_integral, ml_series, series_radius};

fn main() -> frac_ch::Result<()> {
    let alpha: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let r = series_radius(alpha);
    println!("alpha = {alpha}, series used for |z| <= {r:.3}");
    println!("z,E_a1,series,integral");
    for z in [-0.1, -0.5, -1.0, -2.0, -r, -5.0, -10.0, -50.0, -200.0] {
        println!(
            "{z},{:.15e},{:.15e},{:.15e}",
            mittag_leffler(alpha, 1.0, z)?,
            ml_series(alpha, 1.0, z),
            ml_integral(alpha, 1.0, z)
        );
    }
    println!("check E_1(-1) - 1/e = {:.1e}", mittag_leffler(1.0, 1.0, -1.0)? - (-1.0f64).exp());
    Ok(())
}
