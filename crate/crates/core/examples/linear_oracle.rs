//! Deterministic linear problem (`φ ≡ 0`, no noise) against the exact
//! Mittag-Leffler solution. Backward-Euler convolution quadrature should
//! show first-order convergence in time.
//!
//! ```text
//! cargo run --release --example linear_oracle
//! ```

use frac_ch::harness::{linear_oracle, write_table};
use frac_ch::solver::InitialCondition;

fn main() -> frac_ch::Result<()> {
    for alpha in [0.5, 0.75] {
        println!("# alpha = {alpha}, case b, epsilon = 1, M = 256, T = 0.01");
        let t = linear_oracle(alpha, 1.0, &InitialCondition::Cosine, 0.01, 256, &[20, 40, 80, 160])?;
        write_table(&t, std::io::stdout())?;
    }
    Ok(())
}
