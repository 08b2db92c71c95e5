//! Deterministic linear oracle: the stepper with `φ ≡ 0` and no noise
//! against the Mittag-Leffler spectral solution.

use super::table::ErrorTable;
use crate::error::Result;
use crate::fem1d::{FeSpace, UniformMesh1D};
use crate::mlf::{spectral_linear_solution, synthesize, SpectralState};
use crate::noise::ProjectedNoiseTrack;
use crate::solver::{run_path, InitialCondition, SchemeConfig};

/// Errors `‖U^N - u(T)‖` (nodal interpolant of the spectral solution,
/// mass-matrix norm) for each step count in `steps`. The theoretical rate
/// recorded in the table is 1.
pub fn linear_oracle(
    alpha: f64,
    epsilon: f64,
    initial: &InitialCondition,
    final_time: f64,
    elements: usize,
    steps: &[usize],
) -> Result<ErrorTable> {
    let mesh = UniformMesh1D::new(elements)?;
    let space = FeSpace::new(mesh)?;
    let state = SpectralState::new(initial.modes(), epsilon, alpha)?;
    let exact = synthesize(&spectral_linear_solution(&state, final_time)?, &mesh);
    let mut errors = Vec::with_capacity(steps.len());
    for &n in steps {
        let cfg = SchemeConfig::new(alpha, 0.0, epsilon, final_time, n, mesh)?
            .linear()
            .with_newton(1e-12, 10);
        let track = ProjectedNoiseTrack::zeros(cfg.tau(), n, space.dim());
        let h = run_path(&cfg, initial, &track)?;
        let e: Vec<f64> = h.last().iter().zip(exact.coeffs()).map(|(a, b)| a - b).collect();
        errors.push(space.l2_norm(&e));
    }
    Ok(ErrorTable::from_errors(steps, &errors, 1.0, 1.0))
}
