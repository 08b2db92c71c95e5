//! Fully discrete finite-element / convolution-quadrature solver for the
//! time-fractional stochastic Cahn-Hilliard equation on the unit interval,
//!
//! ```text
//!   ∂_t^α (u - u₀) + ε² A² u + A P φ(u) = ∂_t^{-γ} Ẇ,     φ(u) = u³ - u,
//! ```
//!
//! with homogeneous Neumann boundary conditions, driven by a Q-Wiener process
//! diagonal in the cosine basis.
//!
//! The crate is organised bottom-up:
//!
//! * [`fem1d`]: P1 finite elements on a uniform mesh (mass/stiffness
//!   assembly, cosine projections, the cubic nonlinearity and its Jacobian).
//! * [`fracops`]: backward-Euler convolution-quadrature weights, discrete
//!   fractional derivatives/integrals and scalar resolvent kernels.
//! * [`mlf`]: Mittag-Leffler evaluation on the negative real axis and the
//!   spectral solution of the linear noise-free problem.
//! * [`noise`]: seeded truncated Q-Wiener paths, coarsening and projection.
//! * [`solver`]: the per-step Newton solve of the mixed system.
//! * [`harness`]: Monte Carlo convergence studies, rates and CSV output.

pub mod error;
pub mod fem1d;
pub mod fracops;
pub mod harness;
pub mod linalg;
pub mod mlf;
pub mod noise;
pub mod solver;

pub use error::{Error, Result};
