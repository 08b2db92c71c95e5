//! Backward-Euler convolution quadrature.
//!
//! The weights `a_j^{(ℓ)}` are the Taylor coefficients of `(1 - ξ)^ℓ`, and
//! the discrete operator of order `ℓ` acting on samples `φ_0, …, φ_n` is
//!
//! ```text
//!   ∂_τ^ℓ φ_n = τ^{-ℓ} Σ_{j=0}^{n} a_{n-j}^{(ℓ)} φ_j.
//! ```
//!
//! `ℓ = α ∈ (0, 1]` gives a fractional derivative, `ℓ = -γ` a fractional
//! integral. Weights are generated by the two-term recursion
//! `a_j = a_{j-1} (j - 1 - ℓ) / j`.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Convolution-quadrature weights `a_0 … a_N` for a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct CqWeights {
    order: f64,
    weights: Vec<f64>,
}

impl CqWeights {
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, j: usize) -> Option<f64> {
        self.weights.get(j).copied()
    }

    /// Highest available index `N`.
    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }
}

impl std::ops::Index<usize> for CqWeights {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.weights[j]
    }
}

/// Weights `a_0^{(ℓ)} … a_{n_max}^{(ℓ)}` of `(1 - ξ)^ℓ`.
pub fn cq_weights(order: f64, n_max: usize) -> Result<CqWeights> {
    if !(-1.0..=1.0).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "CQ order must lie in [-1, 1], got {order}"
        )));
    }
    let mut weights = Vec::with_capacity(n_max + 1);
    weights.push(1.0);
    for j in 1..=n_max {
        let prev = weights[j - 1];
        weights.push(prev * ((j as f64 - 1.0 - order) / j as f64));
    }
    Ok(CqWeights { order, weights })
}

/// `τ^{-ℓ} Σ_{j=0}^{n} a_{n-j} φ_j` for vector-valued samples.
pub fn frac_apply<V: AsRef<[f64]>>(
    weights: &CqWeights,
    tau: f64,
    history: &[V],
    n: usize,
) -> Result<Vec<f64>> {
    if n >= history.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: history.len(),
        });
    }
    if n > weights.n_max() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: weights.len(),
        });
    }
    let dim = history[0].as_ref().len();
    let mut out = vec![0.0; dim];
    for (j, phi) in history[..=n].iter().enumerate() {
        let phi = phi.as_ref();
        if phi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: phi.len(),
            });
        }
        let a = weights[n - j];
        for (o, p) in out.iter_mut().zip(phi) {
            *o += a * p;
        }
    }
    let scale = tau.powf(-weights.order());
    out.iter_mut().for_each(|o| *o *= scale);
    Ok(out)
}

/// Scalar convenience wrapper around [`frac_apply`].
pub fn frac_apply_scalar(weights: &CqWeights, tau: f64, history: &[f64], n: usize) -> Result<f64> {
    let hist: Vec<[f64; 1]> = history.iter().map(|&v| [v]).collect();
    Ok(frac_apply(weights, tau, &hist, n)?[0])
}

/// `max_n |Σ_j a_j^{(α)} a_{n-j}^{(-α)} - δ_{n0}|`; the generating functions
/// multiply to one.
pub fn weight_convolution_check(alpha: f64, n_max: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must be in (0,1), got {alpha}")));
    }
    let a = cq_weights(alpha, n_max)?;
    let b = cq_weights(-alpha, n_max)?;
    let mut worst: f64 = 0.0;
    for n in 0..=n_max {
        let s: f64 = (0..=n).map(|j| a[j] * b[n - j]).sum();
        let target = if n == 0 { 1.0 } else { 0.0 };
        worst = worst.max((s - target).abs());
    }
    Ok(worst)
}

/// Checks `τ^α a_n^{(-α)} ≥ τ t_n^{α-1} / Γ(α)` for every `n = 1 … n_max`.
pub fn weight_lower_bound_check(alpha: f64, tau: f64, n_max: usize) -> Result<bool> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must be in (0,1), got {alpha}")));
    }
    if n_max < 1 || tau <= 0.0 {
        return Err(Error::InvalidArgument("need n_max >= 1 and tau > 0".into()));
    }
    let w = cq_weights(-alpha, n_max)?;
    let g = gamma(alpha);
    let lhs_scale = tau.powf(alpha);
    Ok((1..=n_max).all(|n| {
        let t_n = n as f64 * tau;
        lhs_scale * w[n] >= tau * t_n.powf(alpha - 1.0) / g
    }))
}

/// Extremes of `τ^α a_n^{(-α)} / (τ t_n^{α-1} / Γ(α))` over `n = 1 … n_max`.
/// The ratio equals `Γ(n+α) n^{1-α} / Γ(n+1)`, so it does not depend on `τ`;
/// it starts at `Γ(1+α)` and increases toward 1 from below.
pub fn weight_lower_bound_ratio(alpha: f64, tau: f64, n_max: usize) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must be in (0,1), got {alpha}")));
    }
    if n_max < 1 || tau <= 0.0 {
        return Err(Error::InvalidArgument("need n_max >= 1 and tau > 0".into()));
    }
    let w = cq_weights(-alpha, n_max)?;
    let g = gamma(alpha);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 1..=n_max {
        let t_n = n as f64 * tau;
        let ratio = tau.powf(alpha) * w[n] / (tau * t_n.powf(alpha - 1.0) / g);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((lo, hi))
}

/// Taylor coefficients of the scalar discrete resolvents
///
/// ```text
///   R(ζ) = 1 + ζ (τ^{-α} δ(ζ)^α + λ²)^{-1} τ^{-1}
///   Q(ζ) = 1 + ζ (τ^{-α} δ(ζ)^α + λ²)^{-1} τ^{γ-1} δ(ζ)^{-γ}
/// ```
///
/// with `δ(ζ) = 1 - ζ`, for one eigenmode of the spatial operator.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSeries {
    pub lambda: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub tau: f64,
    pub r: Vec<f64>,
    pub q: Vec<f64>,
}

impl KernelSeries {
    /// `τ Σ_{j=1}^{n} Q_{n-j+1} g_j`: the linear response at step `n` to the
    /// scaled increments `g_1 … g_n` (`g[0]` is ignored).
    pub fn noise_response(&self, g: &[f64], n: usize) -> f64 {
        self.tau * (1..=n).map(|j| self.q[n - j + 1] * g[j]).sum::<f64>()
    }

    /// `τ Σ_{j=1}^{n} R_{n-j+1} f_j`.
    pub fn source_response(&self, f: &[f64], n: usize) -> f64 {
        self.tau * (1..=n).map(|j| self.r[n - j + 1] * f[j]).sum::<f64>()
    }
}

pub fn resolvent_kernels(
    lambda: f64,
    alpha: f64,
    gamma: f64,
    tau: f64,
    n_max: usize,
) -> Result<KernelSeries> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) || !(0.0..=1.0).contains(&gamma) || !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need alpha in (0,1], gamma in [0,1], tau > 0; got alpha={alpha}, gamma={gamma}, tau={tau}"
        )));
    }
    let a = cq_weights(alpha, n_max)?;
    let d = cq_weights(-gamma, n_max)?;
    let scale = tau.powf(-alpha);
    let b: Vec<f64> = (0..=n_max)
        .map(|j| scale * a[j] + if j == 0 { lambda * lambda } else { 0.0 })
        .collect();
    // c = 1 / b as a power series
    let mut c = vec![0.0; n_max + 1];
    c[0] = 1.0 / b[0];
    for n in 1..=n_max {
        let s: f64 = (1..=n).map(|k| b[k] * c[n - k]).sum();
        c[n] = -s / b[0];
    }
    let mut r = vec![0.0; n_max + 1];
    let mut q = vec![0.0; n_max + 1];
    r[0] = 1.0;
    q[0] = 1.0;
    let q_scale = tau.powf(gamma - 1.0);
    for n in 1..=n_max {
        r[n] = c[n - 1] / tau;
        let conv: f64 = (0..n).map(|k| c[k] * d[n - 1 - k]).sum();
        q[n] = q_scale * conv;
    }
    Ok(KernelSeries {
        lambda,
        alpha,
        gamma,
        tau,
        r,
        q,
    })
}
