//! Theoretical and empirical convergence rates.

use crate::error::{Error, Result};

/// Smoothing index implied by the noise decay `γ_j = j^{-m}`, with the
/// pinned margin used for the `η > 0` check: `min((m+3)/2 - 0.01, 3)`.
pub fn beta_eff(m: u32) -> f64 {
    ((m as f64 + 3.0) / 2.0 - 0.01).min(3.0)
}

/// Limit value `min((m+3)/2, 3)` of the same index, used for the displayed
/// theoretical rates (borderline `ε` terms are taken at their limit).
pub fn beta_limit(m: u32) -> f64 {
    ((m as f64 + 3.0) / 2.0).min(3.0)
}

/// `η = α(1+β)/4 + γ - 1/2`.
pub fn eta(alpha: f64, gamma: f64, beta: f64) -> f64 {
    alpha * (1.0 + beta) / 4.0 + gamma - 0.5
}

/// Every exponent entering the fully discrete error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalRates {
    pub eta: f64,
    pub sigma: f64,
    pub mu: f64,
    pub xi: f64,
    pub zeta: f64,
    pub r: f64,
    /// `min{2, β} - r`.
    pub spatial: f64,
    /// `min{α/2, μ, ζ}`, valid uniformly in `t_n`.
    pub temporal_strict: f64,
    /// `min{μ, ζ, 1}`, the rate at a fixed final time.
    pub temporal_fixed: f64,
}

/// Caps at 1; the `= 1` borderline `1 - ε` is taken at its limit.
fn cap(x: f64) -> f64 {
    x.min(1.0)
}

pub fn theoretical_rate(alpha: f64, gamma: f64, beta: f64) -> Result<TheoreticalRates> {
    if !(1.0..=3.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!("beta must lie in [1, 3], got {beta}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) || !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "need alpha in (0, 1] and gamma in [0, 1], got {alpha} and {gamma}"
        )));
    }
    let eta = eta(alpha, gamma, beta);
    let sigma = eta + alpha / 4.0;
    let mu = cap(sigma);
    let xi = alpha + gamma - 0.5;
    let zeta = cap(xi);
    let r = if beta <= 2.0 {
        let s = gamma + alpha / 2.0;
        if s < 0.5 {
            4.0 / alpha * ((1.0 - alpha) / 2.0 - gamma)
        } else {
            0.0
        }
    } else {
        let s = gamma + alpha * beta / 4.0;
        if s < 0.5 {
            4.0 / alpha * ((2.0 - alpha * beta) / 4.0 - gamma)
        } else {
            0.0
        }
    };
    Ok(TheoreticalRates {
        eta,
        sigma,
        mu,
        xi,
        zeta,
        r,
        spatial: beta.min(2.0) - r,
        temporal_strict: (alpha / 2.0).min(mu).min(zeta),
        temporal_fixed: mu.min(zeta).min(1.0),
    })
}

/// Least-squares slope `q` of `log e = c - q log n`. `None` unless there
/// are at least two points and all errors are positive.
pub fn fitted_rate(resolutions: &[usize], errors: &[f64]) -> Option<f64> {
    if resolutions.len() != errors.len() || errors.len() < 2 || errors.iter().any(|&e| !(e > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = resolutions.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

/// `log(e_{k-1}/e_k) / log(n_k/n_{k-1})`, i.e. `log₂(e_{k-1}/e_k)` for
/// successive halvings; `None` for the first row.
pub fn pairwise_rates(resolutions: &[usize], errors: &[f64]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|k| {
            if k == 0 || !(errors[k] > 0.0) || !(errors[k - 1] > 0.0) {
                return None;
            }
            let ratio = resolutions[k] as f64 / resolutions[k - 1] as f64;
            Some((errors[k - 1] / errors[k]).ln() / ratio.ln())
        })
        .collect()
}
