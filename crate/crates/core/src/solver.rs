//! Fully discrete scheme: backward-Euler convolution quadrature in time,
//! P1 mixed finite elements in space.
//!
//! Step `n` solves for `(Uⁿ, Wⁿ, μ)`
//!
//! ```text
//!   τ^{-α} M Uⁿ + S Wⁿ = M (τ^{-α} U⁰ - Hⁿ + ξⁿ)
//!   M Wⁿ - ε² S Uⁿ - F(Uⁿ) + μ M1 = 0
//!   (Wⁿ, 1) = 0
//! ```
//!
//! where `Hⁿ = τ^{-α} Σ_{j<n} a_{n-j}^{(α)} (U^j - U⁰)` is the lagged CQ
//! history, `ξⁿ = τ^γ Σ_k a_{n-k}^{(-γ)} g^k` the fractionally integrated
//! noise and `F(U)_i = (φ(U_h), χ_i)`. The multiplier `μ` equals `(φ(U_h), 1)`,
//! so the second line is the mean-zero projection of `φ`.
//!
//! Newton uses the exact Jacobian. Unknowns are interleaved
//! (`U_i → 2i`, `W_i → 2i+1`), which makes the `(U, W)` block a band matrix
//! with three sub- and super-diagonals; the multiplier border is eliminated
//! with two solves against the same factorisation.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem1d::{nonlinear_jacobian_nodal, nonlinear_load_nodal, FeSpace, UniformMesh1D};
use crate::fracops::{cq_weights, CqWeights};
use crate::linalg::{dot, BandedMatrix};
use crate::noise::{frac_integrated_noise_with, ProjectedNoiseTrack};

pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;
pub const DEFAULT_NEWTON_MAX: usize = 50;

/// Parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub final_time: f64,
    pub steps: usize,
    pub mesh: UniformMesh1D,
    /// Residual tolerance relative to the size of the step data.
    pub newton_tol: f64,
    pub newton_max: usize,
    /// `false` drops `φ` entirely (the linear problem).
    pub nonlinear: bool,
}

impl SchemeConfig {
    pub fn new(
        alpha: f64,
        gamma: f64,
        epsilon: f64,
        final_time: f64,
        steps: usize,
        mesh: UniformMesh1D,
    ) -> Result<Self> {
        let cfg = Self {
            alpha,
            gamma,
            epsilon,
            final_time,
            steps,
            mesh,
            newton_tol: DEFAULT_NEWTON_TOL,
            newton_max: DEFAULT_NEWTON_MAX,
            nonlinear: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            errs.push(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            errs.push(format!("gamma must lie in [0, 1], got {}", self.gamma));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            errs.push(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.final_time > 0.0) || !self.final_time.is_finite() {
            errs.push(format!("final time must be positive, got {}", self.final_time));
        }
        if self.steps < 1 {
            errs.push("need at least one time step".into());
        }
        if self.mesh.num_elements() < 2 {
            errs.push("need at least two elements".into());
        }
        if !(self.newton_tol > 0.0) || self.newton_max < 1 {
            errs.push("newton_tol must be positive and newton_max >= 1".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(errs))
        }
    }

    pub fn tau(&self) -> f64 {
        self.final_time / self.steps as f64
    }

    pub fn with_newton(mut self, tol: f64, max: usize) -> Self {
        self.newton_tol = tol;
        self.newton_max = max;
        self
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }
}

/// Initial datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialCondition {
    /// `u₀ = 0`.
    #[serde(rename = "a")]
    Zero,
    /// `u₀ = 0.05 cos(2πx)`.
    #[serde(rename = "b")]
    Cosine,
    /// `u₀ = Σ_j c_j e_j` with `e_j = √2 cos(jπx)`, `c` stored from `j = 1`.
    Modes(Vec<f64>),
}

impl InitialCondition {
    /// Coefficients `(u₀, e_j)`, `j = 1 …`.
    pub fn modes(&self) -> Vec<f64> {
        match self {
            InitialCondition::Zero => vec![0.0],
            InitialCondition::Cosine => vec![0.0, 0.05 / std::f64::consts::SQRT_2],
            InitialCondition::Modes(c) => c.clone(),
        }
    }
}

impl FromStr for InitialCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(InitialCondition::Zero),
            "b" => Ok(InitialCondition::Cosine),
            other => Err(Error::InvalidArgument(format!(
                "unknown initial case {other:?} (expected \"a\" or \"b\")"
            ))),
        }
    }
}

/// `U⁰ = P_h u₀`.
pub fn initial_state(ic: &InitialCondition, space: &FeSpace) -> Result<Vec<f64>> {
    let mut u = vec![0.0; space.dim()];
    for (i, &c) in ic.modes().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (ui, p) in u.iter_mut().zip(space.l2_project_cosine(i + 1)?) {
            *ui += c * p;
        }
    }
    Ok(u)
}

/// `τ^{-α} Σ_{j=0}^{n-1} a_{n-j}^{(α)} (U^j - U⁰)`: the lagged part of the
/// discrete Caputo derivative at step `n`.
pub fn history_rhs<V: AsRef<[f64]>>(
    states: &[V],
    weights: &CqWeights,
    tau: f64,
    n: usize,
) -> Result<Vec<f64>> {
    if n == 0 || n > states.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: states.len(),
        });
    }
    if n > weights.n_max() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: weights.len(),
        });
    }
    let u0 = states[0].as_ref();
    let mut out = vec![0.0; u0.len()];
    for (j, s) in states[..n].iter().enumerate().skip(1) {
        let a = weights[n - j];
        for ((o, v), z) in out.iter_mut().zip(s.as_ref()).zip(u0) {
            *o += a * (v - z);
        }
    }
    let scale = tau.powf(-weights.order());
    out.iter_mut().for_each(|o| *o *= scale);
    Ok(out)
}

/// Outcome of one Newton solve.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub newton_iters: usize,
    /// Final residual divided by the step's data scale.
    pub final_residual: f64,
    pub converged: bool,
    /// Relative residual before the first and after every update.
    pub residuals: Vec<f64>,
}

/// Trajectory `U⁰ … Uⁿ` plus the latest chemical potential.
#[derive(Debug, Clone)]
pub struct SolutionHistory {
    pub states: Vec<Vec<f64>>,
    pub w: Vec<f64>,
    pub reports: Vec<StepReport>,
    /// `max_n |(Uⁿ - U⁰, 1)|`.
    pub max_mass_defect: f64,
    /// `max_n ‖A_h Uⁿ‖`, a diagnostic for the moment bounds.
    pub max_laplacian_norm: f64,
}

impl SolutionHistory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("history holds U⁰")
    }

    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    /// CSV rows `n,t_n,u_0,…,u_M`.
    pub fn write_csv<W: Write>(&self, tau: f64, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let dim = self.states[0].len();
        let mut header = vec!["n".to_string(), "t".to_string()];
        header.extend((0..dim).map(|i| format!("u{i}")));
        w.write_record(&header)?;
        for (n, s) in self.states.iter().enumerate() {
            let mut row = vec![n.to_string(), format!("{:e}", n as f64 * tau)];
            row.extend(s.iter().map(|v| format!("{v:e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Time stepper owning the assembled operators, the weight tables and the
/// trajectory so far.
#[derive(Debug, Clone)]
pub struct Stepper {
    config: SchemeConfig,
    space: FeSpace,
    w_alpha: CqWeights,
    w_gamma: CqWeights,
    tau: f64,
    /// `τ^{-α}`.
    c: f64,
    history: SolutionHistory,
    mu: f64,
}

impl Stepper {
    pub fn new(config: SchemeConfig, u0: Vec<f64>) -> Result<Self> {
        config.validate()?;
        let space = FeSpace::new(config.mesh)?;
        if u0.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: u0.len(),
            });
        }
        let tau = config.tau();
        let dim = space.dim();
        let lap = space.discrete_laplacian_norm(&u0)?;
        Ok(Self {
            w_alpha: cq_weights(config.alpha, config.steps)?,
            w_gamma: cq_weights(-config.gamma, config.steps)?,
            c: tau.powf(-config.alpha),
            tau,
            history: SolutionHistory {
                states: vec![u0],
                w: vec![0.0; dim],
                reports: Vec::new(),
                max_mass_defect: 0.0,
                max_laplacian_norm: lap,
            },
            mu: 0.0,
            space,
            config,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn space(&self) -> &FeSpace {
        &self.space
    }

    pub fn history(&self) -> &SolutionHistory {
        &self.history
    }

    pub fn into_history(self) -> SolutionHistory {
        self.history
    }

    /// Index of the next step.
    pub fn next_step(&self) -> usize {
        self.history.states.len()
    }

    /// `M (τ^{-α} U⁰ - Hⁿ + ξⁿ)` for the next step.
    pub fn step_load(&self, noise_term: &[f64]) -> Result<Vec<f64>> {
        let n = self.next_step();
        let h = history_rhs(&self.history.states, &self.w_alpha, self.tau, n)?;
        let u0 = &self.history.states[0];
        let v: Vec<f64> = u0
            .iter()
            .zip(&h)
            .zip(noise_term)
            .map(|((z, h), x)| self.c * z - h + x)
            .collect();
        Ok(self.space.mass().matvec(&v))
    }

    /// Residual `(R1, R2, R3)` of the step system at `(u, w, μ)` for the
    /// given load, stacked as `[R1; R2; R3]`.
    pub fn residual(&self, u: &[f64], w: &[f64], mu: f64, load: &[f64]) -> Vec<f64> {
        let dim = self.space.dim();
        let mass = self.space.mass();
        let stiff = self.space.stiffness();
        let m1 = self.space.node_weights();
        let eps2 = self.config.epsilon * self.config.epsilon;
        let mu_ = mass.matvec(u);
        let sw = stiff.matvec(w);
        let mw = mass.matvec(w);
        let su = stiff.matvec(u);
        let f = if self.config.nonlinear {
            nonlinear_load_nodal(self.space.mesh(), u)
        } else {
            vec![0.0; dim]
        };
        let mut r = Vec::with_capacity(2 * dim + 1);
        r.extend((0..dim).map(|i| self.c * mu_[i] + sw[i] - load[i]));
        r.extend((0..dim).map(|i| mw[i] - eps2 * su[i] - f[i] + mu * m1[i]));
        r.push(dot(m1, w));
        r
    }

    /// Interleaved `(U, W)` block of the Jacobian at `u`.
    fn jacobian_block(&self, u: &[f64]) -> BandedMatrix {
        let dim = self.space.dim();
        let mass = self.space.mass();
        let stiff = self.space.stiffness();
        let eps2 = self.config.epsilon * self.config.epsilon;
        let jac = if self.config.nonlinear {
            Some(nonlinear_jacobian_nodal(self.space.mesh(), u))
        } else {
            None
        };
        let mut k = BandedMatrix::zeros(2 * dim, 3, 3);
        for i in 0..dim {
            for j in i.saturating_sub(1)..=(i + 1).min(dim - 1) {
                let (m, s) = (mass.get(i, j), stiff.get(i, j));
                let jv = jac.as_ref().map_or(0.0, |a| a.get(i, j));
                k.set(2 * i, 2 * j, self.c * m);
                k.set(2 * i, 2 * j + 1, s);
                k.set(2 * i + 1, 2 * j, -eps2 * s - jv);
                k.set(2 * i + 1, 2 * j + 1, m);
            }
        }
        k
    }

    /// Jacobian-vector product at `u`, in the stacked `[U; W; μ]` layout of
    /// [`Stepper::residual`].
    pub fn jacobian_apply(&self, u: &[f64], du: &[f64], dw: &[f64], dmu: f64) -> Vec<f64> {
        let dim = self.space.dim();
        let k = self.jacobian_block(u);
        let mut x = vec![0.0; 2 * dim];
        for i in 0..dim {
            x[2 * i] = du[i];
            x[2 * i + 1] = dw[i];
        }
        let y = k.matvec(&x);
        let m1 = self.space.node_weights();
        let mut out = Vec::with_capacity(2 * dim + 1);
        out.extend((0..dim).map(|i| y[2 * i]));
        out.extend((0..dim).map(|i| y[2 * i + 1] + dmu * m1[i]));
        out.push(dot(m1, dw));
        out
    }

    /// Newton correction `-J⁻¹ r` for stacked residual `r`.
    fn newton_update(&self, u: &[f64], r: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
        let dim = self.space.dim();
        let lu = self.jacobian_block(u).factor()?;
        let m1 = self.space.node_weights();
        let mut rhs = vec![0.0; 2 * dim];
        let mut border = vec![0.0; 2 * dim];
        for i in 0..dim {
            rhs[2 * i] = -r[i];
            rhs[2 * i + 1] = -r[dim + i];
            border[2 * i + 1] = m1[i];
        }
        let y = lu.solve(&rhs)?;
        let z = lu.solve(&border)?;
        let dy: f64 = (0..dim).map(|i| m1[i] * y[2 * i + 1]).sum();
        let dz: f64 = (0..dim).map(|i| m1[i] * z[2 * i + 1]).sum();
        if dz == 0.0 || !dz.is_finite() {
            return Err(Error::Singular(2 * dim));
        }
        let dmu = (dy + r[2 * dim]) / dz;
        let du = (0..dim).map(|i| y[2 * i] - dmu * z[2 * i]).collect();
        let dw = (0..dim).map(|i| y[2 * i + 1] - dmu * z[2 * i + 1]).collect();
        Ok((du, dw, dmu))
    }

    /// Advances one step with `noise_term = ξⁿ`.
    pub fn step(&mut self, noise_term: &[f64]) -> Result<StepReport> {
        let n = self.next_step();
        if n > self.config.steps {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.config.steps + 1,
            });
        }
        let dim = self.space.dim();
        if noise_term.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: noise_term.len(),
            });
        }
        let load = self.step_load(noise_term)?;
        let mut u = self.history.last().to_vec();
        let mut w = self.history.w.clone();
        let mut mu = self.mu;

        let norm = |v: &[f64]| dot(v, v).sqrt();
        let scale = self.space.mesh().h()
            + norm(&load)
            + self.c * norm(&self.space.mass().matvec(&u))
            + norm(&self.space.mass().matvec(&w));

        let mut r = self.residual(&u, &w, mu, &load);
        let mut rn = norm(&r) / scale;
        let mut trace = vec![rn];
        let mut iters = 0;
        let mut converged = false;
        while iters < self.config.newton_max {
            let (du, dw, dmu) = self.newton_update(&u, &r)?;
            iters += 1;
            let try_at = |t: f64| {
                let u1: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + t * b).collect();
                let w1: Vec<f64> = w.iter().zip(&dw).map(|(a, b)| a + t * b).collect();
                let r1 = self.residual(&u1, &w1, mu + t * dmu, &load);
                (u1, w1, mu + t * dmu, r1)
            };
            let (mut u1, mut w1, mut mu1, mut r1) = try_at(1.0);
            if norm(&r1) / scale > rn {
                (u1, w1, mu1, r1) = try_at(0.5);
            }
            u = u1;
            w = w1;
            mu = mu1;
            r = r1;
            rn = norm(&r) / scale;
            trace.push(rn);
            if !rn.is_finite() {
                break;
            }
            if rn <= self.config.newton_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NewtonDivergence {
                step: n,
                iterations: iters,
                residuals: trace,
            });
        }
        let report = StepReport {
            newton_iters: iters,
            final_residual: rn,
            converged,
            residuals: trace,
        };
        let defect = self.space.integral(&u) - self.space.integral(&self.history.states[0]);
        let h = &mut self.history;
        h.max_mass_defect = h.max_mass_defect.max(defect.abs());
        h.max_laplacian_norm = h.max_laplacian_norm.max(self.space.discrete_laplacian_norm(&u)?);
        h.states.push(u);
        h.w = w;
        h.reports.push(report.clone());
        self.mu = mu;
        Ok(report)
    }

    /// `ξⁿ` for the next step from a projected noise track.
    pub fn noise_term(&self, track: &ProjectedNoiseTrack) -> Result<Vec<f64>> {
        frac_integrated_noise_with(track, &self.w_gamma, self.next_step())
    }
}

/// Runs `config.steps` steps from `u0` driven by `track`.
pub fn run_path(
    config: &SchemeConfig,
    u0: &InitialCondition,
    track: &ProjectedNoiseTrack,
) -> Result<SolutionHistory> {
    let space = FeSpace::new(config.mesh)?;
    run_path_from(config, initial_state(u0, &space)?, track)
}

/// As [`run_path`] from explicit nodal values `U⁰`.
pub fn run_path_from(
    config: &SchemeConfig,
    u0: Vec<f64>,
    track: &ProjectedNoiseTrack,
) -> Result<SolutionHistory> {
    if track.steps() < config.steps {
        return Err(Error::IndexOutOfRange {
            index: config.steps,
            len: track.steps() + 1,
        });
    }
    if (track.tau() - config.tau()).abs() > 1e-12 * config.tau() {
        return Err(Error::InvalidArgument(format!(
            "noise track step {} does not match scheme step {}",
            track.tau(),
            config.tau()
        )));
    }
    let mut stepper = Stepper::new(config.clone(), u0)?;
    for _ in 0..config.steps {
        let xi = stepper.noise_term(track)?;
        stepper.step(&xi)?;
    }
    Ok(stepper.into_history())
}
