//! Truncated Q-Wiener noise `W(t) = Σ_{j≤L} γ_j^{1/2} β_j(t) e_j` with
//! `γ_j = j^{-m}` and `e_j = √2 cos(jπx)`.
//!
//! Paths are generated once at the finest step count and coarsened by
//! summation, so every temporal resolution sees the same Brownian motion.
//!
//! # Random streams
//!
//! A path is drawn from ChaCha20 seeded with `seed_from_u64(seed)` and
//! switched to stream `stream` (the sample index in Monte Carlo studies).
//! Standard normals come from the Marsaglia polar method applied to
//! 53-bit uniforms `(next_u64() >> 11) · 2^{-53}`, both outputs of each
//! accepted pair used in order. Increments are filled row by row: all
//! steps of mode 1, then mode 2, and so on. Changing any of this changes
//! every golden output.

use std::io::Write;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::fem1d::FeSpace;
use crate::fracops::{cq_weights, CqWeights};

/// Covariance and time grid of the truncated noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Decay exponent: `γ_j = j^{-m}`.
    pub m: u32,
    /// Number of retained modes `L`.
    pub truncation: usize,
    pub final_time: f64,
    /// Step count of the finest grid the path is sampled on.
    pub fine_steps: usize,
}

impl NoiseSpec {
    pub fn new(m: u32, truncation: usize, final_time: f64, fine_steps: usize) -> Result<Self> {
        if truncation < 1 || fine_steps < 1 {
            return Err(Error::InvalidArgument(format!(
                "need truncation >= 1 and fine_steps >= 1, got {truncation} and {fine_steps}"
            )));
        }
        if !(final_time > 0.0) || !final_time.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "final time must be positive, got {final_time}"
            )));
        }
        Ok(Self {
            m,
            truncation,
            final_time,
            fine_steps,
        })
    }

    /// `γ_j = j^{-m}` for `j ≥ 1`.
    pub fn eigenvalue(&self, j: usize) -> f64 {
        (j as f64).powi(-(self.m as i32))
    }

    pub fn fine_tau(&self) -> f64 {
        self.final_time / self.fine_steps as f64
    }
}

/// Brownian increments `Δβ_j^k`, `j = 1 … L`, `k = 1 … N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    seed: u64,
    stream: u64,
    truncation: usize,
    steps: usize,
    tau: f64,
    /// Row-major: entry `(j, k)` at `(j-1)·steps + (k-1)`.
    increments: Vec<f64>,
}

impl BrownianPath {
    /// Builds a path from explicit increments, laid out row-major by mode.
    pub fn from_increments(
        truncation: usize,
        steps: usize,
        tau: f64,
        increments: Vec<f64>,
    ) -> Result<Self> {
        if increments.len() != truncation * steps {
            return Err(Error::DimensionMismatch {
                expected: truncation * steps,
                found: increments.len(),
            });
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
        }
        Ok(Self {
            seed: 0,
            stream: 0,
            truncation,
            steps,
            tau,
            increments,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// `Δβ_j^k` with 1-based `j` and `k`.
    pub fn increment(&self, j: usize, k: usize) -> f64 {
        assert!((1..=self.truncation).contains(&j) && (1..=self.steps).contains(&k));
        self.increments[(j - 1) * self.steps + k - 1]
    }

    /// All increments of mode `j`.
    pub fn row(&self, j: usize) -> &[f64] {
        assert!((1..=self.truncation).contains(&j));
        &self.increments[(j - 1) * self.steps..j * self.steps]
    }

    /// `β_j(t_k) = Σ_{i≤k} Δβ_j^i`; `β_j(0) = 0`.
    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.row(j)[..k].iter().sum()
    }

    /// Writes `j,k,increment` rows with full round-trip precision.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["j", "k", "increment"])?;
        for j in 1..=self.truncation {
            for (k, v) in self.row(j).iter().enumerate() {
                w.write_record(&[j.to_string(), (k + 1).to_string(), format!("{v:e}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Standard normal sampler: Marsaglia polar method over a ChaCha20 stream.
struct PolarNormal {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl PolarNormal {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    fn uniform_sym(&mut self) -> f64 {
        let u = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * u - 1.0
    }

    fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let x = self.uniform_sym();
            let y = self.uniform_sym();
            let s = x * x + y * y;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(y * f);
                return x * f;
            }
        }
    }
}

/// Path on stream 0 of `seed`.
pub fn sample_path(spec: &NoiseSpec, seed: u64) -> BrownianPath {
    sample_path_for(spec, seed, 0)
}

/// Path number `index` of a Monte Carlo study with `master_seed`; distinct
/// indices use independent ChaCha20 streams.
pub fn sample_path_for(spec: &NoiseSpec, master_seed: u64, index: u64) -> BrownianPath {
    let tau = spec.fine_tau();
    let sd = tau.sqrt();
    let mut normal = PolarNormal::new(master_seed, index);
    let increments = (0..spec.truncation * spec.fine_steps)
        .map(|_| sd * normal.sample())
        .collect();
    BrownianPath {
        seed: master_seed,
        stream: index,
        truncation: spec.truncation,
        steps: spec.fine_steps,
        tau,
        increments,
    }
}

/// Sums blocks of `factor` consecutive increments. Blocks are summed
/// pairwise by halving, so nested power-of-two coarsenings agree bit for
/// bit: `coarsen(coarsen(p, 2), 2) == coarsen(p, 4)`.
pub fn coarsen(path: &BrownianPath, factor: usize) -> Result<BrownianPath> {
    if factor == 0 || path.steps % factor != 0 {
        return Err(Error::InvalidArgument(format!(
            "coarsening factor {factor} does not divide {} steps",
            path.steps
        )));
    }
    let steps = path.steps / factor;
    let mut increments = Vec::with_capacity(path.truncation * steps);
    for j in 1..=path.truncation {
        increments.extend(path.row(j).chunks_exact(factor).map(pairwise_sum));
    }
    Ok(BrownianPath {
        seed: path.seed,
        stream: path.stream,
        truncation: path.truncation,
        steps,
        tau: path.tau * factor as f64,
        increments,
    })
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// `γ_j^{1/2} P_h e_j` for `j = 1 … L` on one mesh, computed once and
/// reused for every path.
#[derive(Debug, Clone)]
pub struct ProjectedModes {
    dim: usize,
    scaled: Vec<Vec<f64>>,
}

impl ProjectedModes {
    pub fn new(space: &FeSpace, spec: &NoiseSpec) -> Result<Self> {
        let scaled = (1..=spec.truncation)
            .map(|j| {
                let s = spec.eigenvalue(j).sqrt();
                Ok(space.l2_project_cosine(j)?.into_iter().map(|v| s * v).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(Self {
            dim: space.dim(),
            scaled,
        })
    }

    pub fn truncation(&self) -> usize {
        self.scaled.len()
    }

    /// `γ_j^{1/2} P_h e_j`, 1-based.
    pub fn mode(&self, j: usize) -> &[f64] {
        &self.scaled[j - 1]
    }

    /// `g^k = τ^{-1} Σ_j γ_j^{1/2} Δβ_j^k P_h e_j`, with `g^0 = 0`.
    pub fn project(&self, path: &BrownianPath) -> Result<ProjectedNoiseTrack> {
        if path.truncation != self.truncation() {
            return Err(Error::DimensionMismatch {
                expected: self.truncation(),
                found: path.truncation,
            });
        }
        let inv_tau = 1.0 / path.tau;
        let mut g = vec![vec![0.0; self.dim]; path.steps + 1];
        for (j, mode) in self.scaled.iter().enumerate() {
            for (k, &db) in path.row(j + 1).iter().enumerate() {
                let c = db * inv_tau;
                for (gi, &p) in g[k + 1].iter_mut().zip(mode) {
                    *gi += c * p;
                }
            }
        }
        Ok(ProjectedNoiseTrack { tau: path.tau, g })
    }
}

/// Scaled projected increments `g^0 … g^N` on one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedNoiseTrack {
    tau: f64,
    g: Vec<Vec<f64>>,
}

impl ProjectedNoiseTrack {
    pub fn new(tau: f64, g: Vec<Vec<f64>>) -> Result<Self> {
        if g.is_empty() || g[0].iter().any(|&v| v != 0.0) {
            return Err(Error::InvalidArgument("g^0 must be present and zero".into()));
        }
        Ok(Self { tau, g })
    }

    /// Track of `steps` zero vectors, i.e. no noise.
    pub fn zeros(tau: f64, steps: usize, dim: usize) -> Self {
        Self {
            tau,
            g: vec![vec![0.0; dim]; steps + 1],
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Number of steps `N`.
    pub fn steps(&self) -> usize {
        self.g.len() - 1
    }

    pub fn g(&self, k: usize) -> &[f64] {
        &self.g[k]
    }

    pub fn as_slice(&self) -> &[Vec<f64>] {
        &self.g
    }

    /// Multiplies every `g^k` by `s`.
    pub fn scale(&mut self, s: f64) {
        for v in self.g.iter_mut().flatten() {
            *v *= s;
        }
    }
}

pub fn project_increments(
    path: &BrownianPath,
    spec: &NoiseSpec,
    space: &FeSpace,
) -> Result<ProjectedNoiseTrack> {
    ProjectedModes::new(space, spec)?.project(path)
}

/// `τ^γ Σ_{k=1}^{n} a_{n-k}^{(-γ)} g^k`.
pub fn frac_integrated_noise(
    track: &ProjectedNoiseTrack,
    gamma: f64,
    n: usize,
) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let w = cq_weights(-gamma, n)?;
    frac_integrated_noise_with(track, &w, n)
}

/// As [`frac_integrated_noise`] with precomputed weights `a^{(-γ)}`.
pub fn frac_integrated_noise_with(
    track: &ProjectedNoiseTrack,
    weights: &CqWeights,
    n: usize,
) -> Result<Vec<f64>> {
    if n > track.steps() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: track.g.len(),
        });
    }
    if n > weights.n_max() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: weights.len(),
        });
    }
    let dim = track.g[0].len();
    let mut out = vec![0.0; dim];
    for k in 1..=n {
        let a = weights[n - k];
        if a == 0.0 {
            continue;
        }
        for (o, g) in out.iter_mut().zip(&track.g[k]) {
            *o += a * g;
        }
    }
    let s = track.tau.powf(-weights.order());
    out.iter_mut().for_each(|o| *o *= s);
    Ok(out)
}
