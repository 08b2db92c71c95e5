//! Monte Carlo convergence studies.
//!
//! Sample `s` of a plan uses noise stream `s` of the plan's seed. Samples
//! run in parallel and are reduced in index order, so results do not depend
//! on the number of worker threads.

use rayon::prelude::*;

use super::config::{validate_config, ExperimentPlan, FailurePolicy, StudyKind};
use super::rates::{beta_limit, theoretical_rate};
use super::table::{ErrorTable, StudyDiagnostics};
use crate::error::{Error, Result};
use crate::fem1d::{FeSpace, UniformMesh1D};
use crate::noise::{coarsen, sample_path_for, NoiseSpec, ProjectedModes, ProjectedNoiseTrack};
use crate::solver::{initial_state, run_path_from, SchemeConfig, SolutionHistory};

/// Table plus run statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub table: ErrorTable,
    pub diagnostics: StudyDiagnostics,
}

/// `√(mean_s ‖e_s‖²)` with the `L²` norm of `space`.
pub fn error_norm(space: &FeSpace, samples: &[Vec<f64>]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no error samples".into()));
    }
    let sq: f64 = samples.iter().map(|e| space.mass().quad_form(e).max(0.0)).sum();
    Ok((sq / samples.len() as f64).sqrt())
}

/// Nodal values of a coarse P1 function at the nodes of a nested fine mesh.
pub fn inject(coarse: &[f64], fine_elements: usize) -> Result<Vec<f64>> {
    let m = coarse.len().saturating_sub(1);
    if m == 0 || fine_elements % m != 0 {
        return Err(Error::InvalidArgument(format!(
            "mesh with {m} elements is not nested in one with {fine_elements}"
        )));
    }
    let r = fine_elements / m;
    Ok((0..=fine_elements)
        .map(|i| {
            let (e, k) = (i / r, i % r);
            if k == 0 {
                coarse[e]
            } else {
                let s = k as f64 / r as f64;
                (1.0 - s) * coarse[e] + s * coarse[e + 1]
            }
        })
        .collect())
}

pub fn run_study(plan: &ExperimentPlan) -> Result<StudyResult> {
    match plan.study {
        StudyKind::Temporal => run_temporal_study(plan),
        StudyKind::Spatial => run_spatial_study(plan),
    }
}

/// Per-sample outcome: squared errors per resolution and run statistics.
struct SampleOutcome {
    sq_errors: Vec<f64>,
    max_mass_defect: f64,
    max_newton_iters: usize,
    max_laplacian_norm: f64,
}

impl SampleOutcome {
    fn new(n: usize) -> Self {
        Self {
            sq_errors: vec![0.0; n],
            max_mass_defect: 0.0,
            max_newton_iters: 0,
            max_laplacian_norm: 0.0,
        }
    }

    fn absorb(&mut self, h: &SolutionHistory) {
        self.max_mass_defect = self.max_mass_defect.max(h.max_mass_defect);
        self.max_laplacian_norm = self.max_laplacian_norm.max(h.max_laplacian_norm);
        let it = h.reports.iter().map(|r| r.newton_iters).max().unwrap_or(0);
        self.max_newton_iters = self.max_newton_iters.max(it);
    }
}

fn scheme(plan: &ExperimentPlan, steps: usize, m: usize) -> Result<SchemeConfig> {
    let mut cfg = SchemeConfig::new(
        plan.alpha,
        plan.gamma,
        plan.epsilon(),
        plan.final_time,
        steps,
        UniformMesh1D::new(m)?,
    )?
    .with_newton(plan.newton_tol, plan.newton_max);
    cfg.nonlinear = plan.nonlinear;
    Ok(cfg)
}

fn noisy_track(modes: &ProjectedModes, path: &crate::noise::BrownianPath, amp: f64) -> Result<ProjectedNoiseTrack> {
    let mut t = modes.project(path)?;
    if amp != 1.0 {
        t.scale(amp);
    }
    Ok(t)
}

fn tag(sample: usize, resolution: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::Sample {
        sample,
        resolution,
        source: Box::new(e),
    }
}

fn reduce(
    plan: &ExperimentPlan,
    outcomes: Vec<Result<SampleOutcome>>,
    resolutions: &[usize],
    fixed: f64,
    strict: f64,
) -> Result<StudyResult> {
    let mut diag = StudyDiagnostics {
        study: Some(plan.study),
        ..Default::default()
    };
    let mut sums = vec![0.0; resolutions.len()];
    for (s, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(o) => {
                diag.samples_used += 1;
                for (acc, e) in sums.iter_mut().zip(&o.sq_errors) {
                    *acc += e;
                }
                diag.max_mass_defect = diag.max_mass_defect.max(o.max_mass_defect);
                diag.max_newton_iters = diag.max_newton_iters.max(o.max_newton_iters);
                diag.max_laplacian_norm = diag.max_laplacian_norm.max(o.max_laplacian_norm);
            }
            Err(e) => match plan.policy {
                FailurePolicy::Abort => return Err(e),
                FailurePolicy::Drop => diag.dropped.push(s),
            },
        }
    }
    if diag.samples_used == 0 {
        return Err(Error::InvalidArgument("every sample was dropped".into()));
    }
    let errors: Vec<f64> = sums.iter().map(|s| (s / diag.samples_used as f64).sqrt()).collect();
    Ok(StudyResult {
        table: ErrorTable::from_errors(resolutions, &errors, fixed, strict),
        diagnostics: diag,
    })
}

/// Errors at `T` of each `N` in `plan.resolutions` against `N_ref`, on a
/// fixed mesh, with increments generated at `N_ref` and coarsened.
pub fn run_temporal_study(plan: &ExperimentPlan) -> Result<StudyResult> {
    if plan.study != StudyKind::Temporal {
        return Err(Error::InvalidArgument("plan is not a temporal study".into()));
    }
    validate_config(plan).into_result()?;
    let m = plan.fixed_resolution();
    let space = FeSpace::new(UniformMesh1D::new(m)?)?;
    let spec = NoiseSpec::new(plan.m, plan.truncation(), plan.final_time, plan.reference)?;
    let modes = ProjectedModes::new(&space, &spec)?;
    let u0 = initial_state(&plan.case.initial_condition(), &space)?;
    let ref_cfg = scheme(plan, plan.reference, m)?;
    let cfgs = plan
        .resolutions
        .iter()
        .map(|&n| scheme(plan, n, m))
        .collect::<Result<Vec<_>>>()?;

    let outcomes: Vec<Result<SampleOutcome>> = (0..plan.samples)
        .into_par_iter()
        .map(|s| {
            let path = sample_path_for(&spec, plan.seed, s as u64);
            let mut out = SampleOutcome::new(cfgs.len());
            let track = noisy_track(&modes, &path, plan.noise_amplitude)?;
            let reference = run_path_from(&ref_cfg, u0.clone(), &track).map_err(tag(s, plan.reference))?;
            out.absorb(&reference);
            let u_ref = reference.last().to_vec();
            drop(reference);
            for (k, cfg) in cfgs.iter().enumerate() {
                let coarse = coarsen(&path, plan.reference / cfg.steps)?;
                let track = noisy_track(&modes, &coarse, plan.noise_amplitude)?;
                let h = run_path_from(cfg, u0.clone(), &track).map_err(tag(s, cfg.steps))?;
                out.absorb(&h);
                let e: Vec<f64> = h.last().iter().zip(&u_ref).map(|(a, b)| a - b).collect();
                out.sq_errors[k] = space.mass().quad_form(&e).max(0.0);
            }
            Ok(out)
        })
        .collect();

    let t = theoretical_rate(plan.alpha, plan.gamma, beta_limit(plan.m))?;
    reduce(plan, outcomes, &plan.resolutions, t.temporal_fixed, t.temporal_strict)
}

/// Errors at `T` of each mesh `M` in `plan.resolutions` against `M_ref`,
/// with a fixed time step and one set of Brownian modes shared by all
/// meshes.
pub fn run_spatial_study(plan: &ExperimentPlan) -> Result<StudyResult> {
    if plan.study != StudyKind::Spatial {
        return Err(Error::InvalidArgument("plan is not a spatial study".into()));
    }
    validate_config(plan).into_result()?;
    let n = plan.fixed_resolution();
    let spec = NoiseSpec::new(plan.m, plan.truncation(), plan.final_time, n)?;
    let fine = FeSpace::new(UniformMesh1D::new(plan.reference)?)?;
    let ic = plan.case.initial_condition();
    // (space, modes, U⁰, config) for each coarse mesh, then the reference
    let setup = |m: usize| -> Result<(FeSpace, ProjectedModes, Vec<f64>, SchemeConfig)> {
        let sp = FeSpace::new(UniformMesh1D::new(m)?)?;
        let modes = ProjectedModes::new(&sp, &spec)?;
        let u0 = initial_state(&ic, &sp)?;
        Ok((sp, modes, u0, scheme(plan, n, m)?))
    };
    let levels = plan.resolutions.iter().map(|&m| setup(m)).collect::<Result<Vec<_>>>()?;
    let (_, ref_modes, ref_u0, ref_cfg) = setup(plan.reference)?;

    let outcomes: Vec<Result<SampleOutcome>> = (0..plan.samples)
        .into_par_iter()
        .map(|s| {
            let path = sample_path_for(&spec, plan.seed, s as u64);
            let mut out = SampleOutcome::new(levels.len());
            let track = noisy_track(&ref_modes, &path, plan.noise_amplitude)?;
            let reference = run_path_from(&ref_cfg, ref_u0.clone(), &track).map_err(tag(s, plan.reference))?;
            out.absorb(&reference);
            let u_ref = reference.last().to_vec();
            drop(reference);
            for (k, (sp, modes, u0, cfg)) in levels.iter().enumerate() {
                let track = noisy_track(modes, &path, plan.noise_amplitude)?;
                let m = sp.mesh().num_elements();
                let h = run_path_from(cfg, u0.clone(), &track).map_err(tag(s, m))?;
                out.absorb(&h);
                let up = inject(h.last(), plan.reference)?;
                let e: Vec<f64> = up.iter().zip(&u_ref).map(|(a, b)| a - b).collect();
                out.sq_errors[k] = fine.mass().quad_form(&e).max(0.0);
            }
            Ok(out)
        })
        .collect();

    let t = theoretical_rate(plan.alpha, plan.gamma, beta_limit(plan.m))?;
    reduce(plan, outcomes, &plan.resolutions, t.spatial, t.spatial)
}
