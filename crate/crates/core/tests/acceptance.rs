//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines always appear in
//! `cargo test` output. The process fails if any criterion fails, except
//! the lower-bound inequality for the fractional-integral weights, which is
//! false as stated (the ratio of its two sides is `Γ(n+α) n^{1-α} / Γ(n+1)`,
//! strictly below 1 for every `n`); that line is evaluated at the stated
//! tolerance and reported as FAIL without failing the run.
//!
//! Set `ACCEPTANCE_QUICK=1` to skip the Monte Carlo rate criteria.

mod common;

use std::time::Instant;

use frac_ch::fem1d::{nonlinear_load, FeFunction, FeSpace, UniformMesh1D};
use frac_ch::fracops::{
    resolvent_kernels, weight_convolution_check, weight_lower_bound_check, weight_lower_bound_ratio,
};
use frac_ch::harness::{
    linear_oracle, run_spatial_study, run_temporal_study, theoretical_rate, write_table, Case,
    ExperimentPlan, StudyKind, StudyResult,
};
use frac_ch::noise::{project_increments, sample_path, NoiseSpec, ProjectedNoiseTrack};
use frac_ch::solver::{initial_state, run_path_from, InitialCondition, SchemeConfig, Stepper};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

struct Report {
    failures: Vec<String>,
    known: Vec<String>,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, ok: bool, detail: String) {
        println!("[{id}] {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures.push(format!("{id} {name}"));
        }
    }

    /// A line whose failure is an analysed defect of the criterion itself.
    fn known_line(&mut self, id: &str, name: &str, ok: bool, detail: String) {
        println!("[{id}] {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.known.push(format!("{id} {name}"));
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    lo + (hi - lo) * u
}

fn criterion_1(rep: &mut Report) {
    let mut worst: f64 = 0.0;
    for a in [0.25, 0.5, 0.75] {
        worst = worst.max(weight_convolution_check(a, 512).unwrap());
    }
    rep.line("1a", "CQ weight convolution identity, n <= 512", worst <= 1e-12, format!("max deviation {worst:.2e} <= 1e-12"));

    let mut all = true;
    let mut detail = Vec::new();
    for a in [0.25, 0.5, 0.75] {
        for tau in [1e-2, 1e-3] {
            let holds = weight_lower_bound_check(a, tau, 10_000).unwrap();
            let (lo, hi) = weight_lower_bound_ratio(a, tau, 10_000).unwrap();
            all &= holds;
            if tau == 1e-2 {
                detail.push(format!("alpha={a}: lhs/rhs in [{lo:.4}, {hi:.6}]"));
            }
        }
    }
    rep.known_line(
        "1b",
        "weight lower bound tau^a a_n^(-a) >= tau t_n^(a-1)/Gamma(a), n <= 1e4",
        all,
        format!("{}; ratio < 1 for every n, known false as stated", detail.join("; ")),
    );
}

fn criterion_2(rep: &mut Report) -> f64 {
    let (m, n, t) = (64, 100, 0.01);
    let mesh = UniformMesh1D::new(m).unwrap();
    let space = FeSpace::new(mesh).unwrap();
    let spec = NoiseSpec::new(1, m - 1, t, n).unwrap();
    let track = project_increments(&sample_path(&spec, 31337), &spec, &space).unwrap();
    let cfg = SchemeConfig::new(1.0, 0.0, 1.0, t, n, mesh).unwrap().with_newton(1e-13, 50);
    let u0 = initial_state(&InitialCondition::Cosine, &space).unwrap();
    let hist = run_path_from(&cfg, u0.clone(), &track).unwrap();

    let oracle = common::ClassicalEuler::new(m, cfg.tau(), 1.0);
    let mut u = u0;
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        u = oracle.step(&u, track.g(k));
        for (a, b) in u.iter().zip(&hist.states[k]) {
            worst = worst.max((a - b).abs());
        }
    }
    rep.line("2", "classical-limit trajectory (alpha=1, gamma=0, N=100, M=64)", worst <= 1e-12, format!("max nodal difference {worst:.2e} <= 1e-12"));
    hist.max_mass_defect
}

fn criterion_3(rep: &mut Report) {
    for alpha in [0.5, 0.75] {
        let t = linear_oracle(alpha, 1.0, &InitialCondition::Cosine, 0.01, 256, &[20, 40, 80, 160]).unwrap();
        let q = t.fitted_rate.unwrap_or(f64::NAN);
        rep.line("3", &format!("linear deterministic oracle, alpha={alpha}"), q >= 0.9, format!("fitted order {q:.3} >= 0.9"));
    }
}

fn criterion_4(rep: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let m = 32;
    let mesh = UniformMesh1D::new(m).unwrap();
    let space = FeSpace::new(mesh).unwrap();
    let n_steps = 128;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let alpha = uniform(&mut rng, 0.1, 1.0);
        let gamma = uniform(&mut rng, 0.0, 1.0);
        let eps = uniform(&mut rng, 0.05, 1.0);
        let k = 1 + (rng.next_u64() % 8) as usize;
        let t = uniform(&mut rng, 0.005, 0.5);
        let tau = t / n_steps as f64;
        let v = space.discrete_eigenvector(k);
        let amps: Vec<f64> = std::iter::once(0.0)
            .chain((0..n_steps).map(|_| uniform(&mut rng, -1.0, 1.0)))
            .collect();
        let rows = amps.iter().map(|a| v.iter().map(|x| a * x).collect()).collect();
        let track = ProjectedNoiseTrack::new(tau, rows).unwrap();
        let cfg = SchemeConfig::new(alpha, gamma, eps, t, n_steps, mesh)
            .unwrap()
            .linear()
            .with_newton(1e-13, 10);
        let hist = run_path_from(&cfg, vec![0.0; m + 1], &track).unwrap();
        let lam = eps * space.discrete_eigenvalue(k);
        let ks = resolvent_kernels(lam, alpha, gamma, tau, n_steps).unwrap();
        let want: Vec<f64> = (1..=n_steps).map(|n| ks.noise_response(&amps, n)).collect();
        let scale = want.iter().fold(0.0f64, |a, w| a.max(w.abs()));
        for n in 1..=n_steps {
            // the mode has value 1 at x = 0
            worst = worst.max((hist.states[n][0] - want[n - 1]).abs() / scale);
        }
    }
    rep.line("4", "per-mode kernel representation, 10 random (alpha, gamma, lambda), n <= 128", worst <= 1e-10, format!("max relative difference {worst:.2e} <= 1e-10"));
}

fn criterion_8(rep: &mut Report) {
    let r3 = |x: f64| format!("{x:.3}");
    let fixed = |a: f64, g: f64, b: f64| theoretical_rate(a, g, b).unwrap().temporal_fixed;
    let checks = [
        ("white noise, gamma=0.3, alpha=0.5", fixed(0.5, 0.3, 1.5), "0.238"),
        ("white noise, gamma=0.3, alpha=0.75", fixed(0.75, 0.3, 1.5), "0.456"),
        ("m=1, gamma=0.3, alpha=0.75", fixed(0.75, 0.3, 2.0), "0.550"),
        ("m=1, gamma=0.5, alpha=0.75", fixed(0.75, 0.5, 2.0), "0.750"),
        ("m=1, gamma=0.8, alpha=0.5", fixed(0.5, 0.8, 2.0), "0.800"),
        ("m=1, gamma=0.8, alpha=0.75", fixed(0.75, 0.8, 2.0), "1.000"),
        ("m=2, gamma=0.8, alpha=0.25", fixed(0.25, 0.8, 2.5), "0.550"),
        ("m=2, gamma=0.5, alpha=0.75", fixed(0.75, 0.5, 2.5), "0.750"),
        ("m=2, gamma=0.8, alpha=0.5", fixed(0.5, 0.8, 2.5), "0.800"),
        ("m=2, gamma=0.8, alpha=0.75", fixed(0.75, 0.8, 2.5), "1.000"),
        ("spatial m=1, gamma=0.6", theoretical_rate(0.5, 0.6, 2.0).unwrap().spatial, "2.000"),
        ("spatial m=2, gamma=0.6", theoretical_rate(0.5, 0.6, 2.5).unwrap().spatial, "2.000"),
        ("spatial m=0, gamma=0.6", theoretical_rate(0.5, 0.6, 1.5).unwrap().spatial, "1.500"),
    ];
    let mut bad = Vec::new();
    for (name, got, want) in checks {
        if r3(got) != want {
            bad.push(format!("{name}: {} != {want}", r3(got)));
        }
    }
    rep.line("8", "theoretical rates to 3 decimals", bad.is_empty(), if bad.is_empty() { format!("{} values match", checks.len()) } else { bad.join("; ") });
    println!(
        "[8] note: m=1, gamma=0.3, alpha=0.5 evaluates to {} (0.425 is sometimes quoted for this row; no branch of the rate formulas gives it)",
        r3(fixed(0.5, 0.3, 2.0))
    );
}

fn temporal(case: Case, alpha: f64, gamma: f64, m: u32, seed: u64) -> StudyResult {
    let mut plan = ExperimentPlan::new(StudyKind::Temporal, case, alpha, gamma, m, vec![20, 40, 80, 160], 1280);
    plan.fixed_resolution = Some(256);
    plan.samples = 100;
    plan.seed = seed;
    run_temporal_study(&plan).unwrap()
}

fn spatial(m: u32, seed: u64) -> StudyResult {
    let mut plan = ExperimentPlan::new(StudyKind::Spatial, Case::A, 0.5, 0.6, m, vec![20, 40, 80, 160], 640);
    plan.fixed_resolution = Some(100);
    plan.samples = 100;
    plan.seed = seed;
    run_spatial_study(&plan).unwrap()
}

fn rate_line(rep: &mut Report, id: &str, name: &str, r: &StudyResult, target: f64, band: f64, floor: Option<f64>) {
    let q = r.table.fitted_rate.unwrap_or(f64::NAN);
    let mut ok = (q - target).abs() <= band;
    let mut detail = format!("fitted {q:.3}, target {target} +/- {band}");
    if let Some(f) = floor {
        ok &= q >= f;
        detail.push_str(&format!(", >= {f}"));
    }
    let errs: Vec<String> = r.table.rows.iter().map(|row| format!("{:.2e}", row.error)).collect();
    detail.push_str(&format!("; errors {}", errs.join(" ")));
    rep.line(id, name, ok, detail);
}

fn criterion_9(rep: &mut Report, defects: &[f64]) {
    let worst = defects.iter().fold(0.0f64, |a, &b| a.max(b));
    rep.line("9a", "mass conservation on every accepted step", worst <= 1e-10, format!("max |(U^n - U^0, 1)| = {worst:.2e} <= 1e-10 over {} runs", defects.len()));

    // exact Jacobian against central differences
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mesh = UniformMesh1D::new(24).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let alpha = uniform(&mut rng, 0.1, 1.0);
        let eps = uniform(&mut rng, 0.05, 1.0);
        let cfg = SchemeConfig::new(alpha, 0.5, eps, 0.01, 10, mesh).unwrap();
        let st = Stepper::new(cfg, vec![0.0; 25]).unwrap();
        let mut vec = |s: f64| (0..25).map(|_| uniform(&mut rng, -s, s)).collect::<Vec<f64>>();
        let (u, w, du, dw, load) = (vec(1.5), vec(1.0), vec(1.0), vec(1.0), vec(1.0));
        let mu = uniform(&mut rng, -1.0, 1.0);
        let dmu = uniform(&mut rng, -1.0, 1.0);
        let e = 1e-5;
        let at = |s: f64| {
            let u1: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + s * b).collect();
            let w1: Vec<f64> = w.iter().zip(&dw).map(|(a, b)| a + s * b).collect();
            st.residual(&u1, &w1, mu + s * dmu, &load)
        };
        let (rp, rm) = (at(e), at(-e));
        let jv = st.jacobian_apply(&u, &du, &dw, dmu);
        let num: f64 = rp.iter().zip(&rm).zip(&jv).map(|((p, m), j)| ((p - m) / (2.0 * e) - j).powi(2)).sum();
        let den: f64 = jv.iter().map(|j| j * j).sum();
        worst = worst.max((num / den).sqrt());
    }
    rep.line("9b", "Newton Jacobian vs finite differences, 100 random states", worst <= 1e-6, format!("max relative difference {worst:.2e} <= 1e-6"));

    // (u³ - v³, u - v) >= 0 with the solver's quadrature
    let mut rng = ChaCha8Rng::seed_from_u64(9090);
    let mesh = UniformMesh1D::new(16).unwrap();
    let space = FeSpace::new(mesh).unwrap();
    let mut min_ratio = f64::INFINITY;
    for _ in 0..10_000 {
        let mut r = || (0..17).map(|_| uniform(&mut rng, -3.0, 3.0)).collect::<Vec<f64>>();
        let (u, v) = (r(), r());
        let fu = nonlinear_load(&FeFunction::new(mesh, u.clone()).unwrap());
        let fv = nonlinear_load(&FeFunction::new(mesh, v.clone()).unwrap());
        let d: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
        // (φ(u) - φ(v), u - v) + ‖u - v‖² = (u³ - v³, u - v)
        let phi_part: f64 = fu.iter().zip(&fv).zip(&d).map(|((a, b), c)| (a - b) * c).sum();
        let l2 = space.mass().quad_form(&d);
        min_ratio = min_ratio.min((phi_part + l2) / l2);
    }
    rep.line("9c", "monotone part (u^3 - v^3, u - v) >= 0 on 1e4 random pairs", min_ratio >= 0.0, format!("min (u^3-v^3,u-v)/|u-v|^2 = {min_ratio:.3e}"));

    // determinism and worker-count independence of a complete study
    let mut plan = ExperimentPlan::new(StudyKind::Temporal, Case::B, 0.6, 0.4, 1, vec![8, 16, 32], 64);
    plan.fixed_resolution = Some(32);
    plan.samples = 12;
    plan.seed = 99;
    let csv = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let r = pool.install(|| run_temporal_study(&plan)).unwrap();
        let mut buf = Vec::new();
        write_table(&r.table, &mut buf).unwrap();
        buf
    };
    let (a, b) = (csv(1), csv(1));
    rep.line("9d", "full-study determinism", a == b, format!("{} byte CSV identical on rerun", a.len()));
    let c = csv(4);
    rep.line("9e", "worker-count independence", a == c, "1 vs 4 worker threads".into());
}

fn main() {
    let quick = std::env::var("ACCEPTANCE_QUICK").is_ok_and(|v| v == "1");
    let start = Instant::now();
    let mut rep = Report {
        failures: Vec::new(),
        known: Vec::new(),
    };
    let mut defects = Vec::new();

    criterion_1(&mut rep);
    defects.push(criterion_2(&mut rep));
    criterion_3(&mut rep);
    criterion_4(&mut rep);
    if quick {
        println!("[5-7] skipped (ACCEPTANCE_QUICK=1)");
    } else {
        for (gamma, alpha, target, seed) in [(0.5, 0.5, 0.61, 501), (0.8, 0.75, 0.82, 502)] {
            let r = temporal(Case::A, alpha, gamma, 2, seed);
            defects.push(r.diagnostics.max_mass_defect);
            rate_line(&mut rep, "5", &format!("temporal rate m=2, case a, gamma={gamma}, alpha={alpha}"), &r, target, 0.25, None);
        }
        let r = temporal(Case::B, 0.75, 0.8, 1, 601);
        defects.push(r.diagnostics.max_mass_defect);
        rate_line(&mut rep, "6", "temporal rate m=1, case b, gamma=0.8, alpha=0.75", &r, 1.01, 0.3, None);
        for (m, seed) in [(1, 701), (2, 702)] {
            let r = spatial(m, seed);
            defects.push(r.diagnostics.max_mass_defect);
            rate_line(&mut rep, "7", &format!("spatial rate m={m}, case a, gamma=0.6, alpha=0.5"), &r, 2.15, 0.3, Some(1.7));
        }
    }
    criterion_8(&mut rep);
    criterion_9(&mut rep, &defects);

    println!(
        "acceptance: {} unexpected failure(s), {} known failure(s), {:.1?}",
        rep.failures.len(),
        rep.known.len(),
        start.elapsed()
    );
    for k in &rep.known {
        println!("  known: {k}");
    }
    if !rep.failures.is_empty() {
        for f in &rep.failures {
            println!("  failed: {f}");
        }
        std::process::exit(1);
    }
}
