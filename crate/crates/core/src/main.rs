//! Command-line front end. On failure it prints one JSON line
//! `{"error": kind, "message": ...}` to stderr and exits with status 1.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use frac_ch::fracops::cq_weights;
use frac_ch::harness::{
    emit_table, linear_oracle, run_study, validate_config, write_table, Case, ExperimentPlan,
    FailurePolicy, StudyKind,
};
use frac_ch::mlf::mittag_leffler;
use frac_ch::noise::{project_increments, sample_path_for, NoiseSpec};
use frac_ch::fem1d::{FeSpace, UniformMesh1D};
use frac_ch::solver::{run_path, InitialCondition, SchemeConfig};
use frac_ch::{Error, Result};

#[derive(Parser)]
#[command(name = "frac-ch", version, about = "Time-fractional stochastic Cahn-Hilliard: FE/CQ solver and convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo convergence study and write its error table.
    Study(StudyArgs),
    /// Print convolution-quadrature weights as CSV `order,j,a_j`.
    Weights {
        #[arg(long, allow_hyphen_values = true)]
        order: f64,
        #[arg(long)]
        n: usize,
    },
    /// Check a plan and print its diagnostics as JSON.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Cross-checks against the Mittag-Leffler function.
    Oracle(OracleArgs),
    /// Dump one Brownian path as CSV `j,k,increment`.
    Noise(NoiseArgs),
    /// Solve one path and dump the trajectory as CSV `n,t,u0,…`.
    Trajectory(TrajectoryArgs),
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    case: Option<Case>,
    #[arg(long)]
    study: Option<StudyKind>,
    /// Comma-separated list.
    #[arg(long, value_delimiter = ',')]
    resolutions: Option<Vec<usize>>,
    #[arg(long)]
    reference: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    policy: Option<FailurePolicy>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    /// Linear noise-free problem against the spectral solution.
    #[arg(long, conflicts_with = "z")]
    linear: bool,
    #[arg(long)]
    alpha: f64,
    /// Second Mittag-Leffler parameter (point evaluation).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Evaluate `E_{α,β}(z)` at this point.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value = "b")]
    case: Case,
    #[arg(long, default_value_t = 0.01)]
    final_time: f64,
    #[arg(long, default_value_t = 256)]
    elements: usize,
    #[arg(long, value_delimiter = ',', default_value = "20,40,80,160")]
    steps: Vec<usize>,
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long)]
    truncation: usize,
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value_t = 0.01)]
    final_time: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value = "a")]
    case: Case,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    final_time: f64,
    #[arg(long, default_value_t = 64)]
    elements: usize,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn study(a: StudyArgs) -> Result<()> {
    let mut plan = ExperimentPlan::load(&a.config)?;
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = a.$f { plan.$f = v; } )* };
    }
    set!(alpha, gamma, m, case, study, resolutions, reference, samples, seed, policy);
    if a.epsilon.is_some() {
        plan.epsilon = a.epsilon;
    }
    for w in validate_config(&plan).into_result()? {
        eprintln!("{}", json!({ "warning": w }));
    }
    let result = match a.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(|| run_study(&plan))?,
        None => run_study(&plan)?,
    };
    match &a.out {
        Some(p) => emit_table(&result.table, p)?,
        None => write_table(&result.table, io::stdout().lock())?,
    }
    let d = &result.diagnostics;
    eprintln!(
        "{}",
        json!({
            "samples_used": d.samples_used,
            "dropped": d.dropped,
            "max_mass_defect": d.max_mass_defect,
            "max_newton_iters": d.max_newton_iters,
        })
    );
    Ok(())
}

fn weights(order: f64, n: usize) -> Result<()> {
    let w = cq_weights(order, n)?;
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    out.write_record(["order", "j", "a_j"])?;
    for (j, a) in w.as_slice().iter().enumerate() {
        out.write_record(&[order.to_string(), j.to_string(), a.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

fn validate(config: PathBuf) -> Result<()> {
    let plan = ExperimentPlan::load(&config)?;
    let d = validate_config(&plan);
    println!(
        "{}",
        json!({ "ok": d.is_ok(), "eta": d.eta, "warnings": d.warnings, "errors": d.errors })
    );
    d.into_result().map(|_| ())
}

fn oracle(a: OracleArgs) -> Result<()> {
    if let Some(z) = a.z {
        println!("{}", mittag_leffler(a.alpha, a.beta, z)?);
        return Ok(());
    }
    if !a.linear {
        return Err(Error::InvalidArgument("choose --linear or --z".into()));
    }
    let t = linear_oracle(
        a.alpha,
        a.epsilon,
        &a.case.initial_condition(),
        a.final_time,
        a.elements,
        &a.steps,
    )?;
    write_table(&t, io::stdout().lock())
}

fn noise(a: NoiseArgs) -> Result<()> {
    let spec = NoiseSpec::new(a.m, a.truncation, a.final_time, a.steps)?;
    sample_path_for(&spec, a.seed, a.stream).write_csv(output(&a.out)?)
}

fn trajectory(a: TrajectoryArgs) -> Result<()> {
    let mesh = UniformMesh1D::new(a.elements)?;
    let space = FeSpace::new(mesh)?;
    let eps = a.epsilon.unwrap_or_else(|| a.case.default_epsilon());
    let cfg = SchemeConfig::new(a.alpha, a.gamma, eps, a.final_time, a.steps, mesh)?;
    let spec = NoiseSpec::new(a.m, a.elements - 1, a.final_time, a.steps)?;
    let track = project_increments(&sample_path_for(&spec, a.seed, 0), &spec, &space)?;
    let ic: InitialCondition = a.case.initial_condition();
    run_path(&cfg, &ic, &track)?.write_csv(cfg.tau(), output(&a.out)?)
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Study(a) => study(a),
        Command::Weights { order, n } => weights(order, n),
        Command::Validate { config } => validate(config),
        Command::Oracle(a) => oracle(a),
        Command::Noise(a) => noise(a),
        Command::Trajectory(a) => trajectory(a),
    };
    if let Err(e) = result {
        eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
        std::process::exit(1);
    }
}
