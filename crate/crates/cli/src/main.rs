use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hcl_core::bounds::{
    assessment_bound, assessment_bound_scaled, regret_terms, storage_bound, BoundInputs,
};
use hcl_core::experiment::{run_experiment, ExperimentSpec, SUMMARY_FILE};

/// Context-aware worker selection experiments.
#[derive(Parser)]
#[command(name = "hcl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid and write traces plus a summary.
    Run(RunArgs),
    /// Print the closed-form regret, assessment and storage bounds.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec (`key = value` lines). Defaults apply without one.
    spec: Option<PathBuf>,

    /// Override a spec key, e.g. `--set horizon=1000`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output directory; takes precedence over `output_dir` in the spec.
    #[arg(long, env = "HCL_OUTPUT_DIR")]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 10_000)]
    horizon: usize,
    #[arg(long, default_value_t = 100)]
    workers: usize,
    /// Joint context dimension of every worker.
    #[arg(long, default_value_t = 3)]
    dims: usize,
    #[arg(long, default_value_t = BoundInputs::DEFAULT_ALPHA)]
    alpha: f64,
    /// Hölder constant.
    #[arg(long, default_value_t = BoundInputs::DEFAULT_LIPSCHITZ)]
    lipschitz: f64,
    #[arg(long, default_value_t = 5.0)]
    q_max: f64,
    /// Exploration factor applied to the assessment bound.
    #[arg(long, default_value_t = 1.0)]
    f: f64,
    /// Print one row per decade 10, 100, ... up to the horizon.
    #[arg(long)]
    sweep: bool,
}

fn run(args: RunArgs) -> Result<()> {
    let mut spec = match &args.spec {
        Some(path) => ExperimentSpec::load(path)?,
        None => ExperimentSpec::default(),
    };
    for item in &args.overrides {
        let (key, value) = item
            .split_once('=')
            .with_context(|| format!("override `{item}` is not KEY=VALUE"))?;
        spec.set(key.trim(), value.trim())
            .with_context(|| format!("override `{item}`"))?;
    }
    let Some(out) = args.out.clone().or_else(|| spec.output_dir.clone()) else {
        bail!("no output directory: pass --out, set HCL_OUTPUT_DIR or output_dir");
    };
    if let Some(n) = args.threads {
        rayon_threads(n)?;
    }
    let summary = run_experiment(&spec, &out)?;
    println!("Γ_T(A) / Γ_T(HCL)");
    print!("{}", summary.ratio_table());
    println!("wrote {}", out.join(SUMMARY_FILE).display());
    Ok(())
}

fn rayon_threads(n: usize) -> Result<()> {
    hcl_core::experiment::set_threads(n).context("configuring the thread pool")
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let horizons: Vec<usize> = if args.sweep {
        std::iter::successors(Some(10usize), |t| t.checked_mul(10))
            .take_while(|&t| t < args.horizon)
            .chain([args.horizon])
            .collect()
    } else {
        vec![args.horizon]
    };
    println!(
        "{:>12} {:>14} {:>14} {:>14} {:>12}",
        "T", "regret", "assessments", "assess(f)", "storage"
    );
    for t in horizons {
        let inputs = BoundInputs::uniform(
            t,
            args.workers,
            args.dims,
            args.q_max,
            args.alpha,
            args.lipschitz,
        );
        let regret = regret_terms(&inputs)?.total();
        println!(
            "{:>12} {:>14.6e} {:>14.6e} {:>14.6e} {:>12.3}",
            t,
            regret,
            assessment_bound(t, args.alpha, args.dims)?,
            assessment_bound_scaled(t, args.alpha, args.dims, args.f)?,
            storage_bound(t, args.alpha, args.dims)?,
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Bounds(args) => bounds(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
