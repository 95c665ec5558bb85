use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pinnlab_core::experiment::{
    compare_schemes, exit_code, run_experiment_with, snapshot_from_run, sweep, ExperimentConfig, SweepAxis, PRESETS,
};
use pinnlab_core::numfmt::fmt_g17;
use pinnlab_core::training::TrainRecord;
use pinnlab_core::PinnError;

/// Environment variable naming the default output root.
const OUT_ENV: &str = "PINNLAB_OUT";

#[derive(Parser)]
#[command(
    name = "pinnlab",
    version,
    about = "Residual-minimisation training experiments for heat and Poisson problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Preset name or path to a `key = value` config file.
    source: String,
    /// Override one key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output root (default: $PINNLAB_OUT, else ./runs).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Do not print logged iterations.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Train one configuration and write its CSVs.
    Run(RunArgs),
    /// Run the configuration with implicit and explicit Euler quotients.
    Compare(RunArgs),
    /// One run per value of a parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// width, n_points, k or lambda.
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Comma-separated seeds (default: the config's seed).
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
    },
    /// Write solution profiles of a finished run from its checkpoint.
    Snapshot {
        /// Run directory containing config.txt and checkpoint.txt.
        run_dir: PathBuf,
        /// Comma-separated times (default: the run's snapshot times).
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
        /// Nodes per axis.
        #[arg(long)]
        nx: Option<usize>,
        /// Output file (default: <run_dir>/profiles.csv).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// List the bundled presets.
    Presets,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<PinnError> for Failure {
    fn from(e: PinnError) -> Self {
        let code = match &e {
            PinnError::Config { .. } => 2,
            PinnError::Io(_) | PinnError::Checkpoint(_) => 5,
            PinnError::NonFiniteEnergy { .. } => 4,
            PinnError::Contract(_) => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = if let Some(c) = ExperimentConfig::preset(&args.source) {
        c
    } else {
        let path = Path::new(&args.source);
        if !path.exists() {
            return Err(Failure::config(format!(
                "`{}` is neither a preset ({}) nor an existing config file",
                args.source,
                PRESETS.join(", ")
            )));
        }
        let text = fs::read_to_string(path).map_err(|e| Failure {
            code: 5,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        ExperimentConfig::parse(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?
    };
    for kv in &args.set {
        cfg.apply_override(kv)
            .map_err(|e| Failure::config(format!("--set {kv}: {e}")))?;
    }
    // everything that can be checked before training is checked here
    cfg.resolve().map_err(|e| Failure::config(e.to_string()))?;
    Ok(cfg)
}

fn out_root(args: &RunArgs) -> PathBuf {
    args.out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn progress(quiet: bool) -> impl FnMut(&TrainRecord) {
    move |r: &TrainRecord| {
        if !quiet {
            eprintln!(
                "iter {:>7}  energy {:<12.5e}  sup_ratio {:<10.4}  rel_err {:.3e}",
                r.iteration, r.energy, r.diagnostics.sup_ratio, r.diagnostics.rel_error_l2
            );
        }
    }
}

fn run(args: &RunArgs) -> Result<u8, Failure> {
    let cfg = load_config(args)?;
    let dir = out_root(args).join(cfg.run_name());
    let art = run_experiment_with(&cfg, &dir, progress(args.quiet))?;
    let d = &art.last.diagnostics;
    println!(
        "{}: {} at iteration {} (energy {}, sup_ratio {}, error_l2 {})",
        cfg.run_name(),
        art.termination.label(),
        art.last.iteration,
        fmt_g17(art.last.energy),
        fmt_g17(d.sup_ratio),
        fmt_g17(d.error_l2)
    );
    println!("wrote {}", dir.display());
    Ok(exit_code(art.termination) as u8)
}

fn compare(args: &RunArgs) -> Result<u8, Failure> {
    let cfg = load_config(args)?;
    if !matches!(cfg.scheme, pinnlab_core::energies::Scheme::TimeDiscrete(_)) {
        return Err(Failure::config(
            "compare needs a time-discrete configuration (scheme = ie or ee)",
        ));
    }
    let dir = out_root(args).join(format!("{}-compare", cfg.run_name()));
    let outcomes = compare_schemes(&cfg, &dir)?;
    for o in &outcomes {
        println!(
            "{}: {} ({}, max sup_ratio {})",
            o.scheme.label(),
            o.verdict(),
            o.run.termination.label(),
            fmt_g17(o.run.max_sup_ratio)
        );
    }
    println!("wrote {}", dir.join("compare.csv").display());
    Ok(0)
}

fn run_sweep(args: &RunArgs, axis: &str, values: &[f64], seeds: &[u64]) -> Result<u8, Failure> {
    let axis = SweepAxis::parse(axis)
        .ok_or_else(|| Failure::config(format!("unknown sweep axis `{axis}` (width, n_points, k, lambda)")))?;
    let cfg = load_config(args)?;
    let seeds = if seeds.is_empty() {
        vec![cfg.seed]
    } else {
        seeds.to_vec()
    };
    let dir = out_root(args).join(format!("{}-sweep-{}", cfg.run_name(), axis.label()));
    let points = sweep(&cfg, axis, values, &seeds, &dir).map_err(|e| match e {
        PinnError::Contract(m) => Failure::config(m),
        e => e.into(),
    })?;
    for p in &points {
        println!(
            "{} = {} seed {}: {} error_l2 {} reg_j {}",
            axis.label(),
            fmt_g17(p.value),
            p.seed,
            p.run.termination.label(),
            fmt_g17(p.run.last.diagnostics.error_l2),
            fmt_g17(p.run.reg_j)
        );
    }
    println!("wrote {}", dir.join("sweep.csv").display());
    Ok(0)
}

fn snapshot(run_dir: &Path, times: &[f64], nx: Option<usize>, output: Option<PathBuf>) -> Result<u8, Failure> {
    let path = output.unwrap_or_else(|| run_dir.join("profiles.csv"));
    let file = File::create(&path).map_err(|e| Failure {
        code: 5,
        message: format!("{}: {e}", path.display()),
    })?;
    let times = (!times.is_empty()).then_some(times);
    snapshot_from_run(run_dir, times, nx, BufWriter::new(file)).map_err(|e| match e {
        PinnError::Contract(m) => Failure::config(m),
        e => e.into(),
    })?;
    println!("wrote {}", path.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Compare(a) => compare(a),
        Command::Sweep {
            run,
            axis,
            values,
            seeds,
        } => run_sweep(run, axis, values, seeds),
        Command::Snapshot {
            run_dir,
            times,
            nx,
            output,
        } => snapshot(run_dir, times, *nx, output.clone()),
        Command::Presets => {
            for p in PRESETS {
                println!("{p}");
            }
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("pinnlab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
