//! Experiment harness: presets, runs, scheme comparisons, sweeps and
//! solution profiles, all written as CSV.

mod config;

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, SnapshotTimes, KEYS, PRESETS};

use crate::autodiff::{read_checkpoint, write_checkpoint, MlpParams};
use crate::diagnostics::fd_reference_heat;
use crate::energies::{regularizer_h1, Cutoff, Scheme};
use crate::error::{contract, Result};
use crate::numfmt::fmt_g17;
use crate::operators::{Field, TimeScheme};
use crate::training::{
    evaluation_grid, train_with, Domain, NetworkField, ProblemSpec, Termination, TimeGrid, TrainRecord, TrainTrajectory,
};

pub const TRAJECTORY_HEADER: &str =
    "iteration,energy,grad_norm,h1,h2,l2h2_bar,l2l2_hat_dt,sup_norm,sup_ratio,error_l2,rel_error_l2,error_h1,wall_ms";
pub const REPORT_HEADER: &str = "run,problem,scheme,seed,termination,iteration,energy,grad_norm,h1,h2,l2h2_bar,\
l2l2_hat_dt,sup_norm,sup_ratio,max_sup_ratio,error_l2,rel_error_l2,error_h1,reg_j,wall_ms";
pub const SNAPSHOT_HEADER_1D: &str = "source,t,x,u";
pub const SNAPSHOT_HEADER_2D: &str = "source,t,x,y,u";
pub const COMPARE_HEADER: &str =
    "scheme,termination,verdict,max_sup_ratio,sup_ratio,l2h2_bar,l2l2_hat_dt,energy,error_l2";
pub const SWEEP_HEADER: &str = "axis,value,seed,termination,diverged,energy,reg_j,sup_ratio,max_sup_ratio,h1,h2,\
error_l2,rel_error_l2,error_h1";

/// Files written by one run, plus the numbers callers usually want next.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub trajectory: PathBuf,
    pub snapshots: PathBuf,
    pub report: PathBuf,
    pub checkpoint: Option<PathBuf>,
    pub termination: Termination,
    pub last: TrainRecord,
    /// Largest `sup_ratio` over all logging events.
    pub max_sup_ratio: f64,
    /// `J(v) = ∫|∇v|²` of the final field on the evaluation grid.
    pub reg_j: f64,
}

impl RunArtifacts {
    pub fn diverged(&self) -> bool {
        matches!(self.termination, Termination::Diverged | Termination::NonFinite)
    }
}

/// Process exit code for a finished run.
pub fn exit_code(termination: Termination) -> i32 {
    match termination {
        Termination::MaxIters | Termination::Converged => 0,
        Termination::Diverged => 3,
        Termination::NonFinite => 4,
    }
}

fn row(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_g17(v)).collect::<Vec<_>>().join(",")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn record_columns(r: &TrainRecord) -> [f64; 12] {
    let d = &r.diagnostics;
    [
        r.energy,
        r.grad_norm,
        d.h1_norm,
        d.h2_norm,
        d.l2h2_bar,
        d.l2l2_hat_dt,
        d.sup_norm,
        d.sup_ratio,
        d.error_l2,
        d.rel_error_l2,
        d.error_h1,
        r.wall_ms,
    ]
}

pub fn write_trajectory<W: Write>(records: &[TrainRecord], mut out: W) -> Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for r in records {
        writeln!(out, "{},{}", r.iteration, row(&record_columns(r)))?;
    }
    out.flush()?;
    Ok(())
}

fn max_sup_ratio(records: &[TrainRecord]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for r in records {
        let v = r.diagnostics.sup_ratio;
        if v.is_nan() {
            return f64::NAN;
        }
        m = m.max(v);
    }
    m
}

fn reg_j(problem: &ProblemSpec, field: &dyn Field, eval_nodes: usize) -> Result<f64> {
    if problem.is_parabolic() {
        return Ok(f64::NAN);
    }
    regularizer_h1(field, &evaluation_grid(problem.domain, eval_nodes)?)
}

/// Trains the configured run and writes `config.txt`, `trajectory.csv`,
/// `snapshots.csv`, `report.csv` and (optionally) `checkpoint.txt` into
/// `dir`, creating it if needed.
pub fn run_experiment(cfg: &ExperimentConfig, dir: &Path) -> Result<RunArtifacts> {
    run_experiment_with(cfg, dir, |_| {})
}

/// As [`run_experiment`], calling `observer` with every logged record.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    dir: &Path,
    observer: impl FnMut(&TrainRecord),
) -> Result<RunArtifacts> {
    let (problem, spec, mut train_cfg) = cfg.resolve()?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.txt"), cfg.render())?;
    let checkpoint = cfg.checkpoint.then(|| dir.join("checkpoint.txt"));
    train_cfg.checkpoint = checkpoint.clone();

    let traj = train_with(&problem, &spec, &train_cfg, observer)?;
    if let Some(path) = &checkpoint {
        write_checkpoint(&traj.params, create(path)?)?;
    }

    let trajectory = dir.join("trajectory.csv");
    write_trajectory(&traj.records, create(&trajectory)?)?;

    let snapshots = dir.join("snapshots.csv");
    let times = snapshot_times(cfg, &problem, traj.grid.as_ref());
    let field = traj.field();
    write_snapshots(&problem, &field, &times, cfg.snapshot_nx, create(&snapshots)?)?;

    let report = dir.join("report.csv");
    let max_sup_ratio = max_sup_ratio(&traj.records);
    let reg_j = reg_j(&problem, &field, cfg.eval_nodes)?;
    write_report(cfg, &problem, &traj, max_sup_ratio, reg_j, create(&report)?)?;

    Ok(RunArtifacts {
        dir: dir.to_path_buf(),
        trajectory,
        snapshots,
        report,
        checkpoint,
        termination: traj.termination,
        last: traj.last().clone(),
        max_sup_ratio,
        reg_j,
    })
}

fn write_report<W: Write>(
    cfg: &ExperimentConfig,
    problem: &ProblemSpec,
    traj: &TrainTrajectory,
    max_sup_ratio: f64,
    reg_j: f64,
    mut out: W,
) -> Result<()> {
    let last = traj.last();
    let c = record_columns(last);
    writeln!(out, "{REPORT_HEADER}")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        cfg.run_name(),
        problem.name,
        cfg.scheme.label().to_ascii_lowercase(),
        cfg.seed,
        traj.termination.label(),
        last.iteration,
        row(&c[..8]),
        fmt_g17(max_sup_ratio),
        row(&c[8..11]),
        row(&[reg_j, c[11]]),
    )?;
    out.flush()?;
    Ok(())
}

fn snapshot_times(cfg: &ExperimentConfig, problem: &ProblemSpec, grid: Option<&TimeGrid>) -> Vec<f64> {
    match (&cfg.snapshot_times, problem.horizon) {
        (_, None) => vec![0.0],
        (SnapshotTimes::List(ts), Some(_)) => ts.clone(),
        (SnapshotTimes::Levels, Some(horizon)) => match grid {
            Some(g) => g.nodes().to_vec(),
            None => (0..=10).map(|i| horizon * i as f64 / 10.0).collect(),
        },
    }
}

/// Spatial sample points of a profile: `n` uniform nodes per axis,
/// restricted to the closed domain.
fn profile_points(domain: Domain, n: usize) -> Vec<Vec<f64>> {
    let h = 1.0 / (n - 1) as f64;
    let mut pts = Vec::new();
    match domain.spatial_dim() {
        1 => pts.extend((0..n).map(|i| vec![i as f64 * h])),
        _ => {
            for j in 0..n {
                for i in 0..n {
                    let x = vec![i as f64 * h, j as f64 * h];
                    if domain == Domain::LShape && x[0] > 0.5 && x[1] > 0.5 {
                        continue;
                    }
                    pts.push(x);
                }
            }
        }
    }
    pts
}

/// One sampled value of a solution profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    /// `network`, `initial`, `exact` or `reference`.
    pub source: &'static str,
    pub t: f64,
    pub x: Vec<f64>,
    pub u: f64,
}

/// Profiles of `field` at each requested time on a uniform grid of `n_x`
/// nodes per axis, preceded by the initial datum at `t = 0` and followed
/// by the exact or finite-difference reference when one is available.
/// Elliptic problems get a single profile with `t = 0`.
pub fn snapshot_profiles(
    problem: &ProblemSpec,
    field: &dyn Field,
    times: &[f64],
    n_x: usize,
) -> Result<Vec<ProfileRow>> {
    if n_x < 2 {
        return Err(contract("a profile needs at least two nodes"));
    }
    if field.input_dim() != problem.field_dim() {
        return Err(contract("field dimension does not match the problem"));
    }
    let pts = profile_points(problem.domain, n_x);
    let mut rows = Vec::new();
    let Some(horizon) = problem.horizon else {
        for x in &pts {
            rows.push(ProfileRow {
                source: "network",
                t: 0.0,
                x: x.clone(),
                u: field.value(x),
            });
        }
        if let Some(exact) = &problem.exact {
            for x in &pts {
                rows.push(ProfileRow {
                    source: "exact",
                    t: 0.0,
                    x: x.clone(),
                    u: exact.value(x),
                });
            }
        }
        return Ok(rows);
    };
    if let Some(t) = times.iter().find(|&&t| !(0.0..=horizon).contains(&t)) {
        return Err(contract(format!("snapshot time {t} outside [0, {horizon}]")));
    }
    if let Some(u0) = &problem.initial {
        for x in &pts {
            rows.push(ProfileRow {
                source: "initial",
                t: 0.0,
                x: x.clone(),
                u: u0.value(x),
            });
        }
    }
    let mut z = Vec::new();
    for &t in times {
        for x in &pts {
            z.clear();
            z.extend_from_slice(x);
            z.push(t);
            rows.push(ProfileRow {
                source: "network",
                t,
                x: x.clone(),
                u: field.value(&z),
            });
        }
    }
    if let Some(exact) = &problem.exact {
        for &t in times {
            for x in &pts {
                z.clear();
                z.extend_from_slice(x);
                z.push(t);
                rows.push(ProfileRow {
                    source: "exact",
                    t,
                    x: x.clone(),
                    u: exact.value(&z),
                });
            }
        }
    } else if problem.domain == Domain::Interval {
        let fd = fd_reference_heat(problem, 199, 400)?;
        for &t in times {
            let slice = fd.slice(fd.level_at(t));
            for x in &pts {
                rows.push(ProfileRow {
                    source: "reference",
                    t,
                    x: x.clone(),
                    u: slice.value(x),
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_profiles<W: Write>(rows: &[ProfileRow], spatial_dim: usize, mut out: W) -> Result<()> {
    let header = if spatial_dim == 1 {
        SNAPSHOT_HEADER_1D
    } else {
        SNAPSHOT_HEADER_2D
    };
    writeln!(out, "{header}")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.source, fmt_g17(r.t), row(&r.x), fmt_g17(r.u))?;
    }
    out.flush()?;
    Ok(())
}

fn write_snapshots<W: Write>(
    problem: &ProblemSpec,
    field: &dyn Field,
    times: &[f64],
    n_x: usize,
    out: W,
) -> Result<()> {
    let rows = snapshot_profiles(problem, field, times, n_x)?;
    write_profiles(&rows, problem.spatial_dim(), out)
}

/// Reads a finished run directory (its `config.txt` and `checkpoint.txt`)
/// and writes profiles of the stored network to `out`.
pub fn snapshot_from_run<W: Write>(dir: &Path, times: Option<&[f64]>, n_x: Option<usize>, out: W) -> Result<()> {
    let cfg = ExperimentConfig::parse(&fs::read_to_string(dir.join("config.txt"))?)?;
    let (problem, spec, _) = cfg.resolve()?;
    let params: MlpParams = read_checkpoint(BufReader::new(File::open(dir.join("checkpoint.txt"))?))?;
    if params.arch().input_dim() != problem.field_dim() {
        return Err(contract("checkpoint does not match the run configuration"));
    }
    let cutoff = match spec.bc_mode {
        crate::energies::BoundaryMode::HardConstraint => Some(Cutoff::new(problem.domain, problem.field_dim())?),
        crate::energies::BoundaryMode::SoftPenalty => None,
    };
    let field = NetworkField::new(&params, cutoff);
    let grid = match cfg.scheme {
        Scheme::TimeDiscrete(_) => Some(TimeGrid::with_step(problem.horizon.unwrap_or(f64::NAN), cfg.time_step)?),
        _ => None,
    };
    let times = match times {
        Some(ts) => ts.to_vec(),
        None => snapshot_times(&cfg, &problem, grid.as_ref()),
    };
    write_snapshots(&problem, &field, &times, n_x.unwrap_or(cfg.snapshot_nx), out)
}

/// Reads back a CSV written by this module: header and numeric rows
/// (non-numeric cells become `NaN`).
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = match lines.next() {
        Some(h) => h?.split(',').map(str::to_string).collect(),
        None => return Err(contract(format!("{} is empty", path.display()))),
    };
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        rows.push(line.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect());
    }
    Ok((header, rows))
}

/// One scheme's outcome in a comparison.
#[derive(Debug, Clone)]
pub struct SchemeOutcome {
    pub scheme: TimeScheme,
    pub run: RunArtifacts,
}

impl SchemeOutcome {
    pub fn verdict(&self) -> &'static str {
        if self.run.diverged() {
            "unstable"
        } else {
            "stable"
        }
    }
}

/// Runs `cfg` with both implicit and explicit Euler quotients (identical
/// seeds, points and grid) into `dir/ie` and `dir/ee`, and writes
/// `dir/compare.csv` with one row per scheme.
pub fn compare_schemes(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<SchemeOutcome>> {
    fs::create_dir_all(dir)?;
    let mut outcomes = Vec::new();
    for scheme in [TimeScheme::Implicit, TimeScheme::Explicit] {
        let mut c = cfg.clone();
        c.scheme = Scheme::TimeDiscrete(scheme);
        let sub = dir.join(scheme.label().to_ascii_lowercase());
        outcomes.push(SchemeOutcome {
            scheme,
            run: run_experiment(&c, &sub)?,
        });
    }
    let mut out = create(&dir.join("compare.csv"))?;
    writeln!(out, "{COMPARE_HEADER}")?;
    for o in &outcomes {
        let d = &o.run.last.diagnostics;
        writeln!(
            out,
            "{},{},{},{}",
            o.scheme.label().to_ascii_lowercase(),
            o.run.termination.label(),
            o.verdict(),
            row(&[
                o.run.max_sup_ratio,
                d.sup_ratio,
                d.l2h2_bar,
                d.l2l2_hat_dt,
                o.run.last.energy,
                d.error_l2
            ]),
        )?;
    }
    out.flush()?;
    Ok(outcomes)
}

/// Parameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Width,
    Points,
    TimeStep,
    Lambda,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "width" => Some(Self::Width),
            "n_points" | "points" | "n_interior" => Some(Self::Points),
            "k" | "time_step" => Some(Self::TimeStep),
            "lambda" => Some(Self::Lambda),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Width => "width",
            Self::Points => "n_points",
            Self::TimeStep => "k",
            Self::Lambda => "lambda",
        }
    }

    fn key(self) -> &'static str {
        match self {
            Self::Width => "width",
            Self::Points => "n_interior",
            Self::TimeStep => "time_step",
            Self::Lambda => "lambda",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub seed: u64,
    pub run: RunArtifacts,
}

/// One run per `(value, seed)` pair into `dir/<axis>-<value>-s<seed>`,
/// summarised in `dir/sweep.csv`.
pub fn sweep(
    cfg: &ExperimentConfig,
    axis: SweepAxis,
    values: &[f64],
    seeds: &[u64],
    dir: &Path,
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() || seeds.is_empty() {
        return Err(contract("a sweep needs at least one value and one seed"));
    }
    let mut configs = Vec::new();
    for &value in values {
        for &seed in seeds {
            let mut c = cfg.clone();
            c.seed = seed;
            let text = match axis {
                SweepAxis::Width | SweepAxis::Points => {
                    if value.fract() != 0.0 || value < 1.0 {
                        return Err(contract(format!(
                            "{} must be a positive integer, got {value}",
                            axis.label()
                        )));
                    }
                    format!("{}", value as usize)
                }
                _ => fmt_g17(value),
            };
            c.apply_override(&format!("{}={text}", axis.key()))?;
            c.resolve()?;
            let sub = dir.join(format!("{}-{}-s{seed}", axis.label(), text));
            configs.push((value, seed, c, sub));
        }
    }
    fs::create_dir_all(dir)?;
    let points = crate::par::map_indices(configs.len(), |i| {
        let (value, seed, c, sub) = &configs[i];
        Ok(SweepPoint {
            value: *value,
            seed: *seed,
            run: run_experiment(c, sub)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut out = create(&dir.join("sweep.csv"))?;
    writeln!(out, "{SWEEP_HEADER}")?;
    for p in &points {
        let d = &p.run.last.diagnostics;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            axis.label(),
            fmt_g17(p.value),
            p.seed,
            p.run.termination.label(),
            p.run.diverged(),
            row(&[
                p.run.last.energy,
                p.run.reg_j,
                d.sup_ratio,
                p.run.max_sup_ratio,
                d.h1_norm,
                d.h2_norm,
                d.error_l2,
                d.rel_error_l2,
                d.error_h1,
            ]),
        )?;
    }
    out.flush()?;
    Ok(points)
}
