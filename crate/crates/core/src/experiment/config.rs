use std::fmt::Write as _;

use crate::autodiff::{Activation, Architecture};
use crate::energies::{BoundaryMode, EnergySpec, InitialNorm, Scheme};
use crate::error::{PinnError, Result};
use crate::numfmt::fmt_g17;
use crate::training::{Optimizer, ProblemSpec, TrainConfig};

/// Times at which solution profiles are written.
#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotTimes {
    /// Every node of the training time grid.
    Levels,
    List(Vec<f64>),
}

/// A complete, flat run description. Every field has a `key = value`
/// spelling; see [`ExperimentConfig::set`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub problem: String,
    pub horizon: Option<f64>,
    pub scheme: Scheme,
    pub time_step: f64,
    pub tau: f64,
    pub mu: f64,
    pub lambda: f64,
    pub initial_norm: InitialNorm,
    pub bc_mode: BoundaryMode,
    pub activation: Activation,
    pub width: usize,
    pub depth: usize,
    pub seed: u64,
    pub n_interior: usize,
    pub n_boundary: usize,
    pub n_initial: usize,
    pub optimizer: String,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub max_iters: usize,
    pub log_every: usize,
    pub resample_every: usize,
    pub divergence_threshold: f64,
    pub converge_tol: f64,
    pub zero_output_layer: bool,
    pub eval_nodes: usize,
    pub snapshot_times: SnapshotTimes,
    pub snapshot_nx: usize,
    pub checkpoint: bool,
}

/// Names accepted by [`ExperimentConfig::preset`].
pub const PRESETS: &[&str] = &[
    "elliptic-sin",
    "fig1-left",
    "fig1-right",
    "fig1-ie",
    "fig2-ee",
    "fig2-ie",
    "fig3-ee",
    "fig3-ie",
    "fig4-ee",
    "fig4-ie",
];

/// Keys in the order [`ExperimentConfig::render`] writes them.
pub const KEYS: &[&str] = &[
    "preset",
    "problem",
    "horizon",
    "scheme",
    "time_step",
    "tau",
    "mu",
    "lambda",
    "initial_norm",
    "bc",
    "activation",
    "width",
    "depth",
    "seed",
    "n_interior",
    "n_boundary",
    "n_initial",
    "optimizer",
    "lr",
    "beta1",
    "beta2",
    "eps",
    "max_iters",
    "log_every",
    "resample_every",
    "divergence_threshold",
    "converge_tol",
    "zero_output_layer",
    "eval_nodes",
    "snapshot_times",
    "snapshot_nx",
    "checkpoint",
];

fn parse_num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse `{v}` as a number"))
}

fn parse_positive(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = parse_num(v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a positive number, got `{v}`"))
    }
}

fn parse_nonneg(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = parse_num(v)?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a nonnegative number, got `{v}`"))
    }
}

fn parse_count(v: &str) -> std::result::Result<usize, String> {
    let n: usize = parse_num(v)?;
    if n >= 1 {
        Ok(n)
    } else {
        Err("expected a positive integer".into())
    }
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            preset: None,
            problem: "elliptic-sin".into(),
            horizon: None,
            scheme: Scheme::Elliptic,
            time_step: 0.1,
            tau: 1.0,
            mu: 1.0,
            lambda: 0.0,
            initial_norm: InitialNorm::H1Semi,
            bc_mode: BoundaryMode::HardConstraint,
            activation: Activation::Tanh,
            width: 32,
            depth: 3,
            seed: 0,
            n_interior: 256,
            n_boundary: 64,
            n_initial: 0,
            optimizer: "adam".into(),
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            max_iters: 1000,
            log_every: 100,
            resample_every: 0,
            divergence_threshold: 10.0,
            converge_tol: 0.0,
            zero_output_layer: false,
            eval_nodes: 101,
            snapshot_times: SnapshotTimes::Levels,
            snapshot_nx: 101,
            checkpoint: true,
        }
    }
}

impl ExperimentConfig {
    /// A named preset. The `fig*` presets pair a scheme, a time step and a
    /// point count on the heat problem; `elliptic-sin` trains on
    /// `-u'' = π² sin(πx)`.
    pub fn preset(name: &str) -> Option<Self> {
        let base = Self::default();
        let heat = |problem: &str, scheme: &str, k: f64, points: usize, horizon: f64, iters: usize| Self {
            preset: Some(name.to_string()),
            problem: problem.into(),
            horizon: Some(horizon),
            scheme: Scheme::parse(scheme).expect("known scheme"),
            time_step: k,
            mu: 1.0,
            width: 20,
            depth: 2,
            n_interior: points,
            n_boundary: 2,
            lr: 3e-3,
            max_iters: iters,
            log_every: 100,
            snapshot_times: SnapshotTimes::Levels,
            ..Self::default()
        };
        let c = match name {
            "elliptic-sin" => Self {
                preset: Some(name.into()),
                width: 32,
                depth: 2,
                n_interior: 256,
                max_iters: 20000,
                log_every: 1000,
                ..base
            },
            "fig1-left" => heat("heat-sin", "ee", 0.4, 64, 1.2, 15000),
            "fig1-ie" => heat("heat-sin", "ie", 0.4, 64, 1.2, 15000),
            "fig1-right" => heat("heat-sin", "ee", 0.01, 16, 0.5, 3000),
            "fig2-ee" => heat("heat-bump", "ee", 0.2, 16, 1.0, 8000),
            "fig2-ie" => heat("heat-bump", "ie", 0.2, 16, 1.0, 8000),
            "fig3-ee" => heat("heat-bump", "ee", 0.01, 16, 0.2, 3000),
            "fig3-ie" => heat("heat-bump", "ie", 0.01, 16, 0.2, 3000),
            "fig4-ee" => heat("heat-bump", "ee", 0.01, 100, 0.2, 3000),
            "fig4-ie" => heat("heat-bump", "ie", 0.01, 100, 0.2, 3000),
            _ => return None,
        };
        Some(c)
    }

    /// Sets one key. On failure returns a message (without position).
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key {
            "preset" => {
                let p = Self::preset(v).ok_or_else(|| format!("unknown preset `{v}`"))?;
                *self = p;
            }
            "problem" => {
                ProblemSpec::bundled(v).map_err(|_| {
                    format!(
                        "unknown problem `{v}` (known: {})",
                        ProblemSpec::bundled_names().join(", ")
                    )
                })?;
                self.problem = v.into();
            }
            "horizon" => {
                self.horizon = match v {
                    "" | "default" => None,
                    _ => Some(parse_positive(v)?),
                }
            }
            "scheme" => self.scheme = Scheme::parse(v).ok_or_else(|| format!("unknown scheme `{v}`"))?,
            "time_step" | "k" => self.time_step = parse_positive(v)?,
            "tau" => self.tau = parse_nonneg(v)?,
            "mu" => self.mu = parse_nonneg(v)?,
            "lambda" => self.lambda = parse_nonneg(v)?,
            "initial_norm" => {
                self.initial_norm = match v.to_ascii_lowercase().as_str() {
                    "l2" => InitialNorm::L2,
                    "h1" | "h1semi" => InitialNorm::H1Semi,
                    _ => return Err(format!("initial_norm must be l2 or h1semi, got `{v}`")),
                }
            }
            "bc" => {
                self.bc_mode = match v.to_ascii_lowercase().as_str() {
                    "hard" => BoundaryMode::HardConstraint,
                    "soft" => BoundaryMode::SoftPenalty,
                    _ => return Err(format!("bc must be hard or soft, got `{v}`")),
                }
            }
            "activation" => {
                self.activation = Activation::parse(v).ok_or_else(|| format!("unknown activation `{v}`"))?
            }
            "width" => self.width = parse_count(v)?,
            "depth" => self.depth = parse_count(v)?,
            "seed" => self.seed = parse_num(v)?,
            "n_interior" | "points" => self.n_interior = parse_count(v)?,
            "n_boundary" => self.n_boundary = parse_count(v)?,
            "n_initial" => self.n_initial = parse_num(v)?,
            "optimizer" => match v.to_ascii_lowercase().as_str() {
                o @ ("adam" | "gd") => self.optimizer = o.into(),
                _ => return Err(format!("optimizer must be adam or gd, got `{v}`")),
            },
            "lr" => self.lr = parse_positive(v)?,
            "beta1" | "beta2" => {
                let b: f64 = parse_num(v)?;
                if !(0.0..1.0).contains(&b) {
                    return Err(format!("{key} must lie in [0, 1), got `{v}`"));
                }
                if key == "beta1" {
                    self.beta1 = b
                } else {
                    self.beta2 = b
                }
            }
            "eps" => self.eps = parse_positive(v)?,
            "max_iters" => self.max_iters = parse_num(v)?,
            "log_every" => self.log_every = parse_count(v)?,
            "resample_every" => self.resample_every = parse_num(v)?,
            "divergence_threshold" => self.divergence_threshold = parse_positive(v)?,
            "converge_tol" => self.converge_tol = parse_nonneg(v)?,
            "zero_output_layer" => self.zero_output_layer = parse_bool(v)?,
            "eval_nodes" => {
                self.eval_nodes = parse_num(v)?;
                if self.eval_nodes < 2 {
                    return Err("eval_nodes must be at least 2".into());
                }
            }
            "snapshot_times" => {
                self.snapshot_times = if v == "levels" {
                    SnapshotTimes::Levels
                } else {
                    let times = v
                        .split(',')
                        .map(|s| parse_nonneg(s.trim()))
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    if times.is_empty() {
                        return Err("snapshot_times is empty".into());
                    }
                    SnapshotTimes::List(times)
                }
            }
            "snapshot_nx" => {
                self.snapshot_nx = parse_num(v)?;
                if self.snapshot_nx < 2 {
                    return Err("snapshot_nx must be at least 2".into());
                }
            }
            "checkpoint" => self.checkpoint = parse_bool(v)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and `#`
    /// comments are ignored; `preset` must precede every other key.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen_other = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |key: &str, message: String| PinnError::Config {
                line: i + 1,
                key: key.to_string(),
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("", format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if key == "preset" && seen_other {
                return Err(err(key, "`preset` must come before all other keys".into()));
            }
            seen_other |= key != "preset";
            self.set(key, value).map_err(|m| err(key, m))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Applies a command-line `key=value` override (reported as line 0).
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let err = |key: &str, message: String| PinnError::Config {
            line: 0,
            key: key.to_string(),
            message,
        };
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| err("", format!("override must be key=value, got `{kv}`")))?;
        self.set(key.trim(), value).map_err(|m| err(key.trim(), m))
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let p = ProblemSpec::bundled(&self.problem)?;
        Ok(match self.horizon {
            Some(t) if p.is_parabolic() => p.with_horizon(t),
            _ => p,
        })
    }

    pub fn energy_spec(&self) -> EnergySpec {
        EnergySpec {
            tau: self.tau,
            mu: self.mu,
            initial_norm: self.initial_norm,
            lambda: self.lambda,
            scheme: self.scheme,
            bc_mode: self.bc_mode,
        }
    }

    pub fn train_config(&self, input_dim: usize) -> Result<TrainConfig> {
        let optimizer = match self.optimizer.as_str() {
            "gd" => Optimizer::GradientDescent { lr: self.lr },
            _ => Optimizer::Adam {
                lr: self.lr,
                beta1: self.beta1,
                beta2: self.beta2,
                eps: self.eps,
            },
        };
        Ok(TrainConfig {
            arch: Architecture::mlp(input_dim, self.width, self.depth, self.activation)?,
            seed: self.seed,
            n_interior: self.n_interior,
            n_boundary: self.n_boundary,
            n_initial: self.n_initial,
            optimizer,
            max_iters: self.max_iters,
            log_every: self.log_every,
            resample_every: self.resample_every,
            divergence_threshold: self.divergence_threshold,
            converge_tol: self.converge_tol,
            time_step: self.time_step,
            zero_output_layer: self.zero_output_layer,
            eval_nodes: self.eval_nodes,
            checkpoint: None,
        })
    }

    /// Resolves and validates the run before any computation.
    pub fn resolve(&self) -> Result<(ProblemSpec, EnergySpec, TrainConfig)> {
        let problem = self.problem_spec()?;
        let spec = self.energy_spec();
        let train = self.train_config(problem.field_dim())?;
        train.validate(&problem, &spec)?;
        if let Scheme::TimeDiscrete(_) = spec.scheme {
            crate::training::TimeGrid::with_step(problem.horizon.unwrap_or(f64::NAN), self.time_step)?;
        }
        Ok((problem, spec, train))
    }

    fn value_of(&self, key: &str) -> String {
        let f = |x: f64| fmt_g17(x);
        match key {
            "preset" => self.preset.clone().unwrap_or_default(),
            "problem" => self.problem.clone(),
            "horizon" => self.horizon.map(f).unwrap_or_else(|| "default".into()),
            "scheme" => self.scheme.label().to_ascii_lowercase(),
            "time_step" => f(self.time_step),
            "tau" => f(self.tau),
            "mu" => f(self.mu),
            "lambda" => f(self.lambda),
            "initial_norm" => match self.initial_norm {
                InitialNorm::L2 => "l2".into(),
                InitialNorm::H1Semi => "h1semi".into(),
            },
            "bc" => match self.bc_mode {
                BoundaryMode::HardConstraint => "hard".into(),
                BoundaryMode::SoftPenalty => "soft".into(),
            },
            "activation" => self.activation.to_string(),
            "width" => self.width.to_string(),
            "depth" => self.depth.to_string(),
            "seed" => self.seed.to_string(),
            "n_interior" => self.n_interior.to_string(),
            "n_boundary" => self.n_boundary.to_string(),
            "n_initial" => self.n_initial.to_string(),
            "optimizer" => self.optimizer.clone(),
            "lr" => f(self.lr),
            "beta1" => f(self.beta1),
            "beta2" => f(self.beta2),
            "eps" => f(self.eps),
            "max_iters" => self.max_iters.to_string(),
            "log_every" => self.log_every.to_string(),
            "resample_every" => self.resample_every.to_string(),
            "divergence_threshold" => f(self.divergence_threshold),
            "converge_tol" => f(self.converge_tol),
            "zero_output_layer" => self.zero_output_layer.to_string(),
            "eval_nodes" => self.eval_nodes.to_string(),
            "snapshot_times" => match &self.snapshot_times {
                SnapshotTimes::Levels => "levels".into(),
                SnapshotTimes::List(ts) => ts.iter().map(|&t| f(t)).collect::<Vec<_>>().join(","),
            },
            "snapshot_nx" => self.snapshot_nx.to_string(),
            "checkpoint" => self.checkpoint.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// The configuration as a `key = value` file that parses back to an
    /// equal configuration.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            if *key == "preset" && self.preset.is_none() {
                continue;
            }
            let _ = writeln!(s, "{key} = {}", self.value_of(key));
        }
        s
    }

    /// Short identifier used for output directories.
    pub fn run_name(&self) -> String {
        match &self.preset {
            Some(p) => p.clone(),
            None => format!("{}-{}", self.problem, self.scheme.label().to_ascii_lowercase()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves() {
        for name in PRESETS {
            let c = ExperimentConfig::preset(name).unwrap();
            c.resolve().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn render_round_trips() {
        for name in PRESETS {
            let c = ExperimentConfig::preset(name).unwrap();
            let mut back = ExperimentConfig::default();
            back.apply_text(&c.render()).unwrap();
            assert_eq!(back, c, "{name}");
        }
        let mut c = ExperimentConfig::default();
        c.set("snapshot_times", "0, 0.2,0.4").unwrap();
        c.set("horizon", "1.5").unwrap();
        assert_eq!(ExperimentConfig::parse(&c.render()).unwrap(), c);
    }

    #[test]
    fn errors_carry_line_and_key() {
        let text = "problem = heat-sin\n\n# comment\nlr = fast\n";
        match ExperimentConfig::parse(text) {
            Err(PinnError::Config { line, key, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(key, "lr");
            }
            other => panic!("{other:?}"),
        }
        match ExperimentConfig::parse("width = 4\nbogus = 1") {
            Err(PinnError::Config { line: 2, key, .. }) => assert_eq!(key, "bogus"),
            other => panic!("{other:?}"),
        }
        match ExperimentConfig::parse("no equals sign") {
            Err(PinnError::Config { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(ExperimentConfig::parse("width = 4\npreset = fig1-left").is_err());
    }

    #[test]
    fn preset_then_overrides() {
        let c = ExperimentConfig::parse("preset = fig1-left\nseed = 7 # trailing comment\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.time_step, 0.4);
        let mut c = c;
        c.apply_override("n_interior=32").unwrap();
        assert_eq!(c.n_interior, 32);
        assert!(matches!(
            c.apply_override("n_interior"),
            Err(PinnError::Config { line: 0, .. })
        ));
    }

    #[test]
    fn inconsistent_configs_are_rejected_before_training() {
        let mut c = ExperimentConfig::preset("fig1-left").unwrap();
        c.time_step = 0.35;
        assert!(c.resolve().is_err());
        let mut c = ExperimentConfig::preset("elliptic-sin").unwrap();
        c.scheme = Scheme::parse("ee").unwrap();
        assert!(c.resolve().is_err());
    }
}
