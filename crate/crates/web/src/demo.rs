//! Plain-Rust side of the browser demo. Every operation returns a JSON
//! value so the page can plot it directly; the wasm exports in `lib.rs`
//! only stringify.

use pinnlab_core::diagnostics::{fd_reference_heat, mr_identity_residual, DiscreteOperator};
use pinnlab_core::experiment::ExperimentConfig;
use pinnlab_core::operators::Field;
use pinnlab_core::training::{train, ProblemSpec, TimeGrid};
use pinnlab_core::{PinnError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Nodes per profile.
const PROFILE_NODES: usize = 101;

/// One time-discrete training run on a bundled 1-D heat problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRequest {
    /// `heat-sin` or `heat-bump`.
    pub problem: String,
    /// `ee` or `ie`.
    pub scheme: String,
    pub time_step: f64,
    pub n_points: usize,
    pub horizon: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for TrainRequest {
    fn default() -> Self {
        Self {
            problem: "heat-sin".into(),
            scheme: "ee".into(),
            time_step: 0.4,
            n_points: 64,
            horizon: 1.2,
            iterations: 2000,
            seed: 0,
        }
    }
}

impl TrainRequest {
    fn config(&self) -> Result<ExperimentConfig> {
        if !matches!(self.problem.as_str(), "heat-sin" | "heat-bump") {
            return Err(PinnError::Contract(format!("unsupported problem `{}`", self.problem)));
        }
        let mut cfg = ExperimentConfig::preset("fig1-left").expect("bundled preset");
        cfg.preset = None;
        let values = [
            ("problem", self.problem.clone()),
            ("scheme", self.scheme.clone()),
            ("time_step", self.time_step.to_string()),
            ("n_interior", self.n_points.to_string()),
            ("horizon", self.horizon.to_string()),
            ("max_iters", self.iterations.to_string()),
            ("seed", self.seed.to_string()),
            ("log_every", (self.iterations / 50).max(1).to_string()),
        ];
        for (key, value) in values {
            cfg.set(key, &value).map_err(|message| PinnError::Config {
                line: 0,
                key: key.into(),
                message,
            })?;
        }
        Ok(cfg)
    }
}

fn nodes() -> Vec<f64> {
    (0..PROFILE_NODES)
        .map(|i| i as f64 / (PROFILE_NODES - 1) as f64)
        .collect()
}

fn profile(field: &dyn Field, xs: &[f64], t: Option<f64>) -> Vec<f64> {
    xs.iter()
        .map(|&x| match t {
            Some(t) => field.value(&[x, t]),
            None => field.value(&[x]),
        })
        .collect()
}

/// FD profiles of `problem` at `times` (Crank–Nicolson, 199 interior
/// nodes, 400 steps), or the exact solution when the problem has one.
fn reference_profiles(problem: &ProblemSpec, xs: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>> {
    if let Some(exact) = &problem.exact {
        return Ok(times.iter().map(|&t| profile(exact, xs, Some(t))).collect());
    }
    let fd = fd_reference_heat(problem, 199, 400)?;
    Ok(times
        .iter()
        .map(|&t| profile(&fd.slice(fd.level_at(t)), xs, None))
        .collect())
}

/// Trains the request and returns
/// `{termination, max_sup_ratio, limit_ratio, history, times, x, network, reference}`
/// with one network and one reference profile per time level.
pub fn train_profiles(req: &TrainRequest) -> Result<Value> {
    let (problem, spec, train_cfg) = req.config()?.resolve()?;
    let traj = train(&problem, &spec, &train_cfg)?;
    let grid = traj.grid.as_ref().expect("time-discrete run has a grid");
    let times = grid.nodes().to_vec();
    let xs = nodes();
    let field = traj.field();
    let network: Vec<Vec<f64>> = times.iter().map(|&t| profile(&field, &xs, Some(t))).collect();
    let reference = reference_profiles(&problem, &xs, &times)?;
    let max_sup_ratio = traj
        .records
        .iter()
        .map(|r| r.diagnostics.sup_ratio)
        .fold(f64::NAN, f64::max);
    let history = json!({
        "iteration": traj.records.iter().map(|r| r.iteration).collect::<Vec<_>>(),
        "energy": traj.records.iter().map(|r| r.energy).collect::<Vec<_>>(),
        "sup_ratio": traj.records.iter().map(|r| r.diagnostics.sup_ratio).collect::<Vec<_>>(),
    });
    Ok(json!({
        "termination": traj.termination.label(),
        "max_sup_ratio": max_sup_ratio,
        "limit_ratio": train_cfg.divergence_threshold * (1.0 + traj.initial_sup) / traj.initial_sup,
        "history": history,
        "times": times,
        "x": xs,
        "network": network,
        "reference": reference,
    }))
}

/// Reference solution of a bundled heat problem on `0..=horizon` at
/// `levels + 1` uniform times: `{times, x, u}`.
pub fn reference(problem: &str, horizon: f64, levels: usize) -> Result<Value> {
    if levels == 0 {
        return Err(PinnError::Contract("need at least one level".into()));
    }
    let problem = ProblemSpec::bundled(problem)?;
    if !problem.is_parabolic() || problem.spatial_dim() != 1 {
        return Err(PinnError::Contract(format!(
            "`{}` is not a 1-D heat problem",
            problem.name
        )));
    }
    let problem = problem.with_horizon(horizon);
    let times: Vec<f64> = (0..=levels).map(|n| horizon * n as f64 / levels as f64).collect();
    let xs = nodes();
    let u = reference_profiles(&problem, &xs, &times)?;
    Ok(json!({ "times": times, "x": xs, "u": u }))
}

/// The discrete maximal-regularity identity for random nodal vectors
/// (entries uniform in `[-1, 1]`) and the 1-D Dirichlet Laplacian on `m`
/// interior nodes: `{identity_residual, slack, combined}`.
pub fn max_reg(m: usize, steps: usize, horizon: f64, seed: u64) -> Result<Value> {
    if m == 0 {
        return Err(PinnError::Contract("need at least one interior node".into()));
    }
    let grid = TimeGrid::uniform(horizon, steps)?;
    let op = DiscreteOperator::dirichlet_laplacian_1d(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels: Vec<Vec<f64>> = (0..=steps)
        .map(|_| (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let check = mr_identity_residual(&levels, &grid, &op)?;
    Ok(json!({
        "identity_residual": check.identity_residual,
        "slack": check.slack,
        "combined": check.combined,
    }))
}
