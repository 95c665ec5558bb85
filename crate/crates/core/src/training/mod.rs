//! Point sets, time grids, initialisation and the optimisation loop.

mod init;
mod monitor;
mod network;
mod optimizer;
pub mod problem;
mod sampling;
mod time_grid;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use init::init_params;
pub use monitor::evaluation_grid;
pub use network::NetworkField;
pub use optimizer::{Optimizer, OptimizerState};
pub use problem::{sup_on_grid, Domain, ProblemSpec};
pub use sampling::{sample_boundary, sample_interior, sample_space_time_boundary, sample_space_time_interior};
pub use time_grid::TimeGrid;

use crate::autodiff::{loss_gradient, write_checkpoint, Activation, Architecture, MlpParams};
use crate::diagnostics::DiagnosticsReport;
use crate::energies::{
    build_energy, BoundaryMode, Cutoff, EnergySpec, PointSet, QuadratureSet, ResidualSystem, Scheme,
};
use crate::error::{ensure, PinnError, Result};
use monitor::Monitor;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub arch: Architecture,
    pub seed: u64,
    pub n_interior: usize,
    pub n_boundary: usize,
    /// Initial-condition points; 0 reuses the interior points (time-discrete
    /// schemes) or draws `n_interior` points (space-time scheme).
    pub n_initial: usize,
    pub optimizer: Optimizer,
    pub max_iters: usize,
    pub log_every: usize,
    /// Redraw all point sets every this many iterations (0 = fixed points).
    pub resample_every: usize,
    /// A run is `Diverged` once the sup-norm indicator exceeds
    /// `divergence_threshold * (1 + sup |u⁰|)`.
    pub divergence_threshold: f64,
    /// A run is `Converged` once the energy is at most this value.
    pub converge_tol: f64,
    /// Time step `k` for the time-discrete schemes.
    pub time_step: f64,
    /// Start with a zero output layer, so the initial field is zero.
    pub zero_output_layer: bool,
    /// Nodes per axis of the uniform grid the indicators are measured on.
    pub eval_nodes: usize,
    /// Write a checkpoint at every logging event.
    pub checkpoint: Option<PathBuf>,
}

impl TrainConfig {
    /// Defaults: 3 hidden tanh layers of width 32, Adam(1e-3), 256 interior
    /// points, fixed points, divergence at 10x.
    pub fn new(input_dim: usize) -> Self {
        Self {
            arch: Architecture::mlp(input_dim, 32, 3, Activation::Tanh).expect("valid default architecture"),
            seed: 0,
            n_interior: 256,
            n_boundary: 64,
            n_initial: 0,
            optimizer: Optimizer::adam(1e-3),
            max_iters: 1000,
            log_every: 100,
            resample_every: 0,
            divergence_threshold: 10.0,
            converge_tol: 0.0,
            time_step: 0.1,
            zero_output_layer: false,
            eval_nodes: 101,
            checkpoint: None,
        }
    }

    pub fn for_problem(problem: &ProblemSpec) -> Self {
        Self::new(problem.field_dim())
    }

    pub fn validate(&self, problem: &ProblemSpec, spec: &EnergySpec) -> Result<()> {
        ensure!(
            self.arch.input_dim() == problem.field_dim(),
            "network takes {} inputs, problem `{}` needs {}",
            self.arch.input_dim(),
            problem.name,
            problem.field_dim()
        );
        ensure!(self.n_interior >= 1, "n_interior must be positive");
        ensure!(self.n_boundary >= 1, "n_boundary must be positive");
        ensure!(self.log_every >= 1, "log_every must be positive");
        ensure!(self.eval_nodes >= 2, "eval_nodes must be at least 2");
        ensure!(self.optimizer.lr() > 0.0, "learning rate must be positive");
        if let Optimizer::Adam { beta1, beta2, eps, .. } = self.optimizer {
            ensure!(
                (0.0..1.0).contains(&beta1) && (0.0..1.0).contains(&beta2),
                "Adam betas must lie in [0, 1)"
            );
            ensure!(eps > 0.0, "Adam epsilon must be positive");
        }
        ensure!(self.divergence_threshold > 0.0, "divergence_threshold must be positive");
        ensure!(self.converge_tol >= 0.0, "converge_tol must be nonnegative");
        spec.validate()?;
        match spec.scheme {
            Scheme::Elliptic => ensure!(!problem.is_parabolic(), "scheme elliptic needs an elliptic problem"),
            Scheme::ExactTime | Scheme::TimeDiscrete(_) => {
                ensure!(
                    problem.is_parabolic(),
                    "scheme {} needs a parabolic problem",
                    spec.scheme.label()
                )
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxIters,
    Converged,
    Diverged,
    NonFinite,
}

impl Termination {
    pub fn label(self) -> &'static str {
        match self {
            Termination::MaxIters => "MaxIters",
            Termination::Converged => "Converged",
            Termination::Diverged => "Diverged",
            Termination::NonFinite => "NonFinite",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub diagnostics: DiagnosticsReport,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct TrainTrajectory {
    pub records: Vec<TrainRecord>,
    pub params: MlpParams,
    pub termination: Termination,
    /// Set when the boundary condition is built into the field.
    pub cutoff: Option<Cutoff>,
    /// Time grid of a time-discrete run.
    pub grid: Option<TimeGrid>,
    /// Initial `sup |u⁰|` used by the divergence flag.
    pub initial_sup: f64,
}

impl TrainTrajectory {
    /// The trained field `u_θ` (or `g · u_θ`).
    pub fn field(&self) -> NetworkField<'_> {
        NetworkField::new(&self.params, self.cutoff)
    }

    pub fn last(&self) -> &TrainRecord {
        self.records.last().expect("a trajectory has at least one record")
    }

    /// Largest sup-norm indicator over all logging events.
    pub fn max_sup_norm(&self) -> f64 {
        self.records.iter().map(|r| r.diagnostics.sup_norm).fold(0.0, f64::max)
    }
}

/// Fixed ingredients of one run: time grid, points and the assembled
/// energy, plus the random stream that draws new points.
pub struct TrainSession {
    pub problem: ProblemSpec,
    pub spec: EnergySpec,
    pub grid: Option<TimeGrid>,
    pub cutoff: Option<Cutoff>,
    pub quad: QuadratureSet,
    system: ResidualSystem,
    rng: ChaCha8Rng,
    n_interior: usize,
    n_boundary: usize,
    n_initial: usize,
}

impl TrainSession {
    pub fn new(problem: &ProblemSpec, spec: &EnergySpec, config: &TrainConfig) -> Result<Self> {
        config.validate(problem, spec)?;
        let grid = match spec.scheme {
            Scheme::TimeDiscrete(_) => {
                let horizon = problem.horizon.expect("validated parabolic");
                Some(TimeGrid::with_step(horizon, config.time_step)?)
            }
            _ => None,
        };
        let cutoff = match spec.bc_mode {
            BoundaryMode::HardConstraint => Some(Cutoff::new(problem.domain, problem.field_dim())?),
            BoundaryMode::SoftPenalty => None,
        };
        // stream 0 initialises the network, stream 1 draws points
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(1);
        let mut s = Self {
            problem: problem.clone(),
            spec: *spec,
            grid,
            cutoff,
            quad: QuadratureSet {
                interior: PointSet::empty(0),
                boundary: PointSet::empty(0),
                initial: PointSet::empty(0),
            },
            system: ResidualSystem::new(problem.field_dim()),
            rng,
            n_interior: config.n_interior,
            n_boundary: config.n_boundary,
            n_initial: config.n_initial,
        };
        s.resample()?;
        Ok(s)
    }

    /// Draws new point sets and reassembles the energy.
    pub fn resample(&mut self) -> Result<()> {
        let domain = self.problem.domain;
        let rng = &mut self.rng;
        let quad = match (self.spec.scheme, self.problem.horizon) {
            (Scheme::ExactTime, Some(horizon)) => {
                let interior = sample_space_time_interior(domain, horizon, self.n_interior, rng)?;
                let boundary = sample_space_time_boundary(domain, horizon, self.n_boundary, rng)?;
                let n0 = if self.n_initial == 0 {
                    self.n_interior
                } else {
                    self.n_initial
                };
                let initial = sample_interior(domain, n0, rng)?;
                QuadratureSet {
                    interior,
                    boundary,
                    initial,
                }
            }
            _ => {
                let interior = sample_interior(domain, self.n_interior, rng)?;
                let boundary = sample_boundary(domain, self.n_boundary, rng)?;
                let initial = match self.problem.horizon {
                    None => PointSet::empty(domain.spatial_dim()),
                    Some(_) if self.n_initial == 0 => interior.clone(),
                    Some(_) => sample_interior(domain, self.n_initial, rng)?,
                };
                QuadratureSet {
                    interior,
                    boundary,
                    initial,
                }
            }
        };
        let system = build_energy(&self.problem, self.grid.as_ref(), &quad, &self.spec)?;
        self.system = match &self.cutoff {
            Some(c) => system.with_cutoff(c),
            None => system,
        };
        self.quad = quad;
        Ok(())
    }

    /// The assembled energy as a function of the raw network.
    pub fn system(&self) -> &ResidualSystem {
        &self.system
    }

    pub fn initial_params(&self, config: &TrainConfig) -> MlpParams {
        let mut params = init_params(&config.arch, config.seed);
        if config.zero_output_layer {
            let last = config.arch.num_layers() - 1;
            params.weight_mut(last).fill(0.0);
            params.bias_mut(last).fill(0.0);
        }
        params
    }
}

/// Wall-clock milliseconds since start; `NaN` where no clock exists
/// (`wasm32-unknown-unknown`).
struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed_ms(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.start.elapsed().as_secs_f64() * 1e3;
        #[cfg(target_arch = "wasm32")]
        return f64::NAN;
    }
}

/// Minimises the configured energy over the network parameters.
pub fn train(problem: &ProblemSpec, spec: &EnergySpec, config: &TrainConfig) -> Result<TrainTrajectory> {
    train_with(problem, spec, config, |_| {})
}

/// As [`train`], calling `observer` with every logged record.
pub fn train_with(
    problem: &ProblemSpec,
    spec: &EnergySpec,
    config: &TrainConfig,
    mut observer: impl FnMut(&TrainRecord),
) -> Result<TrainTrajectory> {
    let mut session = TrainSession::new(problem, spec, config)?;
    let monitor = Monitor::new(problem, session.grid.as_ref(), config.eval_nodes)?;
    let mut params = session.initial_params(config);
    let mut opt = config.optimizer.state(params.total_dim());
    let limit = config.divergence_threshold * (1.0 + monitor.initial_sup());
    let start = Stopwatch::start();
    let mut records = Vec::new();
    let termination = 'run: {
        for it in 0..=config.max_iters {
            if config.resample_every > 0 && it > 0 && it % config.resample_every == 0 {
                session.resample()?;
            }
            let (energy, grad) = match loss_gradient(&params, session.system()) {
                Ok(v) => v,
                Err(PinnError::NonFiniteEnergy { .. }) => {
                    let rec = TrainRecord {
                        iteration: it,
                        energy: f64::NAN,
                        grad_norm: f64::NAN,
                        diagnostics: DiagnosticsReport::empty(),
                        wall_ms: start.elapsed_ms(),
                    };
                    observer(&rec);
                    records.push(rec);
                    break 'run Termination::NonFinite;
                }
                Err(e) => return Err(e),
            };
            let converged = energy <= config.converge_tol;
            let last = it == config.max_iters;
            if it % config.log_every == 0 || converged || last {
                let field = NetworkField::new(&params, session.cutoff);
                let diagnostics = monitor.measure(&field)?;
                let rec = TrainRecord {
                    iteration: it,
                    energy,
                    grad_norm: grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
                    diagnostics,
                    wall_ms: start.elapsed_ms(),
                };
                observer(&rec);
                records.push(rec);
                if let Some(path) = &config.checkpoint {
                    write_checkpoint(&params, std::io::BufWriter::new(std::fs::File::create(path)?))?;
                }
                if !diagnostics.sup_norm.is_finite() {
                    break 'run Termination::NonFinite;
                }
                if diagnostics.sup_norm > limit {
                    break 'run Termination::Diverged;
                }
            }
            if converged {
                break 'run Termination::Converged;
            }
            if last {
                break 'run Termination::MaxIters;
            }
            opt.step(params.as_mut_slice(), &grad);
        }
        unreachable!("the loop ends at max_iters")
    };
    Ok(TrainTrajectory {
        records,
        params,
        termination,
        cutoff: session.cutoff,
        grid: session.grid,
        initial_sup: monitor.initial_sup(),
    })
}
