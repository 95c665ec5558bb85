use crate::error::{ensure, Result};
use crate::operators::TimeScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Elliptic,
    /// Space-time residual with the exact time derivative.
    ExactTime,
    /// Time-discrete residual with a backward or forward Euler quotient.
    TimeDiscrete(TimeScheme),
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Elliptic => "elliptic",
            Scheme::ExactTime => "exact",
            Scheme::TimeDiscrete(s) => s.label(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "elliptic" => Some(Scheme::Elliptic),
            "exact" | "exacttime" | "exact-time" => Some(Scheme::ExactTime),
            "ie" | "implicit" => Some(Scheme::TimeDiscrete(TimeScheme::Implicit)),
            "ee" | "explicit" => Some(Scheme::TimeDiscrete(TimeScheme::Explicit)),
            _ => None,
        }
    }
}

/// Norm used for the initial-condition misfit `v(·, 0) - u⁰`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialNorm {
    L2,
    H1Semi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMode {
    /// `τ Σ w_s v(s)²` penalty.
    SoftPenalty,
    /// Network multiplied by a cutoff vanishing on `∂Ω`; no penalty term.
    HardConstraint,
}

/// Weights and switches of an assembled energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySpec {
    /// Boundary penalty weight `τ`.
    pub tau: f64,
    /// Initial-condition weight `μ`.
    pub mu: f64,
    pub initial_norm: InitialNorm,
    /// Regularisation weight `λ` of the `H¹` seminorm term.
    pub lambda: f64,
    pub scheme: Scheme,
    pub bc_mode: BoundaryMode,
}

impl EnergySpec {
    pub fn elliptic() -> Self {
        Self {
            tau: 1.0,
            mu: 1.0,
            initial_norm: InitialNorm::H1Semi,
            lambda: 0.0,
            scheme: Scheme::Elliptic,
            bc_mode: BoundaryMode::HardConstraint,
        }
    }

    pub fn exact_time() -> Self {
        Self {
            scheme: Scheme::ExactTime,
            ..Self::elliptic()
        }
    }

    pub fn time_discrete(scheme: TimeScheme) -> Self {
        Self {
            scheme: Scheme::TimeDiscrete(scheme),
            ..Self::elliptic()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau", self.tau), ("mu", self.mu), ("lambda", self.lambda)] {
            ensure!(v >= 0.0 && v.is_finite(), "{name} must be finite and >= 0, got {v}");
        }
        Ok(())
    }

    /// Effective boundary weight: zero under hard constraints.
    pub fn boundary_weight(&self) -> f64 {
        match self.bc_mode {
            BoundaryMode::SoftPenalty => self.tau,
            BoundaryMode::HardConstraint => 0.0,
        }
    }
}
