use std::f64::consts::PI;

use crate::autodiff::Jet2;
use crate::error::{contract, Result};
use crate::operators::{AnalyticField, EllipticOperator, Field, ScalarFn};

/// Spatial domains. All live inside the unit square/interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `(0, 1)`.
    Interval,
    /// `(0, 1)^2`.
    UnitSquare,
    /// `(0, 1)^2` minus the closed upper-right quadrant `[1/2, 1]^2`.
    LShape,
}

impl Domain {
    pub fn spatial_dim(self) -> usize {
        match self {
            Domain::Interval => 1,
            Domain::UnitSquare | Domain::LShape => 2,
        }
    }

    /// `|Ω|`.
    pub fn measure(self) -> f64 {
        match self {
            Domain::Interval | Domain::UnitSquare => 1.0,
            Domain::LShape => 0.75,
        }
    }

    /// `|∂Ω|` (the interval boundary counts its two endpoints).
    pub fn boundary_measure(self) -> f64 {
        match self {
            Domain::Interval => 2.0,
            Domain::UnitSquare => 4.0,
            Domain::LShape => 3.0,
        }
    }

    /// Open-set membership.
    pub fn contains(self, x: &[f64]) -> bool {
        let inside = |v: f64| v > 0.0 && v < 1.0;
        match self {
            Domain::Interval => inside(x[0]),
            Domain::UnitSquare => inside(x[0]) && inside(x[1]),
            Domain::LShape => inside(x[0]) && inside(x[1]) && (x[0] < 0.5 || x[1] < 0.5),
        }
    }

    pub fn on_boundary(self, x: &[f64]) -> bool {
        const EPS: f64 = 1e-12;
        let in_closed = |v: f64| (-EPS..=1.0 + EPS).contains(&v);
        let near = |a: f64, b: f64| (a - b).abs() <= EPS;
        match self {
            Domain::Interval => near(x[0], 0.0) || near(x[0], 1.0),
            Domain::UnitSquare => {
                in_closed(x[0])
                    && in_closed(x[1])
                    && (near(x[0], 0.0) || near(x[0], 1.0) || near(x[1], 0.0) || near(x[1], 1.0))
            }
            Domain::LShape => {
                let (px, py) = (x[0], x[1]);
                if !(in_closed(px) && in_closed(py)) {
                    return false;
                }
                let outer = near(px, 0.0)
                    || near(py, 0.0)
                    || (near(px, 1.0) && py <= 0.5 + EPS)
                    || (near(py, 1.0) && px <= 0.5 + EPS);
                let inner = (near(px, 0.5) && py >= 0.5 - EPS) || (near(py, 0.5) && px >= 0.5 - EPS);
                outer || inner
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Interval => "interval",
            Domain::UnitSquare => "square",
            Domain::LShape => "lshape",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interval" => Some(Domain::Interval),
            "square" | "unitsquare" => Some(Domain::UnitSquare),
            "lshape" | "l-shape" => Some(Domain::LShape),
            _ => None,
        }
    }
}

/// A linear model problem with homogeneous Dirichlet boundary conditions:
/// `L u = f` in `Ω`, or `u_t + L u = f` in `Ω × (0, T]` with `u(0) = u⁰`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Domain,
    /// `Some(T)` for parabolic problems.
    pub horizon: Option<f64>,
    pub operator: EllipticOperator,
    /// Source `f(x)` or `f(x, t)`.
    pub source: ScalarFn,
    /// Initial datum `u⁰(x)` (parabolic only).
    pub initial: Option<AnalyticField>,
    /// Exact solution over `x` or `(x, t)`, when known.
    pub exact: Option<AnalyticField>,
}

impl ProblemSpec {
    pub fn is_parabolic(&self) -> bool {
        self.horizon.is_some()
    }

    pub fn spatial_dim(&self) -> usize {
        self.domain.spatial_dim()
    }

    /// Input dimension of fields solving this problem.
    pub fn field_dim(&self) -> usize {
        self.spatial_dim() + usize::from(self.is_parabolic())
    }

    /// Returns a copy with a different horizon (parabolic problems only).
    pub fn with_horizon(mut self, horizon: f64) -> Self {
        assert!(self.is_parabolic(), "horizon only applies to parabolic problems");
        self.horizon = Some(horizon);
        self
    }

    /// Bundled problems by name.
    pub fn bundled(name: &str) -> Result<Self> {
        Ok(match name {
            "elliptic-sin" => elliptic_sin_1d(),
            "elliptic-sin2d" => elliptic_sin_2d(),
            "elliptic-aniso" => elliptic_anisotropic(),
            "lshape-poisson" => lshape_poisson(),
            "heat-sin" => heat_sin(2.0),
            "heat-bump" => heat_bump(2.0),
            "heat-forced" => heat_forced(1.0),
            other => return Err(contract(format!("unknown problem `{other}`"))),
        })
    }

    pub fn bundled_names() -> &'static [&'static str] {
        &[
            "elliptic-sin",
            "elliptic-sin2d",
            "elliptic-aniso",
            "lshape-poisson",
            "heat-sin",
            "heat-bump",
            "heat-forced",
        ]
    }

    /// Largest `|u⁰|` on a fine uniform grid of the domain (0 for elliptic
    /// problems).
    pub fn initial_sup(&self) -> f64 {
        let Some(u0) = &self.initial else {
            return 0.0;
        };
        sup_on_grid(self.domain, 401, |x| u0.value(x))
    }
}

/// `max |g|` over a uniform tensor grid (`n` nodes per axis) restricted to
/// the closed domain.
pub fn sup_on_grid(domain: Domain, n: usize, g: impl Fn(&[f64]) -> f64) -> f64 {
    let h = 1.0 / (n - 1) as f64;
    let mut best: f64 = 0.0;
    match domain.spatial_dim() {
        1 => {
            for i in 0..n {
                best = best.max(g(&[i as f64 * h]).abs());
            }
        }
        _ => {
            for i in 0..n {
                for j in 0..n {
                    let x = [i as f64 * h, j as f64 * h];
                    if domain == Domain::LShape && x[0] > 0.5 && x[1] > 0.5 {
                        continue;
                    }
                    best = best.max(g(&x).abs());
                }
            }
        }
    }
    best
}

/// `-u'' = π² sin(πx)` on `(0, 1)`, `u = sin(πx)`.
pub fn elliptic_sin_1d() -> ProblemSpec {
    ProblemSpec {
        name: "elliptic-sin".into(),
        domain: Domain::Interval,
        horizon: None,
        operator: EllipticOperator::laplacian(1),
        source: ScalarFn::new("pi^2 sin(pi x)", |x| PI * PI * (PI * x[0]).sin()),
        initial: None,
        exact: Some(AnalyticField::sine_product(1, vec![1.0])),
    }
}

/// `-Δu = 2π² sin(πx) sin(πy)` on the unit square.
pub fn elliptic_sin_2d() -> ProblemSpec {
    ProblemSpec {
        name: "elliptic-sin2d".into(),
        domain: Domain::UnitSquare,
        horizon: None,
        operator: EllipticOperator::laplacian(2),
        source: ScalarFn::new("2 pi^2 sin sin", |x| {
            2.0 * PI * PI * (PI * x[0]).sin() * (PI * x[1]).sin()
        }),
        initial: None,
        exact: Some(AnalyticField::sine_product(2, vec![1.0, 1.0])),
    }
}

/// Anisotropic operator with reaction, `a = [[2, 1/2], [1/2, 1]]`, `c = 1`,
/// exact solution `sin(πx) sin(2πy)`.
pub fn elliptic_anisotropic() -> ProblemSpec {
    ProblemSpec {
        name: "elliptic-aniso".into(),
        domain: Domain::UnitSquare,
        horizon: None,
        operator: EllipticOperator::new(2, vec![2.0, 0.5, 0.5, 1.0], 1.0).expect("SPD"),
        source: ScalarFn::new("manufactured", |x| {
            let (sx, cx) = (PI * x[0]).sin_cos();
            let (sy, cy) = (2.0 * PI * x[1]).sin_cos();
            (6.0 * PI * PI + 1.0) * sx * sy - 2.0 * PI * PI * cx * cy
        }),
        initial: None,
        exact: Some(AnalyticField::sine_product(2, vec![1.0, 2.0])),
    }
}

/// `-Δu = 1` on the L-shape; no closed-form solution.
pub fn lshape_poisson() -> ProblemSpec {
    ProblemSpec {
        name: "lshape-poisson".into(),
        domain: Domain::LShape,
        horizon: None,
        operator: EllipticOperator::laplacian(2),
        source: ScalarFn::constant(1.0),
        initial: None,
        exact: None,
    }
}

/// Heat equation on `(0, 1)` with `u⁰ = sin(πx)`, `u = e^{-π² t} sin(πx)`.
pub fn heat_sin(horizon: f64) -> ProblemSpec {
    let u0 = AnalyticField::sine_product(1, vec![1.0]);
    ProblemSpec {
        name: "heat-sin".into(),
        domain: Domain::Interval,
        horizon: Some(horizon),
        operator: EllipticOperator::laplacian(1),
        source: ScalarFn::constant(0.0),
        exact: Some(AnalyticField::exp_decay(u0.clone(), PI * PI)),
        initial: Some(u0),
    }
}

/// Initial datum of the `heat-bump` problem:
/// `u⁰(x) = 4x(1-x)(1 + sin(4πx)/2)`, a bump with a sign-changing
/// modulation and no exact solution (use the finite-difference reference).
pub fn bump_initial() -> AnalyticField {
    AnalyticField::new(1, "4x(1-x)(1+sin(4 pi x)/2)", |x| {
        let x = x[0];
        let p = Jet2 {
            value: 4.0 * x * (1.0 - x),
            grad: vec![4.0 - 8.0 * x],
            hess: vec![-8.0],
        };
        let w = 4.0 * PI;
        let (s, c) = (w * x).sin_cos();
        let q = Jet2 {
            value: 1.0 + 0.5 * s,
            grad: vec![0.5 * w * c],
            hess: vec![-0.5 * w * w * s],
        };
        p.product(&q)
    })
}

pub fn heat_bump(horizon: f64) -> ProblemSpec {
    ProblemSpec {
        name: "heat-bump".into(),
        domain: Domain::Interval,
        horizon: Some(horizon),
        operator: EllipticOperator::laplacian(1),
        source: ScalarFn::constant(0.0),
        initial: Some(bump_initial()),
        exact: None,
    }
}

/// Forced heat problem with `u = e^{-t} sin(πx)`, `f = (π² - 1) e^{-t} sin(πx)`.
pub fn heat_forced(horizon: f64) -> ProblemSpec {
    let u0 = AnalyticField::sine_product(1, vec![1.0]);
    ProblemSpec {
        name: "heat-forced".into(),
        domain: Domain::Interval,
        horizon: Some(horizon),
        operator: EllipticOperator::laplacian(1),
        source: ScalarFn::new("(pi^2-1) e^-t sin(pi x)", |xt| {
            (PI * PI - 1.0) * (-xt[1]).exp() * (PI * xt[0]).sin()
        }),
        exact: Some(AnalyticField::exp_decay(u0.clone(), 1.0)),
        initial: Some(u0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lshape_membership() {
        let d = Domain::LShape;
        assert!(d.contains(&[0.25, 0.75]));
        assert!(d.contains(&[0.75, 0.25]));
        assert!(!d.contains(&[0.75, 0.75]));
        assert!(d.on_boundary(&[0.5, 0.8]));
        assert!(d.on_boundary(&[0.7, 0.5]));
        assert!(!d.on_boundary(&[0.5, 0.2]));
        assert!(!d.on_boundary(&[1.0, 0.8]));
    }

    #[test]
    fn bundled_names_resolve() {
        for name in ProblemSpec::bundled_names() {
            let p = ProblemSpec::bundled(name).unwrap();
            assert_eq!(&p.name, name);
            assert_eq!(p.initial.is_some(), p.is_parabolic());
        }
        assert!(ProblemSpec::bundled("nope").is_err());
    }

    #[test]
    fn initial_sup_values() {
        assert!((heat_sin(1.0).initial_sup() - 1.0).abs() < 1e-12);
        assert_eq!(elliptic_sin_1d().initial_sup(), 0.0);
        assert!(heat_bump(1.0).initial_sup() > 1.0);
    }
}
