//! Quadrature assembly of the residual energies: elliptic with boundary
//! penalty, space-time parabolic, and the implicit/explicit time-discrete
//! variants, each with optional `H¹`-seminorm regularisation.

mod hard_bc;
mod quadrature;
mod spec;
mod system;

pub use hard_bc::{hard_bc_wrap, Cutoff, HardBcField};
pub use quadrature::{PointSet, QuadratureSet};
pub use spec::{BoundaryMode, EnergySpec, InitialNorm, Scheme};
pub use system::ResidualSystem;

use crate::error::{ensure, Result};
use crate::operators::{Field, TimeScheme};
use crate::training::{ProblemSpec, TimeGrid};

/// Adds `λ w |∇_x v|²` rows (spatial gradient only) for every point.
fn push_regularizer(sys: &mut ResidualSystem, points: &[usize], weights: &[f64], lambda: f64, spatial: usize) {
    if lambda == 0.0 {
        return;
    }
    for (&p, &w) in points.iter().zip(weights) {
        for i in 0..spatial {
            let k = sys.unit(1 + i);
            sys.push_row(lambda * w, 0.0, &[(p, &k)]);
        }
    }
}

/// Adds the `μ`-weighted misfit between `v(·, 0)` and `u⁰`. `level0` maps
/// every initial-set point to a system point carrying `(x, 0)`.
fn push_initial(
    sys: &mut ResidualSystem,
    problem: &ProblemSpec,
    initial: &PointSet,
    level0: &[usize],
    spec: &EnergySpec,
) {
    let Some(u0) = &problem.initial else {
        return;
    };
    for (i, (x, w)) in initial.iter().enumerate() {
        let target = u0.jet(x);
        match spec.initial_norm {
            InitialNorm::L2 => {
                let k = sys.unit(0);
                sys.push_row(spec.mu * w, -target.value, &[(level0[i], &k)]);
            }
            InitialNorm::H1Semi => {
                for d in 0..x.len() {
                    let k = sys.unit(1 + d);
                    sys.push_row(spec.mu * w, -target.grad[d], &[(level0[i], &k)]);
                }
            }
        }
    }
}

/// `Σ w_z (Lv(z) - f(z))² + τ Σ w_s v(s)² + λ J(v)`.
pub fn build_elliptic(problem: &ProblemSpec, quad: &QuadratureSet, spec: &EnergySpec) -> Result<ResidualSystem> {
    ensure!(
        spec.scheme == Scheme::Elliptic,
        "elliptic energy needs scheme = elliptic"
    );
    ensure!(!problem.is_parabolic(), "problem `{}` is parabolic", problem.name);
    ensure!(!quad.interior.is_empty(), "interior point set is empty");
    spec.validate()?;
    let d = problem.spatial_dim();
    ensure!(quad.interior.dim() == d, "interior points must be {d}-dimensional");
    let mut sys = ResidualSystem::new(d);
    let l = problem.operator.jet_coefficients(d);
    let mut interior = Vec::with_capacity(quad.interior.len());
    for (z, w) in quad.interior.iter() {
        let p = sys.push_point(z);
        interior.push(p);
        sys.push_row(w, -problem.source.eval(z), &[(p, &l)]);
    }
    let tau = spec.boundary_weight();
    if tau > 0.0 {
        let k = sys.unit(0);
        for (s, w) in quad.boundary.iter() {
            let p = sys.push_point(s);
            sys.push_row(tau * w, 0.0, &[(p, &k)]);
        }
    }
    push_regularizer(&mut sys, &interior, quad.interior.weights(), spec.lambda, d);
    Ok(sys)
}

/// Space-time residual `∫∫ |v_t + Lv - f|²`, initial misfit in the
/// configured norm and the boundary penalty over `∂Ω × (0, T)`.
pub fn build_parabolic_exact(problem: &ProblemSpec, quad: &QuadratureSet, spec: &EnergySpec) -> Result<ResidualSystem> {
    ensure!(
        spec.scheme == Scheme::ExactTime,
        "space-time energy needs scheme = exact"
    );
    ensure!(problem.is_parabolic(), "problem `{}` is not parabolic", problem.name);
    ensure!(!quad.interior.is_empty(), "interior point set is empty");
    spec.validate()?;
    let d = problem.spatial_dim();
    ensure!(
        quad.interior.dim() == d + 1,
        "interior points must be space-time points"
    );
    ensure!(quad.initial.dim() == d, "initial points must be spatial");
    let mut sys = ResidualSystem::new(d + 1);
    let mut k = problem.operator.jet_coefficients(d + 1);
    k[1 + d] = 1.0;
    let mut interior = Vec::with_capacity(quad.interior.len());
    for (z, w) in quad.interior.iter() {
        let p = sys.push_point(z);
        interior.push(p);
        sys.push_row(w, -problem.source.eval(z), &[(p, &k)]);
    }
    let level0: Vec<usize> = quad
        .initial
        .iter()
        .map(|(x, _)| {
            let mut xt = x.to_vec();
            xt.push(0.0);
            sys.push_point(&xt)
        })
        .collect();
    push_initial(&mut sys, problem, &quad.initial, &level0, spec);
    let tau = spec.boundary_weight();
    if tau > 0.0 {
        ensure!(
            quad.boundary.dim() == d + 1,
            "boundary points must be space-time points"
        );
        let unit = sys.unit(0);
        for (s, w) in quad.boundary.iter() {
            let p = sys.push_point(s);
            sys.push_row(tau * w, 0.0, &[(p, &unit)]);
        }
    }
    push_regularizer(&mut sys, &interior, quad.interior.weights(), spec.lambda, d);
    Ok(sys)
}

/// `Σ_n k_n Σ_z w_z r_n(z)² + μ (initial misfit) + τ Σ_n k_n Σ_s w_s v(s, t^n)²
/// + λ Σ_n k_n J(v^n)` with `r_n` the implicit or explicit Euler residual.
///
/// The same spatial points are used at every level. When `quad.initial`
/// equals `quad.interior` the level-0 points are shared.
pub fn build_time_discrete(
    problem: &ProblemSpec,
    grid: &TimeGrid,
    quad: &QuadratureSet,
    spec: &EnergySpec,
) -> Result<ResidualSystem> {
    let Scheme::TimeDiscrete(scheme) = spec.scheme else {
        return Err(crate::error::contract("time-discrete energy needs scheme IE or EE"));
    };
    ensure!(problem.is_parabolic(), "problem `{}` is not parabolic", problem.name);
    ensure!(!grid.is_empty(), "time grid has no steps");
    ensure!(!quad.interior.is_empty(), "interior point set is empty");
    spec.validate()?;
    let d = problem.spatial_dim();
    ensure!(quad.interior.dim() == d, "interior points must be spatial");
    let nz = quad.interior.len();
    let mut sys = ResidualSystem::new(d + 1);
    // level-major point layout: index = n * nz + z
    for n in 0..=grid.len() {
        let t = grid.node(n);
        for (z, _) in quad.interior.iter() {
            let mut xt = z.to_vec();
            xt.push(t);
            sys.push_point(&xt);
        }
    }
    let l = problem.operator.jet_coefficients(d + 1);
    for n in 1..=grid.len() {
        let k = grid.step(n);
        let mut now = vec![0.0; l.len()];
        let mut prev = vec![0.0; l.len()];
        now[0] = 1.0 / k;
        prev[0] = -1.0 / k;
        let (with_l, t_src) = match scheme {
            TimeScheme::Implicit => (&mut now, grid.node(n)),
            TimeScheme::Explicit => (&mut prev, grid.node(n - 1)),
        };
        for (a, b) in with_l.iter_mut().zip(&l) {
            *a += b;
        }
        for (iz, (z, w)) in quad.interior.iter().enumerate() {
            let mut xt = z.to_vec();
            xt.push(t_src);
            let f = problem.source.eval(&xt);
            sys.push_row(k * w, -f, &[(n * nz + iz, &now), ((n - 1) * nz + iz, &prev)]);
        }
    }
    let level0: Vec<usize> = if quad.initial == quad.interior {
        (0..nz).collect()
    } else {
        ensure!(quad.initial.dim() == d, "initial points must be spatial");
        quad.initial
            .iter()
            .map(|(x, _)| {
                let mut xt = x.to_vec();
                xt.push(0.0);
                sys.push_point(&xt)
            })
            .collect()
    };
    push_initial(&mut sys, problem, &quad.initial, &level0, spec);
    let tau = spec.boundary_weight();
    if tau > 0.0 {
        ensure!(quad.boundary.dim() == d, "boundary points must be spatial");
        let unit = sys.unit(0);
        for n in 1..=grid.len() {
            let k = grid.step(n);
            for (s, w) in quad.boundary.iter() {
                let mut xt = s.to_vec();
                xt.push(grid.node(n));
                let p = sys.push_point(&xt);
                sys.push_row(tau * k * w, 0.0, &[(p, &unit)]);
            }
        }
    }
    if spec.lambda > 0.0 {
        for n in 1..=grid.len() {
            let k = grid.step(n);
            let idx: Vec<usize> = (0..nz).map(|iz| n * nz + iz).collect();
            let w: Vec<f64> = quad.interior.weights().iter().map(|w| k * w).collect();
            push_regularizer(&mut sys, &idx, &w, spec.lambda, d);
        }
    }
    Ok(sys)
}

/// Builds the energy for any scheme; `grid` is required for time-discrete
/// schemes.
pub fn build_energy(
    problem: &ProblemSpec,
    grid: Option<&TimeGrid>,
    quad: &QuadratureSet,
    spec: &EnergySpec,
) -> Result<ResidualSystem> {
    match spec.scheme {
        Scheme::Elliptic => build_elliptic(problem, quad, spec),
        Scheme::ExactTime => build_parabolic_exact(problem, quad, spec),
        Scheme::TimeDiscrete(_) => {
            let grid = grid.ok_or_else(|| crate::error::contract("time-discrete energy needs a time grid"))?;
            build_time_discrete(problem, grid, quad, spec)
        }
    }
}

pub fn energy_elliptic(
    field: &dyn Field,
    problem: &ProblemSpec,
    quad: &QuadratureSet,
    spec: &EnergySpec,
) -> Result<f64> {
    ensure!(
        field.input_dim() == problem.field_dim(),
        "field dimension does not match problem"
    );
    Ok(build_elliptic(problem, quad, spec)?.energy_of(field))
}

pub fn energy_parabolic_exact(
    field: &dyn Field,
    problem: &ProblemSpec,
    quad: &QuadratureSet,
    spec: &EnergySpec,
) -> Result<f64> {
    ensure!(
        field.input_dim() == problem.field_dim(),
        "field dimension does not match problem"
    );
    Ok(build_parabolic_exact(problem, quad, spec)?.energy_of(field))
}

pub fn energy_time_discrete(
    field: &dyn Field,
    problem: &ProblemSpec,
    grid: &TimeGrid,
    quad: &QuadratureSet,
    spec: &EnergySpec,
) -> Result<f64> {
    ensure!(
        field.input_dim() == problem.field_dim(),
        "field dimension does not match problem"
    );
    Ok(build_time_discrete(problem, grid, quad, spec)?.energy_of(field))
}

/// `J(v) = Σ w_z |∇v(z)|²`, the quadrature `H¹` seminorm squared.
pub fn regularizer_h1(field: &dyn Field, interior: &PointSet) -> Result<f64> {
    ensure!(!interior.is_empty(), "regularizer needs a nonempty point set");
    ensure!(field.input_dim() == interior.dim(), "field/point dimension mismatch");
    Ok(interior.integrate(|z| field.jet(z).grad.iter().map(|g| g * g).sum()))
}
