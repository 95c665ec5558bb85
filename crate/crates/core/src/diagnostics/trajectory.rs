use crate::autodiff::{hess_index, Jet2};
use crate::energies::PointSet;
use crate::error::{ensure, Result};
use crate::operators::{apply_l, EllipticOperator, Field};
use crate::training::TimeGrid;

use super::norms::h2_density;

/// A space-time field frozen at time `t`, seen as a spatial field.
pub struct TimeSlice<'a> {
    field: &'a dyn Field,
    t: f64,
}

impl<'a> TimeSlice<'a> {
    pub fn new(field: &'a dyn Field, t: f64) -> Self {
        Self { field, t }
    }
}

impl Field for TimeSlice<'_> {
    fn input_dim(&self) -> usize {
        self.field.input_dim() - 1
    }

    fn jet(&self, x: &[f64]) -> Jet2 {
        let d = x.len();
        let mut xt = x.to_vec();
        xt.push(self.t);
        let full = self.field.jet(&xt);
        let mut out = Jet2::zero(d);
        out.value = full.value;
        out.grad.copy_from_slice(&full.grad[..d]);
        for i in 0..d {
            for j in i..d {
                out.hess[hess_index(d, i, j)] = full.hess[hess_index(d + 1, i, j)];
            }
        }
        out
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut xt = x.to_vec();
        xt.push(self.t);
        self.field.value(&xt)
    }
}

/// Nodal levels `U^0, ..., U^N` on a time grid, each a spatial field.
pub struct NodalTrajectory<'a> {
    grid: TimeGrid,
    levels: Vec<Box<dyn Field + 'a>>,
}

impl<'a> NodalTrajectory<'a> {
    pub fn new(grid: TimeGrid, levels: Vec<Box<dyn Field + 'a>>) -> Result<Self> {
        ensure!(
            levels.len() == grid.len() + 1,
            "trajectory needs N + 1 = {} levels, got {}",
            grid.len() + 1,
            levels.len()
        );
        let d = levels[0].input_dim();
        ensure!(
            levels.iter().all(|l| l.input_dim() == d),
            "levels disagree in dimension"
        );
        Ok(Self { grid, levels })
    }

    /// Levels `U^n = v(·, t^n)` of a single space-time field.
    pub fn from_space_time(field: &'a dyn Field, grid: TimeGrid) -> Self {
        let levels = grid
            .nodes()
            .iter()
            .map(|&t| Box::new(TimeSlice::new(field, t)) as Box<dyn Field + 'a>)
            .collect();
        Self { grid, levels }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn level(&self, n: usize) -> &dyn Field {
        self.levels[n].as_ref()
    }

    pub fn spatial_dim(&self) -> usize {
        self.levels[0].input_dim()
    }
}

/// `Û(t, x)`, `Û'(t, x)` and `Ū(t)` jet at a spatial point.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub hat_value: f64,
    pub hat_dt: f64,
    pub bar_jet: Jet2,
}

/// Piecewise-linear (`Û`) and piecewise-constant (`Ū`) time reconstructions
/// at `t ∈ (0, T]`: on `I_n = (t^{n-1}, t^n]`,
/// `Û = ℓ⁰ U^{n-1} + ℓ¹ U^n`, `Û' = (U^n - U^{n-1}) / k_n`, `Ū = U^n`.
pub fn reconstruct(traj: &NodalTrajectory<'_>, t: f64, x: &[f64]) -> Result<Reconstruction> {
    let n = traj
        .grid
        .interval_of(t)
        .ok_or_else(|| crate::error::contract(format!("t = {t} outside (0, T]")))?;
    let (t0, t1) = (traj.grid.node(n - 1), traj.grid.node(n));
    let k = t1 - t0;
    let l0 = (t1 - t) / k;
    let l1 = (t - t0) / k;
    let prev = traj.level(n - 1).value(x);
    let bar_jet = traj.level(n).jet(x);
    let now = bar_jet.value;
    Ok(Reconstruction {
        hat_value: l0 * prev + l1 * now,
        hat_dt: (now - prev) / k,
        bar_jet,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityIndicators {
    /// `‖Ū‖_{L²(0,T; H²)}`.
    pub l2h2_bar: f64,
    /// `‖Û'‖_{L²(0,T; L²)}`.
    pub l2l2_hat_dt: f64,
    /// `‖LŪ‖_{L²(0,T; L²)}`.
    pub l2l2_l_bar: f64,
}

/// Discrete `L²(0,T; H²)` and `H¹(0,T; L²)`-type norms of the
/// reconstructions, with spatial integrals by the given quadrature.
pub fn parabolic_stability_indicators(
    traj: &NodalTrajectory<'_>,
    op: &EllipticOperator,
    quad: &PointSet,
) -> Result<StabilityIndicators> {
    ensure!(
        quad.dim() == traj.spatial_dim(),
        "quadrature/trajectory dimension mismatch"
    );
    ensure!(op.dim() == traj.spatial_dim(), "operator/trajectory dimension mismatch");
    let mut h2 = 0.0;
    let mut dt = 0.0;
    let mut lbar = 0.0;
    for n in 1..=traj.grid.len() {
        let k = traj.grid.step(n);
        let (prev, now) = (traj.level(n - 1), traj.level(n));
        let mut s_h2 = 0.0;
        let mut s_dt = 0.0;
        let mut s_l = 0.0;
        for (z, w) in quad.iter() {
            let j = now.jet(z);
            s_h2 += w * h2_density(&j);
            let q = (j.value - prev.value(z)) / k;
            s_dt += w * q * q;
            let l = apply_l(op, &j)?;
            s_l += w * l * l;
        }
        h2 += k * s_h2;
        dt += k * s_dt;
        lbar += k * s_l;
    }
    Ok(StabilityIndicators {
        l2h2_bar: h2.sqrt(),
        l2l2_hat_dt: dt.sqrt(),
        l2l2_l_bar: lbar.sqrt(),
    })
}

/// `max_n sup_x |U^n(x)|` over the given spatial evaluation points.
pub fn sup_norm_by_level(traj: &NodalTrajectory<'_>, points: &PointSet) -> Vec<f64> {
    (0..=traj.grid.len())
        .map(|n| {
            let level = traj.level(n);
            points.iter().map(|(x, _)| level.value(x).abs()).fold(0.0, f64::max)
        })
        .collect()
}
