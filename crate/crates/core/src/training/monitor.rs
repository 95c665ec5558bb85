use super::{Domain, ProblemSpec, TimeGrid};
use crate::diagnostics::{
    error_norms, fd_reference_heat, norm_h1, norm_h2, norm_l2, parabolic_stability_indicators, sup_norm_by_level,
    DiagnosticsReport, FdSolution, NodalTrajectory, TimeSlice,
};
use crate::energies::PointSet;
use crate::error::Result;
use crate::operators::{AnalyticField, EllipticOperator, Field};

/// Uniform evaluation grid of the closed domain with trapezoidal weights
/// (`n` nodes per axis). On the L-shape the removed quadrant is dropped.
pub fn evaluation_grid(domain: Domain, n: usize) -> Result<PointSet> {
    match domain {
        Domain::Interval => PointSet::trapezoid_unit(n),
        Domain::UnitSquare => PointSet::trapezoid_square(n),
        Domain::LShape => {
            let sq = PointSet::trapezoid_square(n)?;
            let mut points = Vec::new();
            let mut weights = Vec::new();
            for (x, w) in sq.iter() {
                if x[0] > 0.5 && x[1] > 0.5 {
                    continue;
                }
                points.extend_from_slice(x);
                weights.push(w);
            }
            PointSet::new(2, points, weights)
        }
    }
}

enum Reference {
    None,
    Exact(AnalyticField),
    Fd(FdSolution),
}

/// Computes the logged indicators of a field on a fixed evaluation grid,
/// independent of the training points.
pub(crate) struct Monitor {
    eval: PointSet,
    levels: Option<TimeGrid>,
    op: EllipticOperator,
    reference: Reference,
    reference_l2: f64,
    initial_sup: f64,
}

impl Monitor {
    pub(crate) fn new(problem: &ProblemSpec, grid: Option<&TimeGrid>, eval_nodes: usize) -> Result<Self> {
        let eval = evaluation_grid(problem.domain, eval_nodes)?;
        let levels = match (problem.horizon, grid) {
            (None, _) => None,
            (Some(_), Some(g)) => Some(g.clone()),
            (Some(t), None) => Some(TimeGrid::uniform(t, 20)?),
        };
        let reference = match (&problem.exact, &levels) {
            (Some(u), _) => Reference::Exact(u.clone()),
            (None, Some(g)) if problem.domain == Domain::Interval && problem.initial.is_some() => {
                let refine = 400usize.div_ceil(g.len()).max(1);
                Reference::Fd(fd_reference_heat(problem, 199, g.len() * refine)?)
            }
            _ => Reference::None,
        };
        let mut m = Self {
            eval,
            levels,
            op: problem.operator.clone(),
            reference,
            reference_l2: f64::NAN,
            initial_sup: problem.initial_sup(),
        };
        m.reference_l2 = m.reference_norm()?;
        Ok(m)
    }

    fn reference_norm(&self) -> Result<f64> {
        match (&self.reference, &self.levels) {
            (Reference::None, _) => Ok(f64::NAN),
            (Reference::Exact(u), None) => norm_l2(u, &self.eval),
            (_, Some(g)) => {
                let mut s = 0.0;
                for n in 1..=g.len() {
                    let e = self.with_reference(g, n, |r| norm_l2(r, &self.eval))?;
                    s += g.step(n) * e * e;
                }
                Ok(s.sqrt())
            }
            _ => unreachable!(),
        }
    }

    fn with_reference<T>(&self, grid: &TimeGrid, n: usize, f: impl FnOnce(&dyn Field) -> Result<T>) -> Result<T> {
        match &self.reference {
            Reference::Exact(u) => f(&TimeSlice::new(u, grid.node(n))),
            Reference::Fd(sol) => f(&sol.slice(sol.level_at(grid.node(n)))),
            Reference::None => unreachable!(),
        }
    }

    pub(crate) fn initial_sup(&self) -> f64 {
        self.initial_sup
    }

    pub(crate) fn measure(&self, field: &dyn Field) -> Result<DiagnosticsReport> {
        let mut r = DiagnosticsReport::empty();
        match &self.levels {
            None => {
                r.h1_norm = norm_h1(field, &self.eval)?;
                r.h2_norm = norm_h2(field, &self.eval)?;
                r.sup_norm = self.eval.iter().map(|(x, _)| field.value(x).abs()).fold(0.0, f64::max);
                if let Reference::Exact(u) = &self.reference {
                    let e = error_norms(field, u, &self.eval)?;
                    r.error_l2 = e.l2;
                    r.error_h1 = e.h1;
                }
            }
            Some(grid) => {
                let traj = NodalTrajectory::from_space_time(field, grid.clone());
                let ind = parabolic_stability_indicators(&traj, &self.op, &self.eval)?;
                r.l2h2_bar = ind.l2h2_bar;
                r.l2l2_hat_dt = ind.l2l2_hat_dt;
                r.sup_norm = sup_norm_by_level(&traj, &self.eval).into_iter().fold(0.0, f64::max);
                r.sup_ratio = r.sup_norm / self.initial_sup;
                let mut h1: f64 = 0.0;
                for n in 0..=grid.len() {
                    h1 = h1.max(norm_h1(traj.level(n), &self.eval)?);
                }
                r.h1_norm = h1;
                if !matches!(self.reference, Reference::None) {
                    let (mut l2, mut eh1) = (0.0, 0.0);
                    for n in 1..=grid.len() {
                        let e = self.with_reference(grid, n, |u| error_norms(traj.level(n), u, &self.eval))?;
                        l2 += grid.step(n) * e.l2 * e.l2;
                        eh1 += grid.step(n) * e.h1 * e.h1;
                    }
                    r.error_l2 = l2.sqrt();
                    r.error_h1 = eh1.sqrt();
                }
            }
        }
        r.rel_error_l2 = r.error_l2 / self.reference_l2;
        Ok(r)
    }
}
