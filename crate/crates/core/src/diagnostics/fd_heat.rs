use crate::autodiff::Jet2;
use crate::error::{ensure, Result};
use crate::operators::Field;
use crate::training::{Domain, ProblemSpec};

/// Nodal solution of a 1-D heat problem on a uniform space-time grid.
/// Values include the two boundary nodes (always zero).
#[derive(Debug, Clone)]
pub struct FdSolution {
    /// Interior node count `m`; mesh width `h = 1/(m+1)`.
    pub m: usize,
    pub times: Vec<f64>,
    /// `values[n][i]` at `x_i = i h`, `i = 0..=m+1`.
    pub values: Vec<Vec<f64>>,
}

impl FdSolution {
    pub fn h(&self) -> f64 {
        1.0 / (self.m + 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    /// Level closest to time `t`.
    pub fn level_at(&self, t: f64) -> usize {
        let mut best = 0;
        for (n, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = n;
            }
        }
        best
    }

    /// Spatial field at level `n`: piecewise-linear values with
    /// centered-difference nodal slopes, interpolated linearly. The Hessian
    /// is not available and reported as zero.
    pub fn slice(&self, n: usize) -> FdSlice<'_> {
        FdSlice { sol: self, level: n }
    }
}

pub struct FdSlice<'a> {
    sol: &'a FdSolution,
    level: usize,
}

impl FdSlice<'_> {
    fn slope(&self, i: usize) -> f64 {
        let u = &self.sol.values[self.level];
        let h = self.sol.h();
        let last = u.len() - 1;
        if i == 0 {
            (u[1] - u[0]) / h
        } else if i == last {
            (u[last] - u[last - 1]) / h
        } else {
            (u[i + 1] - u[i - 1]) / (2.0 * h)
        }
    }
}

impl Field for FdSlice<'_> {
    fn input_dim(&self) -> usize {
        1
    }

    fn jet(&self, x: &[f64]) -> Jet2 {
        let u = &self.sol.values[self.level];
        let h = self.sol.h();
        let s = (x[0] / h).clamp(0.0, (u.len() - 1) as f64);
        let i = (s.floor() as usize).min(u.len() - 2);
        let a = s - i as f64;
        let mut j = Jet2::zero(1);
        j.value = (1.0 - a) * u[i] + a * u[i + 1];
        j.grad[0] = (1.0 - a) * self.slope(i) + a * self.slope(i + 1);
        j
    }
}

/// Crank–Nicolson solution of `u_t + L u = f` on `(0, 1)` with zero
/// Dirichlet data, `m` interior nodes and `n_t` uniform steps up to the
/// problem horizon. `L = -a u'' + c u` is discretised by second differences.
pub fn fd_reference_heat(problem: &ProblemSpec, m: usize, n_t: usize) -> Result<FdSolution> {
    ensure!(
        problem.domain == Domain::Interval,
        "finite-difference reference is 1-D only"
    );
    let horizon = problem
        .horizon
        .ok_or_else(|| crate::error::contract("finite-difference reference needs a parabolic problem"))?;
    let u0 = problem
        .initial
        .as_ref()
        .ok_or_else(|| crate::error::contract("problem has no initial datum"))?;
    ensure!(m >= 1 && n_t >= 1, "need m >= 1 and n_t >= 1");
    let h = 1.0 / (m + 1) as f64;
    let k = horizon / n_t as f64;
    let a = problem.operator.a(0, 0);
    let c = problem.operator.c();
    // L_h = tridiag(-a/h², 2a/h² + c, -a/h²)
    let off = -a / (h * h);
    let diag = 2.0 * a / (h * h) + c;
    let x: Vec<f64> = (1..=m).map(|i| i as f64 * h).collect();
    let source = |t: f64| -> Vec<f64> { x.iter().map(|&xi| problem.source.eval(&[xi, t])).collect() };

    let mut u: Vec<f64> = x.iter().map(|&xi| u0.value(&[xi])).collect();
    let mut values = Vec::with_capacity(n_t + 1);
    let mut times = Vec::with_capacity(n_t + 1);
    let with_boundary = |u: &[f64]| {
        let mut v = Vec::with_capacity(m + 2);
        v.push(0.0);
        v.extend_from_slice(u);
        v.push(0.0);
        v
    };
    values.push(with_boundary(&u));
    times.push(0.0);
    // (I + k/2 L_h) u^{n+1} = (I - k/2 L_h) u^n + k/2 (f^n + f^{n+1})
    let lower = 0.5 * k * off;
    let main = 1.0 + 0.5 * k * diag;
    let mut f_prev = source(0.0);
    for n in 1..=n_t {
        let t = if n == n_t { horizon } else { n as f64 * k };
        let f_next = source(t);
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            let left = if i > 0 { u[i - 1] } else { 0.0 };
            let right = if i + 1 < m { u[i + 1] } else { 0.0 };
            let lu = off * left + diag * u[i] + off * right;
            rhs[i] = u[i] - 0.5 * k * lu + 0.5 * k * (f_prev[i] + f_next[i]);
        }
        u = solve_tridiagonal_constant(lower, main, &rhs);
        values.push(with_boundary(&u));
        times.push(t);
        f_prev = f_next;
    }
    Ok(FdSolution { m, times, values })
}

/// Thomas algorithm for a symmetric tridiagonal Toeplitz system.
fn solve_tridiagonal_constant(off: f64, diag: f64, rhs: &[f64]) -> Vec<f64> {
    let m = rhs.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = off / diag;
    d[0] = rhs[0] / diag;
    for i in 1..m {
        let denom = diag - off * c[i - 1];
        c[i] = off / denom;
        d[i] = (rhs[i] - off * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
