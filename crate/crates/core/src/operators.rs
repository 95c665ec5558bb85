//! Constant-coefficient elliptic operators, scalar fields and the pointwise
//! strong-form residuals built from them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::autodiff::{hess_index, jet_width, Jet2};
use crate::error::{ensure, Result};
use crate::training::TimeGrid;

/// `L u = -Σ_ij a_ij u_{x_i x_j} + c u` with constant symmetric positive
/// definite `a` and `c >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticOperator {
    dim: usize,
    a: Vec<f64>,
    c: f64,
    theta: f64,
}

impl EllipticOperator {
    /// `a` is given row-major, `dim x dim`.
    pub fn new(dim: usize, a: Vec<f64>, c: f64) -> Result<Self> {
        ensure!(dim >= 1, "operator dimension must be positive");
        ensure!(a.len() == dim * dim, "coefficient matrix must be {dim}x{dim}");
        ensure!(
            c >= 0.0 && c.is_finite(),
            "reaction coefficient must be finite and >= 0, got {c}"
        );
        for i in 0..dim {
            for j in 0..i {
                ensure!(
                    a[i * dim + j] == a[j * dim + i],
                    "coefficient matrix is not symmetric at ({i},{j})"
                );
            }
        }
        let theta = symmetric_eigenvalues(dim, &a).into_iter().fold(f64::INFINITY, f64::min);
        ensure!(
            theta > 0.0,
            "coefficient matrix is not positive definite (smallest eigenvalue {theta})"
        );
        Ok(Self { dim, a, c, theta })
    }

    /// `-Δ` in `dim` dimensions.
    pub fn laplacian(dim: usize) -> Self {
        let mut a = vec![0.0; dim * dim];
        for i in 0..dim {
            a[i * dim + i] = 1.0;
        }
        Self::new(dim, a, 0.0).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.dim + j]
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Ellipticity constant: the smallest eigenvalue of `a`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Coefficients `κ` on a flat jet of a field with `field_dim` inputs such
    /// that `κ · jet = L u`, where `L` acts on the first `dim` inputs. Entries
    /// for off-diagonal packed Hessian slots carry the factor 2.
    pub fn jet_coefficients(&self, field_dim: usize) -> Vec<f64> {
        let mut k = vec![0.0; jet_width(field_dim)];
        k[0] = self.c;
        for i in 0..self.dim {
            for j in i..self.dim {
                let factor = if i == j { 1.0 } else { 2.0 };
                k[1 + field_dim + hess_index(field_dim, i, j)] = -factor * self.a(i, j);
            }
        }
        k
    }
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
fn symmetric_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

/// `L u` from a jet whose dimension equals the operator's.
pub fn apply_l(op: &EllipticOperator, jet: &Jet2) -> Result<f64> {
    ensure!(
        jet.dim() == op.dim(),
        "jet has dimension {}, operator has {}",
        jet.dim(),
        op.dim()
    );
    Ok(apply_l_spatial(op, jet))
}

/// `L u` acting on the leading `op.dim()` coordinates of the jet (the
/// spatial block of a space-time jet).
pub(crate) fn apply_l_spatial(op: &EllipticOperator, jet: &Jet2) -> f64 {
    let d = jet.dim();
    let mut s = op.c() * jet.value;
    for i in 0..op.dim() {
        for j in 0..op.dim() {
            s -= op.a(i, j) * jet.hess[hess_index(d, i, j)];
        }
    }
    s
}

/// A scalar field that can report its 2-jet at a point.
pub trait Field: Sync {
    fn input_dim(&self) -> usize;

    fn jet(&self, x: &[f64]) -> Jet2;

    fn value(&self, x: &[f64]) -> f64 {
        self.jet(x).value
    }

    fn jet_into(&self, x: &[f64], out: &mut [f64]) {
        self.jet(x).write_flat(out);
    }
}

impl<F: Field + ?Sized> Field for &F {
    fn input_dim(&self) -> usize {
        (**self).input_dim()
    }
    fn jet(&self, x: &[f64]) -> Jet2 {
        (**self).jet(x)
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn jet_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).jet_into(x, out)
    }
}

impl<F: Field + ?Sized + Send> Field for Arc<F> {
    fn input_dim(&self) -> usize {
        (**self).input_dim()
    }
    fn jet(&self, x: &[f64]) -> Jet2 {
        (**self).jet(x)
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn jet_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).jet_into(x, out)
    }
}

type JetFn = dyn Fn(&[f64]) -> Jet2 + Send + Sync;

/// A field given by a closed-form jet.
#[derive(Clone)]
pub struct AnalyticField {
    dim: usize,
    name: String,
    f: Arc<JetFn>,
}

impl fmt::Debug for AnalyticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticField({}, dim {})", self.name, self.dim)
    }
}

impl AnalyticField {
    pub fn new(dim: usize, name: impl Into<String>, f: impl Fn(&[f64]) -> Jet2 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, "0", move |_| Jet2::zero(dim))
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, format!("{c}"), move |_| Jet2::constant(dim, c))
    }

    /// `Π_i sin(m_i π x_i)` over the leading `modes.len()` coordinates of a
    /// field with `dim` inputs (remaining inputs are ignored).
    pub fn sine_product(dim: usize, modes: Vec<f64>) -> Self {
        Self::new(dim, format!("sin-product{modes:?}"), move |x| {
            let mut jet = Jet2::constant(dim, 1.0);
            for (i, &m) in modes.iter().enumerate() {
                let w = m * PI;
                let (s, c) = (w * x[i]).sin_cos();
                let mut factor = Jet2::constant(dim, s);
                factor.grad[i] = w * c;
                factor.hess[hess_index(dim, i, i)] = -w * w * s;
                jet = jet.product(&factor);
            }
            jet
        })
    }

    /// `e^{-rate t} · spatial(x)` where `t` is the last input.
    pub fn exp_decay(spatial: AnalyticField, rate: f64) -> Self {
        let dim = spatial.dim + 1;
        let name = format!("exp(-{rate} t)*{}", spatial.name);
        Self::new(dim, name, move |xt| {
            let d = dim - 1;
            let t = xt[d];
            let s = spatial.jet(&xt[..d]);
            let e = (-rate * t).exp();
            let mut jet = Jet2::zero(dim);
            jet.value = e * s.value;
            for i in 0..d {
                jet.grad[i] = e * s.grad[i];
                for j in i..d {
                    jet.hess[hess_index(dim, i, j)] = e * s.hess[hess_index(d, i, j)];
                }
                jet.hess[hess_index(dim, i, d)] = -rate * e * s.grad[i];
            }
            jet.grad[d] = -rate * e * s.value;
            jet.hess[hess_index(dim, d, d)] = rate * rate * e * s.value;
            jet
        })
    }

    /// Treats a spatial field as a time-independent field of `(x, t)`.
    pub fn time_constant(spatial: AnalyticField) -> Self {
        let dim = spatial.dim + 1;
        let name = format!("{}(x)", spatial.name);
        Self::new(dim, name, move |xt| {
            let d = dim - 1;
            let s = spatial.jet(&xt[..d]);
            let mut jet = Jet2::zero(dim);
            jet.value = s.value;
            jet.grad[..d].copy_from_slice(&s.grad);
            for i in 0..d {
                for j in i..d {
                    jet.hess[hess_index(dim, i, j)] = s.hess[hess_index(d, i, j)];
                }
            }
            jet
        })
    }

    /// Linear combination `α u + β v` of two fields.
    pub fn combine(alpha: f64, u: AnalyticField, beta: f64, v: AnalyticField) -> Self {
        assert_eq!(u.dim, v.dim, "combining fields of different dimension");
        let name = format!("{alpha}*{} + {beta}*{}", u.name, v.name);
        Self::new(u.dim, name, move |x| &(alpha * &u.jet(x)) + &(beta * &v.jet(x)))
    }
}

impl Field for AnalyticField {
    fn input_dim(&self) -> usize {
        self.dim
    }
    fn jet(&self, x: &[f64]) -> Jet2 {
        (self.f)(x)
    }
}

/// A scalar data function (source term, boundary or initial datum value).
#[derive(Clone)]
pub struct ScalarFn {
    name: String,
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarFn({})", self.name)
    }
}

impl ScalarFn {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// `L v(x) - f(x)`.
pub fn residual_elliptic(field: &dyn Field, op: &EllipticOperator, f: &ScalarFn, x: &[f64]) -> Result<f64> {
    ensure!(
        field.input_dim() == op.dim() && x.len() == op.dim(),
        "field, operator and point dimensions disagree"
    );
    Ok(apply_l_spatial(op, &field.jet(x)) - f.eval(x))
}

/// `v_t + L v - f` at a space-time point `(x, t)` (time is the last input).
pub fn residual_parabolic_exact(field: &dyn Field, op: &EllipticOperator, f: &ScalarFn, xt: &[f64]) -> Result<f64> {
    let d = op.dim();
    ensure!(
        field.input_dim() == d + 1 && xt.len() == d + 1,
        "space-time field must have {} inputs",
        d + 1
    );
    let jet = field.jet(xt);
    Ok(jet.grad[d] + apply_l_spatial(op, &jet) - f.eval(xt))
}

/// Implicit (backward) or explicit (forward) Euler difference quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeScheme {
    Implicit,
    Explicit,
}

impl TimeScheme {
    pub fn label(self) -> &'static str {
        match self {
            TimeScheme::Implicit => "IE",
            TimeScheme::Explicit => "EE",
        }
    }
}

/// `(v^n - v^{n-1})/k_n + L v^m - f^m` with `m = n` (implicit) or `m = n - 1`
/// (explicit), all evaluated at the spatial point `x`.
pub fn residual_time_discrete(
    field: &dyn Field,
    op: &EllipticOperator,
    f: &ScalarFn,
    x: &[f64],
    grid: &TimeGrid,
    n: usize,
    scheme: TimeScheme,
) -> Result<f64> {
    let d = op.dim();
    ensure!(
        x.len() == d && field.input_dim() == d + 1,
        "point/field dimension mismatch"
    );
    ensure!(n >= 1 && n <= grid.len(), "step index {n} outside 1..={}", grid.len());
    let at = |m: usize| {
        let mut xt = x.to_vec();
        xt.push(grid.node(m));
        xt
    };
    let (now, prev) = (at(n), at(n - 1));
    let jn = field.jet(&now);
    let jp = field.jet(&prev);
    let quotient = (jn.value - jp.value) / grid.step(n);
    let (jm, xm) = match scheme {
        TimeScheme::Implicit => (&jn, &now),
        TimeScheme::Explicit => (&jp, &prev),
    };
    Ok(quotient + apply_l_spatial(op, jm) - f.eval(xm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_1d(c0: f64, c1: f64, c2: f64) -> AnalyticField {
        // c0 + c1 x + c2 x^2
        AnalyticField::new(1, "poly", move |x| Jet2 {
            value: c0 + c1 * x[0] + c2 * x[0] * x[0],
            grad: vec![c1 + 2.0 * c2 * x[0]],
            hess: vec![2.0 * c2],
        })
    }

    #[test]
    fn apply_l_examples() {
        let lap = EllipticOperator::laplacian(1);
        let u = poly_1d(0.0, 0.0, 1.0);
        for &x in &[0.0, 0.3, 2.0] {
            assert_eq!(apply_l(&lap, &u.jet(&[x])).unwrap(), -2.0);
        }
        let s = AnalyticField::sine_product(1, vec![1.0]);
        let v = apply_l(&lap, &s.jet(&[0.5])).unwrap();
        assert!((v - PI * PI).abs() < 1e-12);
        let react = EllipticOperator::new(1, vec![1.0], 3.0).unwrap();
        assert_eq!(apply_l(&react, &u.jet(&[1.0])).unwrap(), 1.0);
        assert!(apply_l(&lap, &Jet2::zero(2)).is_err());
    }

    #[test]
    fn operator_validation() {
        assert!(EllipticOperator::new(2, vec![1.0, 0.5, 0.4, 1.0], 0.0).is_err());
        assert!(EllipticOperator::new(2, vec![1.0, 2.0, 2.0, 1.0], 0.0).is_err());
        assert!(EllipticOperator::new(1, vec![1.0], -1.0).is_err());
        let op = EllipticOperator::new(2, vec![2.0, 0.5, 0.5, 1.0], 1.0).unwrap();
        let expected = 1.5 - (0.25f64 + 0.25).sqrt();
        assert!((op.theta() - expected).abs() < 1e-14);
    }

    #[test]
    fn jet_coefficients_reproduce_apply_l() {
        let op = EllipticOperator::new(2, vec![2.0, 0.5, 0.5, 1.0], 1.5).unwrap();
        let jet = Jet2::from_full(0.7, vec![0.1, -0.2], &[vec![1.0, 3.0], vec![3.0, -2.0]]);
        let k = op.jet_coefficients(2);
        let dot: f64 = k.iter().zip(jet.to_flat()).map(|(a, b)| a * b).sum();
        assert!((dot - apply_l(&op, &jet).unwrap()).abs() < 1e-14);
        // space-time field: time slot untouched
        let k3 = op.jet_coefficients(3);
        assert_eq!(k3[1 + 3 + hess_index(3, 2, 2)], 0.0);
        assert_eq!(k3[1 + 3 + hess_index(3, 0, 1)], -1.0);
    }

    #[test]
    fn elliptic_residual_examples() {
        let lap = EllipticOperator::laplacian(1);
        let zero = AnalyticField::zero(1);
        let one = ScalarFn::constant(1.0);
        assert_eq!(residual_elliptic(&zero, &lap, &one, &[0.3]).unwrap(), -1.0);
        let s = AnalyticField::sine_product(1, vec![1.0]);
        let f = ScalarFn::new("pi^2 sin", |x| PI * PI * (PI * x[0]).sin());
        for &x in &[0.1, 0.37, 0.9] {
            assert!(residual_elliptic(&s, &lap, &f, &[x]).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn parabolic_residual_examples() {
        let lap = EllipticOperator::laplacian(1);
        let t_field = AnalyticField::new(2, "t", |xt| {
            let mut j = Jet2::zero(2);
            j.value = xt[1];
            j.grad[1] = 1.0;
            j
        });
        let one = ScalarFn::constant(1.0);
        assert_eq!(
            residual_parabolic_exact(&t_field, &lap, &one, &[0.4, 0.8]).unwrap(),
            0.0
        );
        let heat = AnalyticField::exp_decay(AnalyticField::sine_product(1, vec![1.0]), PI * PI);
        let zero_f = ScalarFn::constant(0.0);
        for &(x, t) in &[(0.2, 0.0), (0.5, 0.1), (0.77, 1.3)] {
            assert!(residual_parabolic_exact(&heat, &lap, &zero_f, &[x, t]).unwrap().abs() < 1e-12);
        }
        let xt = ScalarFn::new("x t", |p| p[0] * p[1]);
        let zero = AnalyticField::zero(2);
        assert_eq!(residual_parabolic_exact(&zero, &lap, &xt, &[0.5, 2.0]).unwrap(), -1.0);
    }

    #[test]
    fn time_discrete_residual_examples() {
        let lap = EllipticOperator::laplacian(1);
        let grid = TimeGrid::uniform(1.0, 4).unwrap();
        let t_field = AnalyticField::new(2, "t", |xt| {
            let mut j = Jet2::zero(2);
            j.value = xt[1];
            j.grad[1] = 1.0;
            j
        });
        let one = ScalarFn::constant(1.0);
        let zero_f = ScalarFn::constant(0.0);
        let x2 = AnalyticField::time_constant(poly_1d(0.0, 0.0, 1.0));
        for n in 1..=4 {
            for scheme in [TimeScheme::Implicit, TimeScheme::Explicit] {
                let r = residual_time_discrete(&t_field, &lap, &one, &[0.3], &grid, n, scheme).unwrap();
                assert!(r.abs() < 1e-15);
            }
            let r = residual_time_discrete(&x2, &lap, &zero_f, &[0.6], &grid, n, TimeScheme::Explicit).unwrap();
            assert_eq!(r, -2.0);
        }
        assert!(residual_time_discrete(&t_field, &lap, &one, &[0.3], &grid, 0, TimeScheme::Implicit).is_err());
        assert!(residual_time_discrete(&t_field, &lap, &one, &[0.3], &grid, 5, TimeScheme::Implicit).is_err());
    }

    #[test]
    fn exp_decay_jet_matches_finite_differences() {
        let u = AnalyticField::exp_decay(AnalyticField::sine_product(1, vec![1.0]), 2.0);
        let x = [0.3, 0.4];
        let j = u.jet(&x);
        let h = 1e-5;
        for i in 0..2 {
            let mut p = x;
            let mut m = x;
            p[i] += h;
            m[i] -= h;
            let (jp, jm) = (u.jet(&p), u.jet(&m));
            assert!(((jp.value - jm.value) / (2.0 * h) - j.grad[i]).abs() < 1e-8);
            for k in 0..2 {
                let fd = (jp.grad[k] - jm.grad[k]) / (2.0 * h);
                assert!((fd - j.hess_at(i, k)).abs() < 1e-7, "H[{i}{k}]");
            }
        }
    }
}
