use crate::autodiff::{hess_index, jet_width, packed_len, Jet2};
use crate::error::{ensure, Result};
use crate::operators::Field;
use crate::training::Domain;

/// Smooth factor `g ≥ 0` vanishing exactly on the Dirichlet boundary.
///
/// * interval: `x(1 - x)`
/// * square: `x(1 - x) y(1 - y)`
/// * L-shape: `x(1 - x) y(1 - y) ψ`, with `ψ = a + b + sqrt(a² + b²)`,
///   `a = 1/2 - x`, `b = 1/2 - y`. `ψ` is the R-function union of the half
///   planes `x < 1/2` and `y < 1/2`: positive in the L-shape and zero on the
///   two re-entrant edges. It is smooth except at the re-entrant corner.
///
/// For space-time fields the time input (last coordinate) is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoff {
    domain: Domain,
    field_dim: usize,
}

impl Cutoff {
    pub fn new(domain: Domain, field_dim: usize) -> Result<Self> {
        let d = domain.spatial_dim();
        ensure!(
            field_dim == d || field_dim == d + 1,
            "field with {field_dim} inputs cannot live on a {d}-dimensional domain"
        );
        Ok(Self { domain, field_dim })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn field_dim(&self) -> usize {
        self.field_dim
    }

    /// Jet of the cutoff at `x` (in the field's full input dimension).
    pub fn jet(&self, x: &[f64]) -> Jet2 {
        let n = self.field_dim;
        let bubble = |i: usize| {
            let v = x[i];
            let mut j = Jet2::zero(n);
            j.value = v * (1.0 - v);
            j.grad[i] = 1.0 - 2.0 * v;
            j.hess[hess_index(n, i, i)] = -2.0;
            j
        };
        match self.domain {
            Domain::Interval => bubble(0),
            Domain::UnitSquare => bubble(0).product(&bubble(1)),
            Domain::LShape => bubble(0).product(&bubble(1)).product(&self.reentrant(x)),
        }
    }

    fn reentrant(&self, x: &[f64]) -> Jet2 {
        let n = self.field_dim;
        let (a, b) = (0.5 - x[0], 0.5 - x[1]);
        let r = (a * a + b * b).sqrt();
        let mut j = Jet2::zero(n);
        j.value = a + b + r;
        if r == 0.0 {
            // corner: derivatives undefined, the field is pinned to zero there
            return j;
        }
        // ∇a = -e_x, ∇b = -e_y, ∇r = -(a, b)/r, ∇²r = (I - ∇r ∇r^T)/r
        let (rx, ry) = (-a / r, -b / r);
        j.grad[0] = -1.0 + rx;
        j.grad[1] = -1.0 + ry;
        j.hess[hess_index(n, 0, 0)] = (1.0 - rx * rx) / r;
        j.hess[hess_index(n, 0, 1)] = -rx * ry / r;
        j.hess[hess_index(n, 1, 1)] = (1.0 - ry * ry) / r;
        j
    }

    /// Given coefficients `κ` on the wrapped jet `g·u`, returns coefficients
    /// `κ'` on the inner jet `u` with `κ · jet(g u) = κ' · jet(u)`.
    pub fn pull_back(&self, x: &[f64], kappa: &[f64]) -> Vec<f64> {
        let n = self.field_dim;
        let g = self.jet(x);
        pull_back_with(&g, n, kappa)
    }
}

pub(crate) fn pull_back_with(g: &Jet2, n: usize, kappa: &[f64]) -> Vec<f64> {
    let np = packed_len(n);
    let mut out = vec![0.0; jet_width(n)];
    let kg = &kappa[1..1 + n];
    let kh = &kappa[1 + n..1 + n + np];
    let mut val = g.value * kappa[0];
    for i in 0..n {
        val += g.grad[i] * kg[i];
        out[1 + i] = g.value * kg[i];
    }
    let mut p = 0;
    for i in 0..n {
        for j in i..n {
            val += g.hess[p] * kh[p];
            out[1 + j] += kh[p] * g.grad[i];
            out[1 + i] += kh[p] * g.grad[j];
            out[1 + n + p] = g.value * kh[p];
            p += 1;
        }
    }
    out[0] = val;
    out
}

/// `x ↦ g(x) · u(x)` for an inner field `u`.
#[derive(Debug, Clone)]
pub struct HardBcField<F> {
    inner: F,
    cutoff: Cutoff,
}

impl<F: Field> HardBcField<F> {
    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }
}

impl<F: Field> Field for HardBcField<F> {
    fn input_dim(&self) -> usize {
        self.inner.input_dim()
    }

    fn jet(&self, x: &[f64]) -> Jet2 {
        self.cutoff.jet(x).product(&self.inner.jet(x))
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.cutoff.jet(x).value * self.inner.value(x)
    }
}

/// Wraps `inner` so that it vanishes exactly on `∂Ω`.
pub fn hard_bc_wrap<F: Field>(inner: F, domain: Domain) -> Result<HardBcField<F>> {
    let cutoff = Cutoff::new(domain, inner.input_dim())?;
    Ok(HardBcField { inner, cutoff })
}
