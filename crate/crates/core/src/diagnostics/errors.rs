use std::f64::consts::PI;

use crate::autodiff::Jet2;
use crate::energies::PointSet;
use crate::error::{ensure, Result};
use crate::operators::{AnalyticField, Field};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub l2: f64,
    /// Full `H¹` norm of the error (value and gradient parts).
    pub h1: f64,
}

/// Quadrature `L²` and `H¹` norms of `field - reference`.
pub fn error_norms(field: &dyn Field, reference: &dyn Field, quad: &PointSet) -> Result<ErrorNorms> {
    ensure!(!quad.is_empty(), "error norms need a nonempty point set");
    ensure!(
        field.input_dim() == reference.input_dim() && field.input_dim() == quad.dim(),
        "field, reference and points disagree in dimension"
    );
    let mut l2 = 0.0;
    let mut grad = 0.0;
    for (z, w) in quad.iter() {
        let (a, b) = (field.jet(z), reference.jet(z));
        let e = a.value - b.value;
        l2 += w * e * e;
        grad += w * a.grad.iter().zip(&b.grad).map(|(p, q)| (p - q).powi(2)).sum::<f64>();
    }
    Ok(ErrorNorms {
        l2: l2.sqrt(),
        h1: (l2 + grad).sqrt(),
    })
}

/// `r^{2/3} sin(2φ/3)` around the re-entrant corner `(1/2, 1/2)` of the
/// L-shape, with `φ ∈ [0, 3π/2)` measured from the edge `x = 1/2, y > 1/2`
/// through the domain. Harmonic, zero on both re-entrant edges, in `H¹` but
/// not in `H²`.
pub fn singular_corner_field() -> AnalyticField {
    const ALPHA: f64 = 2.0 / 3.0;
    AnalyticField::new(2, "r^(2/3) sin(2 phi/3)", |x| {
        let (px, py) = (x[0] - 0.5, x[1] - 0.5);
        let r = px.hypot(py);
        let mut j = Jet2::zero(2);
        if r == 0.0 {
            return j;
        }
        let mut theta = py.atan2(px);
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        // angle of w = -i (px + i py)
        let mut phi = theta - 0.5 * PI;
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        // u = Im(w^α); with F(z) = w^α: F' = -i α w^{α-1}, F'' = -α(α-1) w^{α-2}
        let p1 = ALPHA * r.powf(ALPHA - 1.0);
        let (a, b) = (p1 * ((ALPHA - 1.0) * phi).cos(), p1 * ((ALPHA - 1.0) * phi).sin());
        // F' = -i (a + i b) = b - i a
        let (d1_re, d1_im) = (b, -a);
        let p2 = -ALPHA * (ALPHA - 1.0) * r.powf(ALPHA - 2.0);
        let (d2_re, d2_im) = (p2 * ((ALPHA - 2.0) * phi).cos(), p2 * ((ALPHA - 2.0) * phi).sin());
        j.value = r.powf(ALPHA) * (ALPHA * phi).sin();
        j.grad[0] = d1_im;
        j.grad[1] = d1_re;
        j.hess[0] = d2_im;
        j.hess[1] = d2_re;
        j.hess[2] = -d2_im;
        j
    })
}
