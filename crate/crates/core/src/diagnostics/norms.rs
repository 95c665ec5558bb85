use crate::autodiff::Jet2;
use crate::energies::PointSet;
use crate::error::{ensure, Result};
use crate::operators::Field;

fn check(field: &dyn Field, quad: &PointSet) -> Result<()> {
    ensure!(!quad.is_empty(), "norm needs a nonempty point set");
    ensure!(
        field.input_dim() == quad.dim(),
        "field has {} inputs, points are {}-dimensional",
        field.input_dim(),
        quad.dim()
    );
    Ok(())
}

/// Quadrature `L²` norm.
pub fn norm_l2(field: &dyn Field, quad: &PointSet) -> Result<f64> {
    check(field, quad)?;
    Ok(quad.integrate(|z| field.value(z).powi(2)).sqrt())
}

/// Quadrature `H¹` norm: `sqrt(Σ w (v² + |∇v|²))`.
pub fn norm_h1(field: &dyn Field, quad: &PointSet) -> Result<f64> {
    check(field, quad)?;
    Ok(quad
        .integrate(|z| {
            let j = field.jet(z);
            j.value * j.value + j.grad.iter().map(|g| g * g).sum::<f64>()
        })
        .sqrt())
}

/// Quadrature `H²` norm: `sqrt(Σ w (v² + |∇v|² + |∇²v|_F²))`.
pub fn norm_h2(field: &dyn Field, quad: &PointSet) -> Result<f64> {
    check(field, quad)?;
    Ok(quad.integrate(|z| h2_density(&field.jet(z))).sqrt())
}

/// `v² + |∇v|² + |∇²v|_F²` from a jet.
pub(crate) fn h2_density(j: &Jet2) -> f64 {
    let d = j.dim();
    let mut s = j.value * j.value + j.grad.iter().map(|g| g * g).sum::<f64>();
    let mut p = 0;
    for i in 0..d {
        for k in i..d {
            let h = j.hess[p];
            s += if i == k { h * h } else { 2.0 * h * h };
            p += 1;
        }
    }
    s
}
