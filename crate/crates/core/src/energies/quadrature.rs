use crate::error::{ensure, Result};

/// Points (flat, `len x dim`) with nonnegative weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        ensure!(dim >= 1, "point dimension must be positive");
        ensure!(points.len() == dim * weights.len(), "points/weights length mismatch");
        ensure!(
            weights.iter().all(|w| *w >= 0.0 && w.is_finite()),
            "quadrature weights must be finite and nonnegative"
        );
        Ok(Self { dim, points, weights })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            points: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn flat_points(&self) -> &[f64] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ w_z g(z)`.
    pub fn integrate(&self, g: impl Fn(&[f64]) -> f64) -> f64 {
        self.iter().map(|(z, w)| w * g(z)).sum()
    }

    /// Composite trapezoidal rule on `[0, 1]` with `n >= 2` nodes.
    pub fn trapezoid_unit(n: usize) -> Result<Self> {
        ensure!(n >= 2, "trapezoid rule needs at least two nodes");
        let h = 1.0 / (n - 1) as f64;
        let points: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let weights = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect();
        Self::new(1, points, weights)
    }

    /// Tensor trapezoid rule on `[0, 1]^2`, `n` nodes per axis.
    pub fn trapezoid_square(n: usize) -> Result<Self> {
        let line = Self::trapezoid_unit(n)?;
        let mut points = Vec::with_capacity(2 * n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (x, wx) in line.iter() {
            for (y, wy) in line.iter() {
                points.extend_from_slice(&[x[0], y[0]]);
                weights.push(wx * wy);
            }
        }
        Self::new(2, points, weights)
    }

    /// Appends a fixed time coordinate to every point.
    pub fn at_time(&self, t: f64) -> PointSet {
        let mut points = Vec::with_capacity(self.len() * (self.dim + 1));
        for z in self.points.chunks_exact(self.dim) {
            points.extend_from_slice(z);
            points.push(t);
        }
        PointSet {
            dim: self.dim + 1,
            points,
            weights: self.weights.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> PointSet {
        PointSet {
            dim: self.dim,
            points: self.points.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }
}

/// Training points: interior, boundary and (parabolic) initial-time sets.
///
/// For the exact-time parabolic energy the interior and boundary sets are
/// space-time points; otherwise all sets are spatial.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSet {
    pub interior: PointSet,
    pub boundary: PointSet,
    pub initial: PointSet,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_weights_sum_to_measure() {
        assert!((PointSet::trapezoid_unit(11).unwrap().total_weight() - 1.0).abs() < 1e-15);
        assert!((PointSet::trapezoid_square(9).unwrap().total_weight() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let q = PointSet::trapezoid_unit(7).unwrap();
        assert!((q.integrate(|x| 3.0 * x[0] + 1.0) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_negative_weight() {
        assert!(PointSet::new(1, vec![0.5], vec![-1.0]).is_err());
        assert!(PointSet::new(2, vec![0.5], vec![1.0]).is_err());
    }
}
