use std::ops::{Add, Mul};

/// Number of stored Hessian entries for input dimension `d` (upper triangle).
#[inline]
pub const fn packed_len(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Length of a flat jet `[value, grad.., hess..]`.
#[inline]
pub const fn jet_width(d: usize) -> usize {
    1 + d + packed_len(d)
}

/// Position of `H_ij` in the packed row-major upper triangle.
#[inline]
pub fn hess_index(d: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * d - i * (i + 1) / 2 + j
}

/// Value, input gradient and input Hessian of a scalar field at one point.
///
/// Only the upper triangle of the Hessian is stored, so it is symmetric by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Packed row-major upper triangle, see [`hess_index`].
    pub hess: Vec<f64>,
}

impl Jet2 {
    pub fn zero(dim: usize) -> Self {
        Self {
            value: 0.0,
            grad: vec![0.0; dim],
            hess: vec![0.0; packed_len(dim)],
        }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self {
            value,
            ..Self::zero(dim)
        }
    }

    /// Builds a jet from a full (assumed symmetric) Hessian given row by row.
    /// Only the upper triangle is read.
    pub fn from_full(value: f64, grad: Vec<f64>, hess_rows: &[Vec<f64>]) -> Self {
        let d = grad.len();
        let mut hess = Vec::with_capacity(packed_len(d));
        for (i, row) in hess_rows.iter().enumerate().take(d) {
            hess.extend_from_slice(&row[i..d]);
        }
        Self { value, grad, hess }
    }

    pub fn from_flat(dim: usize, flat: &[f64]) -> Self {
        debug_assert_eq!(flat.len(), jet_width(dim));
        Self {
            value: flat[0],
            grad: flat[1..1 + dim].to_vec(),
            hess: flat[1 + dim..].to_vec(),
        }
    }

    pub fn write_flat(&self, out: &mut [f64]) {
        let d = self.dim();
        out[0] = self.value;
        out[1..1 + d].copy_from_slice(&self.grad);
        out[1 + d..1 + d + self.hess.len()].copy_from_slice(&self.hess);
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = vec![0.0; jet_width(self.dim())];
        self.write_flat(&mut out);
        out
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        self.hess[hess_index(self.dim(), i, j)]
    }

    /// Jet of the product of two fields.
    pub fn product(&self, other: &Jet2) -> Jet2 {
        let d = self.dim();
        let value = self.value * other.value;
        let grad = (0..d)
            .map(|i| self.value * other.grad[i] + other.value * self.grad[i])
            .collect();
        let mut hess = Vec::with_capacity(packed_len(d));
        for i in 0..d {
            for j in i..d {
                let p = hess_index(d, i, j);
                hess.push(
                    self.value * other.hess[p]
                        + other.value * self.hess[p]
                        + self.grad[i] * other.grad[j]
                        + self.grad[j] * other.grad[i],
                );
            }
        }
        Jet2 { value, grad, hess }
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value + rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&rhs.hess).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Mul<&Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        Jet2 {
            value: self * rhs.value,
            grad: rhs.grad.iter().map(|g| self * g).collect(),
            hess: rhs.hess.iter().map(|h| self * h).collect(),
        }
    }
}
