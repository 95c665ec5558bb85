use super::hard_bc::{pull_back_with, Cutoff};
use crate::autodiff::{jet_width, JetEnergy};
use crate::operators::Field;
use crate::par;

#[derive(Debug, Clone, Copy)]
struct Row {
    weight: f64,
    offset: f64,
    start: usize,
    end: usize,
}

/// An energy of the form `Σ_rows w_r (c_r + Σ_terms κ · jet(p))²`: a
/// weighted sum of squared affine functionals of field jets at fixed points.
///
/// Every energy in this crate has this shape. Points are stored once and
/// shared by all rows that reference them (a time level is used by two
/// consecutive difference quotients).
#[derive(Debug, Clone)]
pub struct ResidualSystem {
    dim: usize,
    width: usize,
    points: Vec<f64>,
    rows: Vec<Row>,
    term_point: Vec<usize>,
    term_coeff: Vec<f64>,
}

impl ResidualSystem {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            width: jet_width(dim),
            points: Vec::new(),
            rows: Vec::new(),
            term_point: Vec::new(),
            term_coeff: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_points(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn push_point(&mut self, x: &[f64]) -> usize {
        debug_assert_eq!(x.len(), self.dim);
        self.points.extend_from_slice(x);
        self.num_points() - 1
    }

    /// Adds `weight · (offset + Σ κ_i · jet(p_i))²`. Rows with zero weight
    /// are dropped.
    pub fn push_row(&mut self, weight: f64, offset: f64, terms: &[(usize, &[f64])]) {
        if weight == 0.0 {
            return;
        }
        let start = self.term_point.len();
        for &(p, kappa) in terms {
            debug_assert_eq!(kappa.len(), self.width);
            self.term_point.push(p);
            self.term_coeff.extend_from_slice(kappa);
        }
        self.rows.push(Row {
            weight,
            offset,
            start,
            end: self.term_point.len(),
        });
    }

    /// Unit coefficient vector selecting one jet slot.
    pub fn unit(&self, slot: usize) -> Vec<f64> {
        let mut k = vec![0.0; self.width];
        k[slot] = 1.0;
        k
    }

    fn residual(&self, row: &Row, jets: &[f64]) -> f64 {
        let w = self.width;
        let mut r = row.offset;
        for t in row.start..row.end {
            let p = self.term_point[t];
            let kappa = &self.term_coeff[t * w..(t + 1) * w];
            let jet = &jets[p * w..(p + 1) * w];
            for m in 0..w {
                r += kappa[m] * jet[m];
            }
        }
        r
    }

    /// Residual of every row.
    pub fn residuals(&self, jets: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|row| self.residual(row, jets)).collect()
    }

    /// Flat jets of `field` at every point.
    pub fn field_jets(&self, field: &dyn Field) -> Vec<f64> {
        assert_eq!(field.input_dim(), self.dim, "field dimension does not match energy");
        let mut jets = vec![0.0; self.num_points() * self.width];
        par::fill_rows(&mut jets, self.width, |i, row| field.jet_into(self.point(i), row));
        jets
    }

    pub fn energy_of(&self, field: &dyn Field) -> f64 {
        self.energy(&self.field_jets(field))
    }

    /// The same energy expressed for the inner field `u` of `g · u`: every
    /// coefficient vector is pulled back through the product rule at its
    /// point. Points and rows are unchanged.
    pub fn with_cutoff(&self, cutoff: &Cutoff) -> ResidualSystem {
        assert_eq!(cutoff.field_dim(), self.dim);
        let w = self.width;
        let cut_jets: Vec<_> = (0..self.num_points()).map(|i| cutoff.jet(self.point(i))).collect();
        let mut term_coeff = Vec::with_capacity(self.term_coeff.len());
        for (t, &p) in self.term_point.iter().enumerate() {
            let kappa = &self.term_coeff[t * w..(t + 1) * w];
            term_coeff.extend(pull_back_with(&cut_jets[p], self.dim, kappa));
        }
        ResidualSystem {
            term_coeff,
            ..self.clone()
        }
    }
}

impl JetEnergy for ResidualSystem {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn points(&self) -> &[f64] {
        &self.points
    }

    fn energy(&self, jets: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|row| {
                let r = self.residual(row, jets);
                row.weight * r * r
            })
            .sum()
    }

    fn energy_and_cotangents(&self, jets: &[f64]) -> (f64, Vec<f64>) {
        let w = self.width;
        let mut cot = vec![0.0; jets.len()];
        let mut e = 0.0;
        for row in &self.rows {
            let r = self.residual(row, jets);
            e += row.weight * r * r;
            let scale = 2.0 * row.weight * r;
            for t in row.start..row.end {
                let p = self.term_point[t];
                let kappa = &self.term_coeff[t * w..(t + 1) * w];
                for (c, k) in cot[p * w..(p + 1) * w].iter_mut().zip(kappa) {
                    *c += scale * k;
                }
            }
        }
        (e, cot)
    }
}
