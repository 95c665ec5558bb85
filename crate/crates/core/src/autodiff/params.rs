use super::Architecture;
use crate::error::{ensure, Result};

/// Weights and biases of a dense network, stored flat.
///
/// The flattened ordering is frozen: layer by layer, the weight matrix
/// `W_k` (shape `d_{k+1} x d_k`) in row-major order followed by the bias
/// `b_k`. Checkpoint files and parameter gradients use the same ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    arch: Architecture,
    data: Vec<f64>,
    offsets: Vec<usize>,
}

impl MlpParams {
    pub fn zeros(arch: Architecture) -> Self {
        let data = vec![0.0; arch.param_count()];
        Self::from_flat(arch, data).expect("length matches by construction")
    }

    pub fn from_flat(arch: Architecture, data: Vec<f64>) -> Result<Self> {
        ensure!(
            data.len() == arch.param_count(),
            "parameter vector has length {}, architecture needs {}",
            data.len(),
            arch.param_count()
        );
        let mut offsets = Vec::with_capacity(arch.num_layers() + 1);
        let mut off = 0;
        for w in arch.widths().windows(2) {
            offsets.push(off);
            off += w[1] * (w[0] + 1);
        }
        offsets.push(off);
        Ok(Self { arch, data, offsets })
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    pub fn total_dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// Offset of layer `k`'s block in the flat vector.
    pub fn layer_offset(&self, k: usize) -> usize {
        self.offsets[k]
    }

    /// `(rows, cols)` of `W_k`.
    pub fn weight_shape(&self, k: usize) -> (usize, usize) {
        let w = self.arch.widths();
        (w[k + 1], w[k])
    }

    pub fn weight(&self, k: usize) -> &[f64] {
        let (r, c) = self.weight_shape(k);
        &self.data[self.offsets[k]..self.offsets[k] + r * c]
    }

    pub fn bias(&self, k: usize) -> &[f64] {
        let (r, c) = self.weight_shape(k);
        let start = self.offsets[k] + r * c;
        &self.data[start..start + r]
    }

    pub fn weight_mut(&mut self, k: usize) -> &mut [f64] {
        let (r, c) = self.weight_shape(k);
        let start = self.offsets[k];
        &mut self.data[start..start + r * c]
    }

    pub fn bias_mut(&mut self, k: usize) -> &mut [f64] {
        let (r, c) = self.weight_shape(k);
        let start = self.offsets[k] + r * c;
        &mut self.data[start..start + r]
    }
}
