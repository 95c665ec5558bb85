use super::jet::{jet_width, Jet2};
use super::MlpParams;
use crate::error::{ensure, Result};

/// `u_θ(x)`: affine maps alternating with the activation, last layer affine.
pub fn mlp_forward(params: &MlpParams, x: &[f64]) -> Result<f64> {
    check_input(params, x)?;
    Ok(forward_unchecked(params, x))
}

/// Value, gradient and Hessian of `u_θ` at `x`.
pub fn mlp_jet(params: &MlpParams, x: &[f64]) -> Result<Jet2> {
    check_input(params, x)?;
    let mut out = vec![0.0; jet_width(x.len())];
    jet_into_unchecked(params, x, &mut out);
    Ok(Jet2::from_flat(x.len(), &out))
}

fn check_input(params: &MlpParams, x: &[f64]) -> Result<()> {
    ensure!(
        x.len() == params.arch().input_dim(),
        "input has dimension {}, network expects {}",
        x.len(),
        params.arch().input_dim()
    );
    Ok(())
}

pub(crate) fn forward_unchecked(params: &MlpParams, x: &[f64]) -> f64 {
    let act = params.arch().activation();
    let layers = params.arch().num_layers();
    let mut a = x.to_vec();
    let mut z = Vec::new();
    for k in 0..layers {
        let (rows, cols) = params.weight_shape(k);
        let w = params.weight(k);
        let b = params.bias(k);
        z.clear();
        for j in 0..rows {
            let mut s = 0.0;
            for i in 0..cols {
                s += w[j * cols + i] * a[i];
            }
            s += b[j];
            z.push(s);
        }
        if k + 1 < layers {
            a.clear();
            a.extend(z.iter().map(|&v| act.value(v)));
        }
    }
    z[0]
}

/// Flat input jet: value `x_i`, gradient `e_i`, zero Hessian.
fn seed_input(x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let c = jet_width(d);
    let mut a = vec![0.0; d * c];
    for (i, &xi) in x.iter().enumerate() {
        a[i * c] = xi;
        a[i * c + 1 + i] = 1.0;
    }
    a
}

/// `out = W a + b e_0^T` on flat jets (`a` is `cols x c`, `out` is `rows x c`).
///
/// The value column accumulates in the same order as [`forward_unchecked`]
/// so jet values agree with plain forward evaluation bit for bit.
fn affine_jet(w: &[f64], b: &[f64], rows: usize, cols: usize, a: &[f64], c: usize, out: &mut Vec<f64>) {
    out.clear();
    out.resize(rows * c, 0.0);
    for j in 0..rows {
        let zrow = &mut out[j * c..(j + 1) * c];
        for i in 0..cols {
            let wji = w[j * cols + i];
            let arow = &a[i * c..(i + 1) * c];
            for (zm, &am) in zrow.iter_mut().zip(arow) {
                *zm += wji * am;
            }
        }
        zrow[0] += b[j];
    }
}

/// Second-order chain rule for one unit: `h = σ(z)` on a flat jet row.
#[inline]
fn activate_row(z: &[f64], h: &mut [f64], d: usize, s: [f64; 4]) {
    let g = &z[1..1 + d];
    h[0] = s[0];
    for i in 0..d {
        h[1 + i] = s[1] * g[i];
    }
    let mut p = 1 + d;
    for i in 0..d {
        for j in i..d {
            h[p] = s[2] * g[i] * g[j] + s[1] * z[p];
            p += 1;
        }
    }
}

/// Pulls an adjoint on `h = σ(z)` back to an adjoint on `z` (one unit).
#[inline]
fn activate_row_adjoint(z: &[f64], hb: &[f64], zb: &mut [f64], d: usize, s: [f64; 4]) {
    let g = &z[1..1 + d];
    let mut val = hb[0] * s[1];
    for i in 0..d {
        val += hb[1 + i] * s[2] * g[i];
        zb[1 + i] = hb[1 + i] * s[1];
    }
    let mut p = 1 + d;
    for i in 0..d {
        for j in i..d {
            let hp = hb[p];
            val += hp * (s[3] * g[i] * g[j] + s[2] * z[p]);
            zb[1 + i] += hp * s[2] * g[j];
            zb[1 + j] += hp * s[2] * g[i];
            zb[p] = hp * s[1];
            p += 1;
        }
    }
    zb[0] = val;
}

pub(crate) fn jet_into_unchecked(params: &MlpParams, x: &[f64], out: &mut [f64]) {
    let d = x.len();
    let c = jet_width(d);
    let act = params.arch().activation();
    let layers = params.arch().num_layers();
    let mut a = seed_input(x);
    let mut z = Vec::new();
    for k in 0..layers {
        let (rows, cols) = params.weight_shape(k);
        affine_jet(params.weight(k), params.bias(k), rows, cols, &a, c, &mut z);
        if k + 1 < layers {
            a.clear();
            a.resize(rows * c, 0.0);
            for j in 0..rows {
                let zr = &z[j * c..(j + 1) * c];
                activate_row(zr, &mut a[j * c..(j + 1) * c], d, act.derivatives(zr[0]));
            }
        }
    }
    out[..c].copy_from_slice(&z[..c]);
}

/// Record of one jet-extended forward pass, enough to pull an adjoint on the
/// output jet back to the parameters.
#[derive(Debug, Clone)]
pub struct GradientTape {
    dim: usize,
    /// Jet fed into layer `k`, `d_k x c`.
    inputs: Vec<Vec<f64>>,
    /// Pre-activation jets of the hidden layers.
    pre: Vec<Vec<f64>>,
    /// `σ, σ', σ'', σ'''` at every hidden pre-activation.
    derivs: Vec<Vec<[f64; 4]>>,
    output: Vec<f64>,
}

impl GradientTape {
    pub fn record(params: &MlpParams, x: &[f64]) -> Result<Self> {
        check_input(params, x)?;
        Ok(Self::record_unchecked(params, x))
    }

    pub(crate) fn record_unchecked(params: &MlpParams, x: &[f64]) -> Self {
        let d = x.len();
        let c = jet_width(d);
        let act = params.arch().activation();
        let layers = params.arch().num_layers();
        let mut inputs = Vec::with_capacity(layers);
        let mut pre = Vec::with_capacity(layers - 1);
        let mut derivs = Vec::with_capacity(layers - 1);
        inputs.push(seed_input(x));
        let mut output = Vec::new();
        for k in 0..layers {
            let (rows, cols) = params.weight_shape(k);
            let mut z = Vec::new();
            affine_jet(params.weight(k), params.bias(k), rows, cols, &inputs[k], c, &mut z);
            if k + 1 < layers {
                let mut a = vec![0.0; rows * c];
                let mut ds = Vec::with_capacity(rows);
                for j in 0..rows {
                    let zr = &z[j * c..(j + 1) * c];
                    let s = act.derivatives(zr[0]);
                    activate_row(zr, &mut a[j * c..(j + 1) * c], d, s);
                    ds.push(s);
                }
                pre.push(z);
                derivs.push(ds);
                inputs.push(a);
            } else {
                output = z;
            }
        }
        Self {
            dim: d,
            inputs,
            pre,
            derivs,
            output,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The recorded output jet in flat layout.
    pub fn output_flat(&self) -> &[f64] {
        &self.output
    }

    pub fn output(&self) -> Jet2 {
        Jet2::from_flat(self.dim, &self.output)
    }

    /// Adds `(∂ output / ∂θ)^T adjoint` to `grad`, where `adjoint` is a flat
    /// jet-shaped cotangent on the output (value, gradient, packed Hessian).
    pub fn backprop(&self, params: &MlpParams, adjoint: &[f64], grad: &mut [f64]) {
        let d = self.dim;
        let c = jet_width(d);
        debug_assert_eq!(adjoint.len(), c);
        debug_assert_eq!(grad.len(), params.total_dim());
        let layers = params.arch().num_layers();
        let mut zb = adjoint.to_vec();
        let mut ab = Vec::new();
        for k in (0..layers).rev() {
            let (rows, cols) = params.weight_shape(k);
            let a = &self.inputs[k];
            let w = params.weight(k);
            let off = params.layer_offset(k);
            {
                let (gw, gb) = grad[off..off + rows * (cols + 1)].split_at_mut(rows * cols);
                for j in 0..rows {
                    let zr = &zb[j * c..(j + 1) * c];
                    if zr.iter().all(|&v| v == 0.0) {
                        continue;
                    }
                    for i in 0..cols {
                        let ar = &a[i * c..(i + 1) * c];
                        let mut s = 0.0;
                        for m in 0..c {
                            s += zr[m] * ar[m];
                        }
                        gw[j * cols + i] += s;
                    }
                    gb[j] += zr[0];
                }
            }
            if k == 0 {
                break;
            }
            ab.clear();
            ab.resize(cols * c, 0.0);
            for j in 0..rows {
                let zr = &zb[j * c..(j + 1) * c];
                for i in 0..cols {
                    let wji = w[j * cols + i];
                    let abr = &mut ab[i * c..(i + 1) * c];
                    for m in 0..c {
                        abr[m] += wji * zr[m];
                    }
                }
            }
            let z = &self.pre[k - 1];
            let ds = &self.derivs[k - 1];
            zb.clear();
            zb.resize(cols * c, 0.0);
            for i in 0..cols {
                activate_row_adjoint(
                    &z[i * c..(i + 1) * c],
                    &ab[i * c..(i + 1) * c],
                    &mut zb[i * c..(i + 1) * c],
                    d,
                    ds[i],
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{Activation, Architecture};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_params(widths: Vec<usize>, act: Activation, seed: u64) -> MlpParams {
        let arch = Architecture::new(widths, act).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = arch.param_count();
        MlpParams::from_flat(arch, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    /// Independent evaluator: nested Vec matrices, explicit layer loop.
    fn naive_forward(p: &MlpParams, x: &[f64]) -> f64 {
        let mut v: Vec<f64> = x.to_vec();
        let layers = p.arch().num_layers();
        for k in 0..layers {
            let (r, c) = p.weight_shape(k);
            let w: Vec<Vec<f64>> = (0..r).map(|j| p.weight(k)[j * c..(j + 1) * c].to_vec()).collect();
            let mut next: Vec<f64> = w
                .iter()
                .zip(p.bias(k))
                .map(|(row, b)| row.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() + b)
                .collect();
            if k + 1 < layers {
                next = next.into_iter().map(f64::tanh).collect();
            }
            v = next;
        }
        v[0]
    }

    #[test]
    fn zero_network_is_zero() {
        let arch = Architecture::new(vec![2, 5, 5, 1], Activation::Tanh).unwrap();
        let p = MlpParams::zeros(arch);
        assert_eq!(mlp_forward(&p, &[0.3, -2.0]).unwrap(), 0.0);
        let j = mlp_jet(&p, &[0.3, -2.0]).unwrap();
        assert_eq!(j, Jet2::zero(2));
    }

    #[test]
    fn dead_hidden_unit_leaves_output_bias() {
        let arch = Architecture::new(vec![1, 1, 1], Activation::Tanh).unwrap();
        let p = MlpParams::from_flat(arch, vec![0.0, 0.0, 5.0, 3.0]).unwrap();
        assert_eq!(mlp_forward(&p, &[7.0]).unwrap(), 3.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let arch = Architecture::new(vec![2, 3, 1], Activation::Tanh).unwrap();
        let p = MlpParams::zeros(arch);
        assert!(mlp_forward(&p, &[1.0]).is_err());
        assert!(mlp_jet(&p, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn forward_matches_naive_evaluator() {
        let p = random_params(vec![2, 8, 8, 1], Activation::Tanh, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let a = mlp_forward(&p, &x).unwrap();
            let b = naive_forward(&p, &x);
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1e-300), "{a} vs {b}");
        }
    }

    #[test]
    fn single_tanh_unit_closed_form() {
        let arch = Architecture::new(vec![1, 1, 1], Activation::Tanh).unwrap();
        let p = MlpParams::from_flat(arch, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let j = mlp_jet(&p, &[0.3]).unwrap();
        let t = 0.3f64.tanh();
        let sech2 = 1.0 - t * t;
        assert!((j.value - t).abs() < 1e-15);
        assert!((j.grad[0] - sech2).abs() < 1e-15);
        assert!((j.hess[0] + 2.0 * t * sech2).abs() < 1e-15);
    }

    #[test]
    fn jet_value_equals_forward_bitwise() {
        for (seed, act) in [(1, Activation::Tanh), (2, Activation::ReluPow(3))] {
            let p = random_params(vec![3, 6, 7, 1], act, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            for _ in 0..20 {
                let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                let j = mlp_jet(&p, &x).unwrap();
                assert_eq!(j.value.to_bits(), mlp_forward(&p, &x).unwrap().to_bits());
                let tape = GradientTape::record(&p, &x).unwrap();
                assert_eq!(tape.output(), j);
            }
        }
    }

    #[test]
    fn relu_square_network_matches_hand_jet() {
        // u = (max(x0 + x1, 0))^2
        let arch = Architecture::new(vec![2, 1, 1], Activation::ReluPow(2)).unwrap();
        let p = MlpParams::from_flat(arch, vec![1.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let j = mlp_jet(&p, &[0.5, 0.25]).unwrap();
        assert_eq!(j.value, 0.5625);
        assert_eq!(j.grad, vec![1.5, 1.5]);
        assert_eq!(j.hess, vec![2.0, 2.0, 2.0]);
        let j = mlp_jet(&p, &[-0.5, 0.25]).unwrap();
        assert_eq!(j, Jet2::zero(2));
    }
}
