use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::autodiff::{Architecture, MlpParams};

/// Glorot-uniform weights in `±sqrt(6 / (d_k + d_{k+1}))`, zero biases.
pub fn init_params(arch: &Architecture, seed: u64) -> MlpParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = MlpParams::zeros(arch.clone());
    for k in 0..arch.num_layers() {
        let (rows, cols) = params.weight_shape(k);
        let limit = (6.0 / (rows + cols) as f64).sqrt();
        for w in params.weight_mut(k) {
            *w = rng.random_range(-limit..limit);
        }
    }
    params
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Activation;

    #[test]
    fn deterministic_and_zero_bias() {
        let arch = Architecture::mlp(2, 16, 2, Activation::Tanh).unwrap();
        let a = init_params(&arch, 42);
        assert_eq!(a, init_params(&arch, 42));
        assert_ne!(a, init_params(&arch, 43));
        for k in 0..arch.num_layers() {
            assert!(a.bias(k).iter().all(|&b| b == 0.0));
        }
    }

    #[test]
    fn weight_variance_matches_glorot() {
        let arch = Architecture::new(vec![64, 64, 1], Activation::Tanh).unwrap();
        let target = 2.0 / 128.0;
        for seed in 0..10 {
            let p = init_params(&arch, seed);
            let w = p.weight(0);
            let mean = w.iter().sum::<f64>() / w.len() as f64;
            let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / w.len() as f64;
            assert!((var / target - 1.0).abs() < 0.2, "seed {seed}: {var}");
        }
    }
}
