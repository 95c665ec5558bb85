use super::jet::jet_width;
use super::mlp::{jet_into_unchecked, GradientTape};
use super::MlpParams;
use crate::error::{ensure, PinnError, Result};
use crate::par;

/// Points handled by one task during gradient accumulation. Fixed, so the
/// reduction order does not depend on the thread pool.
const POINT_CHUNK: usize = 32;

/// An energy that depends on a network only through its 2-jets at a fixed
/// list of evaluation points.
pub trait JetEnergy: Sync {
    /// Input dimension of the field.
    fn input_dim(&self) -> usize;

    /// Evaluation points, flat (`n x input_dim`).
    fn points(&self) -> &[f64];

    /// Energy from the flat jets at every point (`n x jet_width`).
    fn energy(&self, jets: &[f64]) -> f64;

    /// Energy and its derivative with respect to every jet component, laid
    /// out like `jets`.
    fn energy_and_cotangents(&self, jets: &[f64]) -> (f64, Vec<f64>);
}

/// Flat jets of the network at every point.
pub fn network_jets(params: &MlpParams, points: &[f64]) -> Vec<f64> {
    let d = params.arch().input_dim();
    let c = jet_width(d);
    let n = points.len() / d;
    let mut jets = vec![0.0; n * c];
    par::fill_rows(&mut jets, c, |i, row| {
        jet_into_unchecked(params, &points[i * d..(i + 1) * d], row)
    });
    jets
}

/// Energy value of the network.
pub fn network_energy<E: JetEnergy + ?Sized>(params: &MlpParams, energy: &E) -> Result<f64> {
    ensure!(
        energy.input_dim() == params.arch().input_dim(),
        "energy expects {}-dimensional inputs, network has {}",
        energy.input_dim(),
        params.arch().input_dim()
    );
    Ok(energy.energy(&network_jets(params, energy.points())))
}

/// Energy and its exact gradient with respect to the flattened parameters.
///
/// Forward pass: jets at every point. The energy then supplies a cotangent
/// per jet, and each point's forward pass is replayed on a tape and pulled
/// back to the parameters. Per-point contributions are summed in a fixed
/// order.
pub fn loss_gradient<E: JetEnergy + ?Sized>(params: &MlpParams, energy: &E) -> Result<(f64, Vec<f64>)> {
    let d = params.arch().input_dim();
    ensure!(
        energy.input_dim() == d,
        "energy expects {}-dimensional inputs, network has {d}",
        energy.input_dim()
    );
    let points = energy.points();
    let c = jet_width(d);
    let n = points.len() / d;
    let jets = network_jets(params, points);
    let (value, cot) = energy.energy_and_cotangents(&jets);
    if !value.is_finite() {
        return Err(PinnError::NonFiniteEnergy {
            iteration: 0,
            context: format!("energy evaluated to {value}"),
        });
    }
    let total = params.total_dim();
    let chunks = n.div_ceil(POINT_CHUNK);
    let partial: Vec<Vec<f64>> = par::map_indices(chunks, |ch| {
        let mut g = vec![0.0; total];
        for i in ch * POINT_CHUNK..((ch + 1) * POINT_CHUNK).min(n) {
            let adj = &cot[i * c..(i + 1) * c];
            if adj.iter().all(|&a| a == 0.0) {
                continue;
            }
            let tape = GradientTape::record_unchecked(params, &points[i * d..(i + 1) * d]);
            tape.backprop(params, adj, &mut g);
        }
        g
    });
    let mut grad = vec![0.0; total];
    for g in &partial {
        for (a, b) in grad.iter_mut().zip(g) {
            *a += b;
        }
    }
    if let Some(k) = grad.iter().position(|g| !g.is_finite()) {
        return Err(PinnError::NonFiniteEnergy {
            iteration: 0,
            context: format!("gradient component {k} is not finite (energy {value})"),
        });
    }
    Ok((value, grad))
}
