use crate::autodiff::{jet_width, Jet2, MlpParams};
use crate::energies::Cutoff;
use crate::operators::Field;

impl Field for MlpParams {
    fn input_dim(&self) -> usize {
        self.arch().input_dim()
    }

    fn jet(&self, x: &[f64]) -> Jet2 {
        let mut flat = vec![0.0; jet_width(x.len())];
        self.jet_into(x, &mut flat);
        Jet2::from_flat(x.len(), &flat)
    }

    fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(
            x.len(),
            self.arch().input_dim(),
            "point dimension does not match the network"
        );
        crate::autodiff::forward_unchecked(self, x)
    }

    fn jet_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(
            x.len(),
            self.arch().input_dim(),
            "point dimension does not match the network"
        );
        crate::autodiff::jet_into_unchecked(self, x, out);
    }
}

/// The trained field: the raw network, or `g · u_θ` under a hard boundary
/// constraint.
#[derive(Debug, Clone, Copy)]
pub struct NetworkField<'a> {
    pub params: &'a MlpParams,
    pub cutoff: Option<Cutoff>,
}

impl<'a> NetworkField<'a> {
    pub fn new(params: &'a MlpParams, cutoff: Option<Cutoff>) -> Self {
        Self { params, cutoff }
    }
}

impl Field for NetworkField<'_> {
    fn input_dim(&self) -> usize {
        self.params.input_dim()
    }

    fn jet(&self, x: &[f64]) -> Jet2 {
        let u = self.params.jet(x);
        match &self.cutoff {
            Some(c) => c.jet(x).product(&u),
            None => u,
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let u = self.params.value(x);
        match &self.cutoff {
            Some(c) => c.jet(x).value * u,
            None => u,
        }
    }
}
