//! Dense feed-forward networks with exact input derivatives up to second
//! order and reverse accumulation of parameter gradients through them.
//!
//! A network is evaluated on *jets*: every hidden unit carries its value,
//! its gradient with respect to the network input and the packed upper
//! triangle of its input Hessian. Affine layers act on all jet components
//! at once (a small matrix product), activations apply the second-order
//! chain rule unit by unit. The [`GradientTape`] records one such forward
//! pass so that an adjoint on the output jet can be pulled back to the
//! flattened parameter vector.

mod arch;
mod checkpoint;
mod gradient;
mod jet;
mod mlp;
mod params;

pub use arch::{Activation, Architecture};
pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use gradient::{loss_gradient, network_energy, network_jets, JetEnergy};
pub use jet::{hess_index, jet_width, packed_len, Jet2};
pub(crate) use mlp::{forward_unchecked, jet_into_unchecked};
pub use mlp::{mlp_forward, mlp_jet, GradientTape};
pub use params::MlpParams;
