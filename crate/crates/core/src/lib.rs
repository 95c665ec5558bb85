//! Residual-minimisation ("physics-informed") training of neural fields for
//! linear elliptic and parabolic problems, with the stability diagnostics
//! needed to tell stable time-discrete training (implicit Euler quotients)
//! from unstable training (explicit Euler quotients).

pub mod autodiff;
pub mod diagnostics;
pub mod energies;
pub mod error;
pub mod experiment;
pub mod numfmt;
pub mod operators;
mod par;
pub mod training;

pub use error::{PinnError, Result};
