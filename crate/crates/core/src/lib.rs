//! Floating-point number systems F_p / F_{p,q}, networks evaluated under their
//! arithmetic, closed-form memorizing and approximating constructions, and
//! exhaustive verification sweeps.

pub mod bits;
pub mod constructors;
pub mod dataset;
pub mod dyadic;
pub mod error;
pub mod float;
pub mod format;
pub mod lemmas;
pub mod network;
pub mod target;
pub mod text;
pub mod verifier;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use float::Float;
pub use format::{Format, Kind, Normalized, OpFlags};
pub use network::{Activation, EvalTrace, Layer, Network, Neuron};
