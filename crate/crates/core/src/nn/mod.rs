//! Minimal dense-network kernel: forward, analytic backward, softmax
//! and categorical sampling, and Adam. Parameters are stored as f32
//! (the checkpoint wire format); all arithmetic widens to f64 so
//! analytic gradients can be verified against central finite
//! differences to tight tolerances.

mod adam;
mod dense;
mod stochastic;

pub use adam::{adam_step, AdamState, OptimizerConfig};
pub use dense::{Activation, DenseNet, Gradients, Layer, Tape};
pub use stochastic::{entropy, log_softmax, sample_categorical, softmax};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("input length {got} does not match first-layer width {want}")]
    InputLength { got: usize, want: usize },
    #[error("gradient shape does not match network shape")]
    ShapeMismatch,
    #[error("non-finite gradient; update rejected (training diverged?)")]
    NonFiniteGradient,
}
