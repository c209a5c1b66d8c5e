//! Dense `f64` arrays with reverse-mode differentiation, Adam, and a
//! finite-difference gradient checker.

mod gradcheck;
mod graph;
mod params;
mod tensor;

use thiserror::Error;

pub use gradcheck::{gradient_check, gradient_check_params, relative_error, FD_STEP, REL_FLOOR};
pub use graph::{softmax_rows, Axis, Graph, Var};
pub use params::{AdamConfig, Gradients, ParamId, ParamStore};
pub use tensor::Tensor;

#[derive(Debug, Error)]
pub enum NumError {
    #[error("{op}: shape mismatch ({detail})")]
    Shape { op: &'static str, detail: String },
    #[error("backward needs a scalar loss, got shape {0:?}")]
    NonScalarLoss(Vec<usize>),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
