//! Differentiable building blocks. Each layer owns [`ParamId`]s registered
//! in a [`ParamStore`] at construction and builds its forward pass on a
//! caller-supplied [`Graph`].

mod biaffine;
mod char_encoder;
mod gcn;
mod linear;
mod lstm;
mod salstm;
mod span;
mod treelstm;
mod word_repr;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::numcore::{NumError, ParamId, ParamStore, Tensor};

pub use biaffine::{AffineHeads, Biaffine};
pub use char_encoder::{CharEncoder, CHAR_DIM, CHAR_FILTERS};
pub use gcn::Gcn;
pub use linear::{Embedding, Linear, Mlp};
pub use lstm::{BiLstm, EncoderConfig, Lstm};
pub use salstm::SaLstm;
pub use span::{size_bucket, SpanRepr, Unary, SIZE_BUCKETS};
pub use treelstm::TreeLstm;
pub use word_repr::{TokenIds, WordRepr, WordReprConfig};

#[derive(Debug, Error)]
pub enum LayerError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("external vectors required ({0} dims) but the sentence has none")]
    MissingExternal(usize),
    #[error("external vectors have {got} dims, expected {want}")]
    ExternalDim { got: usize, want: usize },
    #[error("cannot encode an empty word")]
    EmptyWord,
    #[error("span ({0}, {1}) outside the sentence")]
    InvalidSpan(usize, usize),
}

/// Registers parameters under a name prefix with seeded initialization:
/// Glorot-uniform matrices, zero biases.
pub struct ParamBuilder<'a> {
    store: &'a mut ParamStore,
    rng: &'a mut ChaCha8Rng,
    prefix: String,
}

impl<'a> ParamBuilder<'a> {
    pub fn new(store: &'a mut ParamStore, rng: &'a mut ChaCha8Rng) -> Self {
        ParamBuilder {
            store,
            rng,
            prefix: String::new(),
        }
    }

    pub fn sub(&mut self, name: &str) -> ParamBuilder<'_> {
        let prefix = if self.prefix.is_empty() {
            name.to_string()
        } else {
            format!("{}.{}", self.prefix, name)
        };
        ParamBuilder {
            store: self.store,
            rng: self.rng,
            prefix,
        }
    }

    fn full(&self, name: &str) -> String {
        if self.prefix.is_empty() {
            name.to_string()
        } else {
            format!("{}.{}", self.prefix, name)
        }
    }

    pub fn tensor(&mut self, name: &str, t: Tensor) -> Result<ParamId, NumError> {
        let full = self.full(name);
        self.store.add(&full, t)
    }

    pub fn glorot(&mut self, name: &str, shape: &[usize]) -> Result<ParamId, NumError> {
        let t = Tensor::glorot(shape, self.rng);
        self.tensor(name, t)
    }

    pub fn matrix(&mut self, name: &str, rows: usize, cols: usize) -> Result<ParamId, NumError> {
        self.glorot(name, &[rows, cols])
    }

    pub fn bias(&mut self, name: &str, cols: usize) -> Result<ParamId, NumError> {
        self.tensor(name, Tensor::zeros(&[1, cols]))
    }

    pub fn store(&mut self) -> &mut ParamStore {
        self.store
    }
}
