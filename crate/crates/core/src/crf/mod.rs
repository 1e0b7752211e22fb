//! Linear-chain conditional random field.
//!
//! A model scores a label sequence `y` for an observation sequence `x` as
//! the sum of state weights (one per attribute firing at a position,
//! conjoined with the label there) and transition weights (one per adjacent
//! label pair). `P(y|x)` is the exponentiated score normalized by the
//! partition function `Z(x)`, which forward-backward computes in log space.

mod index;
mod io;
mod labels;
mod lattice;
mod model;

use thiserror::Error;

pub use index::{index_features, FeatureIndex};
pub use io::{load_model, save_model, MAGIC, VERSION};
pub use labels::LabelSet;
pub use lattice::{log_sum_exp, Lattice, Marginals};
pub use model::Model;

pub(crate) use model::lattice_from_ids;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("label set is empty")]
    EmptyLabelSet,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("invalid label {0:?}")]
    InvalidLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("label index {0} out of range")]
    LabelOutOfRange(usize),
    #[error("duplicate state feature for attribute {0:?}")]
    DuplicateFeature(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("feature cutoff must be at least 1")]
    InvalidCutoff,
    #[error("{labels} labels for {attrs} positions")]
    LengthMismatch { attrs: usize, labels: usize },
    #[error("lattice must have at least one position and one label")]
    EmptyLattice,
    #[error("lattice score arrays have the wrong shape")]
    LatticeShape,
    #[error("non-finite score or weight")]
    NonFiniteScore,
    #[error("label set and feature index disagree on label count")]
    LabelCountMismatch,
    #[error("expected {expected} weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("not a model file")]
    BadMagic,
    #[error("unsupported model version {0}")]
    UnsupportedVersion(String),
    #[error("model file truncated in {0} section")]
    Truncated(&'static str),
    #[error("model line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("model line {line}: non-finite weight")]
    NonFiniteWeight { line: usize },
}
