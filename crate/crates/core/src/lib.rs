//! # mixtag
//!
//! Part-of-speech tagging for code-mixed social media text (Bengali-English,
//! Hindi-English, Telugu-English and the like) with a linear-chain
//! conditional random field.
//!
//! The pipeline:
//!
//! 1. [`corpus`] reads tab-separated token / language-tag / POS files.
//! 2. [`features`] turns each token position into string attributes.
//! 3. [`trainer`] fits state and transition weights by L-BFGS on the
//!    L2-penalized conditional log-likelihood.
//! 4. [`crf`] decodes with Viterbi, computes marginals and persists models.
//! 5. [`eval`] scores predictions per label.
//!
//! ```
//! use mixtag::corpus::{parse_corpus, Schema};
//! use mixtag::features::{FeatureCatalogue, NormalizationLexicon};
//! use mixtag::trainer::{train, TrainConfig};
//!
//! let gold = parse_corpus(
//!     "ami\tbn\tPRP\nkhub\tbn\tJJ\n\nI\ten\tPRP\nam\ten\tV\n",
//!     Schema::Train3Col,
//! )?;
//! let (model, report) = train(
//!     &gold,
//!     &NormalizationLexicon::new(),
//!     &FeatureCatalogue::default(),
//!     &TrainConfig::default(),
//! )?;
//! assert!(report.final_objective < report.initial_objective);
//!
//! let test = parse_corpus("ami\tbn\nkhub\tbn\n", Schema::Test2Col)?;
//! let tagged = model.tag_corpus(&test);
//! assert_eq!(tagged.sentences[0].tokens()[0].pos(), Some("PRP"));
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! A longer guide lives in the `book/` directory of the repository; its code
//! listings are compiled and run as doc-tests of this crate.

pub mod corpus;
pub mod crf;
pub mod eval;
pub mod features;
pub mod trainer;

pub use corpus::{Corpus, Schema, Sentence, Token};
pub use crf::{LabelSet, Lattice, Model};
pub use eval::{evaluate, EvalReport};
pub use features::{AttributeSet, FeatureCatalogue, NormalizationLexicon};
pub use trainer::{train, TrainConfig, TrainReport};

// `cargo test --doc` checks every listing in the book.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/corpus-format.md")]
    mod corpus_format {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/crf.md")]
    mod crf {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/model-format.md")]
    mod model_format {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
