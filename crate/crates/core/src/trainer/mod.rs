//! Maximum-likelihood training with an L2 (Gaussian) penalty.

mod lbfgs;
mod objective;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::corpus::Corpus;
use crate::crf::{LabelSet, Model, ModelError};
use crate::features::{FeatureCatalogue, NormalizationLexicon};

pub use lbfgs::{minimize, Iterate, LbfgsParams, Minimum, NonFiniteObjective, StopReason};
pub use objective::{objective_and_gradient, IndexedCorpus, IndexedSentence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("sentence {sentence}, token {token} has no POS label")]
    Unlabeled { sentence: usize, token: usize },
    #[error("objective became non-finite during line search")]
    NonFiniteObjective,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Minimum attribute frequency.
    pub cutoff: usize,
    /// Variance of the Gaussian prior; the penalty is `|w|^2 / (2 * l2_sigma2)`.
    pub l2_sigma2: f64,
    pub max_iterations: usize,
    /// Relative objective change below which training stops.
    pub tolerance: f64,
    pub lbfgs_memory: usize,
    pub worker_count: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            cutoff: 1,
            l2_sigma2: 10.0,
            max_iterations: 200,
            tolerance: 1e-5,
            lbfgs_memory: 10,
            worker_count: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: &str| Err(TrainError::InvalidConfig(msg.to_string()));
        if self.cutoff < 1 {
            return bad("cutoff must be at least 1");
        }
        if !(self.l2_sigma2 > 0.0 && self.l2_sigma2.is_finite()) {
            return bad("sigma2 must be positive and finite");
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad("tolerance must be positive");
        }
        if self.lbfgs_memory < 1 {
            return bad("L-BFGS memory must be at least 1");
        }
        if self.worker_count < 1 {
            return bad("worker count must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub sentences: usize,
    pub tokens: usize,
    pub labels: usize,
    pub parameters: usize,
    pub iterations: usize,
    /// Objective at the all-zero starting point.
    pub initial_objective: f64,
    /// One entry per accepted iteration.
    pub history: Vec<Iterate>,
    pub final_objective: f64,
    pub stop: StopReason,
    pub wall_time: Duration,
}

/// Trains a model on a fully labeled corpus, starting from all-zero weights.
///
/// The result is bit-identical for identical inputs regardless of
/// `worker_count`.
pub fn train(
    corpus: &Corpus,
    lexicon: &NormalizationLexicon,
    catalogue: &FeatureCatalogue,
    config: &TrainConfig,
) -> Result<(Model, TrainReport), TrainError> {
    config.validate()?;
    let start = Instant::now();
    if corpus.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.worker_count)
        .build()
        .map_err(|e| TrainError::InvalidConfig(e.to_string()))?;

    pool.install(|| {
        for (s, sentence) in corpus.sentences.iter().enumerate() {
            if let Some(t) = sentence.tokens().iter().position(|t| t.pos().is_none()) {
                return Err(TrainError::Unlabeled {
                    sentence: s,
                    token: t,
                });
            }
        }
        let labels = LabelSet::from_corpus(corpus)?;
        let data = IndexedCorpus::from_corpus(corpus, labels, lexicon, catalogue, config.cutoff)?;

        let params = LbfgsParams {
            memory: config.lbfgs_memory,
            max_iterations: config.max_iterations,
            tolerance: config.tolerance,
        };
        let sigma2 = config.l2_sigma2;
        let minimum = minimize(
            |w| objective_and_gradient(w, &data, sigma2),
            vec![0.0; data.num_parameters()],
            params,
        )
        .map_err(|NonFiniteObjective| TrainError::NonFiniteObjective)?;

        let final_objective = minimum
            .history
            .last()
            .map_or(minimum.initial.objective, |it| it.objective);
        let report = TrainReport {
            sentences: corpus.len(),
            tokens: data.token_count(),
            labels: data.labels().len(),
            parameters: data.num_parameters(),
            iterations: minimum.history.len(),
            initial_objective: minimum.initial.objective,
            history: minimum.history,
            final_objective,
            stop: minimum.stop,
            wall_time: start.elapsed(),
        };
        let (labels, index) = data.into_parts();
        let model = Model::new(labels, index, minimum.x, *catalogue, lexicon.clone())?;
        Ok((model, report))
    })
}
