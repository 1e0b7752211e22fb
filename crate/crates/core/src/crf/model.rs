use rayon::prelude::*;

use super::{FeatureIndex, LabelSet, Lattice, ModelError};
use crate::corpus::{Corpus, Sentence};
use crate::features::{extract_sentence, AttributeSet, FeatureCatalogue, NormalizationLexicon};

/// A trained tagger: label set, feature index, weights, and the feature
/// configuration used to produce its attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    labels: LabelSet,
    index: FeatureIndex,
    weights: Vec<f64>,
    catalogue: FeatureCatalogue,
    lexicon: NormalizationLexicon,
}

/// Builds a lattice from resolved attribute ids.
pub(crate) fn lattice_from_ids(
    index: &FeatureIndex,
    weights: &[f64],
    positions: &[Vec<usize>],
) -> Result<Lattice, ModelError> {
    let l = index.num_labels();
    let mut state = vec![0.0; positions.len() * l];
    for (t, ids) in positions.iter().enumerate() {
        let row = &mut state[t * l..(t + 1) * l];
        for &id in ids {
            for &(y, slot) in index.state_slots(id) {
                row[y] += weights[slot];
            }
        }
    }
    let trans = weights[..l * l].to_vec();
    Lattice::new(positions.len(), l, state, trans)
}

impl Model {
    pub fn new(
        labels: LabelSet,
        index: FeatureIndex,
        weights: Vec<f64>,
        catalogue: FeatureCatalogue,
        lexicon: NormalizationLexicon,
    ) -> Result<Self, ModelError> {
        if index.num_labels() != labels.len() {
            return Err(ModelError::LabelCountMismatch);
        }
        if weights.len() != index.len() {
            return Err(ModelError::WeightCount {
                expected: index.len(),
                found: weights.len(),
            });
        }
        if !weights.iter().all(|w| w.is_finite()) {
            return Err(ModelError::NonFiniteScore);
        }
        Ok(Self {
            labels,
            index,
            weights,
            catalogue,
            lexicon,
        })
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn index(&self) -> &FeatureIndex {
        &self.index
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn catalogue(&self) -> &FeatureCatalogue {
        &self.catalogue
    }

    pub fn lexicon(&self) -> &NormalizationLexicon {
        &self.lexicon
    }

    /// Attribute sets for a sentence under this model's feature configuration.
    pub fn attributes(&self, sentence: &Sentence) -> Vec<AttributeSet> {
        extract_sentence(sentence, &self.lexicon, &self.catalogue)
    }

    /// State scores sum the weights of indexed attributes; unknown
    /// attributes contribute nothing.
    pub fn build_lattice(&self, attrs: &[AttributeSet]) -> Result<Lattice, ModelError> {
        let ids: Vec<Vec<usize>> = attrs.iter().map(|a| self.index.resolve(a)).collect();
        lattice_from_ids(&self.index, &self.weights, &ids)
    }

    /// `log P(labels | attrs)`.
    pub fn sequence_log_prob<S: AsRef<str>>(
        &self,
        attrs: &[AttributeSet],
        labels: &[S],
    ) -> Result<f64, ModelError> {
        if labels.len() != attrs.len() {
            return Err(ModelError::LengthMismatch {
                attrs: attrs.len(),
                labels: labels.len(),
            });
        }
        let ids = self.labels.encode(labels)?;
        let lattice = self.build_lattice(attrs)?;
        Ok(lattice.path_score(&ids) - lattice.log_partition())
    }

    /// Highest-scoring label indices and their unnormalized score.
    pub fn viterbi(&self, attrs: &[AttributeSet]) -> Result<(Vec<usize>, f64), ModelError> {
        Ok(self.build_lattice(attrs)?.viterbi())
    }

    /// Returns a copy of `sentence` with predicted POS labels.
    pub fn tag_sentence(&self, sentence: &Sentence) -> Sentence {
        let attrs = self.attributes(sentence);
        let (best, _) = self
            .viterbi(&attrs)
            .expect("sentences are nonempty and weights finite");
        let tokens = sentence
            .tokens()
            .iter()
            .zip(best)
            .map(|(tok, y)| {
                tok.with_pos(self.labels.name(y))
                    .expect("label names are validated")
            })
            .collect();
        Sentence::new(tokens).expect("sentence is nonempty")
    }

    /// Tags every sentence; output order follows input order.
    pub fn tag_corpus(&self, corpus: &Corpus) -> Corpus {
        let sentences = corpus
            .sentences
            .par_iter()
            .map(|s| self.tag_sentence(s))
            .collect();
        Corpus::new(sentences, corpus.meta.clone())
    }
}
