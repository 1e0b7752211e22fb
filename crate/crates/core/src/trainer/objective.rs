use rayon::prelude::*;

use super::TrainError;
use crate::corpus::Corpus;
use crate::crf::{index_features, lattice_from_ids, FeatureIndex, LabelSet, ModelError};
use crate::features::{extract_sentence, AttributeSet, FeatureCatalogue, NormalizationLexicon};

/// A training sentence with attributes resolved to index ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedSentence {
    pub attr_ids: Vec<Vec<usize>>,
    pub labels: Vec<usize>,
}

/// Training data bound to a feature index, with empirical feature counts.
#[derive(Debug, Clone)]
pub struct IndexedCorpus {
    labels: LabelSet,
    index: FeatureIndex,
    sentences: Vec<IndexedSentence>,
    empirical: Vec<f64>,
}

impl IndexedCorpus {
    /// Indexes attribute sequences with gold labels; attributes seen fewer
    /// than `cutoff` times get no parameters.
    pub fn from_attributes<S: AsRef<str>>(
        attrs: &[Vec<AttributeSet>],
        gold: &[Vec<S>],
        labels: LabelSet,
        cutoff: usize,
    ) -> Result<Self, TrainError> {
        if attrs.is_empty() {
            return Err(TrainError::EmptyCorpus);
        }
        if gold.len() != attrs.len() {
            return Err(ModelError::LengthMismatch {
                attrs: attrs.len(),
                labels: gold.len(),
            }
            .into());
        }
        let index = index_features(attrs, &labels, cutoff)?;
        let sentences = attrs
            .iter()
            .zip(gold)
            .map(|(seq, ys)| {
                if seq.len() != ys.len() {
                    return Err(TrainError::Model(ModelError::LengthMismatch {
                        attrs: seq.len(),
                        labels: ys.len(),
                    }));
                }
                Ok(IndexedSentence {
                    attr_ids: seq.iter().map(|a| index.resolve(a)).collect(),
                    labels: labels.encode(ys)?,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut empirical = vec![0.0; index.len()];
        for s in &sentences {
            for (t, ids) in s.attr_ids.iter().enumerate() {
                let y = s.labels[t];
                for &id in ids {
                    for &(label, slot) in index.state_slots(id) {
                        if label == y {
                            empirical[slot] += 1.0;
                        }
                    }
                }
                if t > 0 {
                    empirical[index.transition_slot(s.labels[t - 1], y)] += 1.0;
                }
            }
        }

        Ok(Self {
            labels,
            index,
            sentences,
            empirical,
        })
    }

    /// Extracts attributes from a fully labeled corpus and indexes them.
    pub fn from_corpus(
        corpus: &Corpus,
        labels: LabelSet,
        lexicon: &NormalizationLexicon,
        catalogue: &FeatureCatalogue,
        cutoff: usize,
    ) -> Result<Self, TrainError> {
        if corpus.is_empty() {
            return Err(TrainError::EmptyCorpus);
        }
        let mut gold = Vec::with_capacity(corpus.len());
        for (s, sentence) in corpus.sentences.iter().enumerate() {
            let ys = sentence
                .tokens()
                .iter()
                .enumerate()
                .map(|(t, tok)| {
                    tok.pos().ok_or(TrainError::Unlabeled {
                        sentence: s,
                        token: t,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            gold.push(ys);
        }
        let attrs: Vec<Vec<AttributeSet>> = corpus
            .sentences
            .par_iter()
            .map(|s| extract_sentence(s, lexicon, catalogue))
            .collect();
        Self::from_attributes(&attrs, &gold, labels, cutoff)
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn index(&self) -> &FeatureIndex {
        &self.index
    }

    pub fn sentences(&self) -> &[IndexedSentence] {
        &self.sentences
    }

    pub fn num_parameters(&self) -> usize {
        self.index.len()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.labels.len()).sum()
    }

    pub(crate) fn into_parts(self) -> (LabelSet, FeatureIndex) {
        (self.labels, self.index)
    }
}

/// Per-sentence sufficient statistics.
struct SentenceStats {
    log_z: f64,
    gold_score: f64,
    node: Vec<f64>,
    edge_totals: Vec<f64>,
}

fn sentence_stats(index: &FeatureIndex, weights: &[f64], s: &IndexedSentence) -> SentenceStats {
    let lattice = lattice_from_ids(index, weights, &s.attr_ids)
        .expect("finite weights give a finite lattice");
    let marginals = lattice.marginals();
    SentenceStats {
        log_z: marginals.log_partition(),
        gold_score: lattice.path_score(&s.labels),
        edge_totals: marginals.edge_totals(),
        node: marginals.nodes().to_vec(),
    }
}

/// Penalized negative log-likelihood and its gradient.
///
/// ```text
/// value    = sum_s (log Z(x_s) - score(y_s)) + |w|^2 / (2 sigma2)
/// gradient = expected counts - empirical counts + w / sigma2
/// ```
///
/// Sentences are processed in parallel on the current rayon pool; their
/// statistics are folded in sentence order, so the result does not depend on
/// the number of threads.
pub fn objective_and_gradient(
    weights: &[f64],
    corpus: &IndexedCorpus,
    l2_sigma2: f64,
) -> (f64, Vec<f64>) {
    let index = &corpus.index;
    let l = index.num_labels();
    let stats: Vec<SentenceStats> = corpus
        .sentences
        .par_iter()
        .map(|s| sentence_stats(index, weights, s))
        .collect();

    let mut value = 0.0;
    let mut grad = vec![0.0; weights.len()];
    for (s, st) in corpus.sentences.iter().zip(&stats) {
        value += st.log_z - st.gold_score;
        for (t, ids) in s.attr_ids.iter().enumerate() {
            let row = &st.node[t * l..(t + 1) * l];
            for &id in ids {
                for &(y, slot) in index.state_slots(id) {
                    grad[slot] += row[y];
                }
            }
        }
        for (g, e) in grad[..l * l].iter_mut().zip(&st.edge_totals) {
            *g += e;
        }
    }

    let mut norm2 = 0.0;
    for ((g, w), emp) in grad.iter_mut().zip(weights).zip(&corpus.empirical) {
        *g += w / l2_sigma2 - emp;
        norm2 += w * w;
    }
    value += norm2 / (2.0 * l2_sigma2);
    (value, grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(attrs: &[&str]) -> AttributeSet {
        AttributeSet::new(attrs.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn single_token_gradient_by_hand() {
        let labels = LabelSet::new(["y0", "y1"]).unwrap();
        let corpus =
            IndexedCorpus::from_attributes(&[vec![set(&["a"])]], &[vec!["y0"]], labels, 1).unwrap();
        let w = vec![0.0; corpus.num_parameters()];
        let (value, grad) = objective_and_gradient(&w, &corpus, 10.0);
        assert!((value - 2f64.ln()).abs() < 1e-12);
        let s0 = corpus.index().state_slot("a", 0).unwrap();
        let s1 = corpus.index().state_slot("a", 1).unwrap();
        assert!((grad[s0] + 0.5).abs() < 1e-12);
        assert!((grad[s1] - 0.5).abs() < 1e-12);
        // single position: no transition expectations or counts
        assert!(grad[..4].iter().all(|g| *g == 0.0));
    }

    #[test]
    fn penalty_only_at_nonzero_weights() {
        let labels = LabelSet::new(["y0", "y1"]).unwrap();
        let corpus =
            IndexedCorpus::from_attributes(&[vec![set(&["a"])]], &[vec!["y0"]], labels, 1).unwrap();
        let zero = vec![0.0; corpus.num_parameters()];
        let (v0, g0) = objective_and_gradient(&zero, &corpus, 1.0);
        let (v1, g1) = objective_and_gradient(&zero, &corpus, 1e6);
        assert_eq!(v0, v1);
        assert_eq!(g0, g1);
    }

    #[test]
    fn unknown_gold_label() {
        let labels = LabelSet::new(["y0"]).unwrap();
        let err = IndexedCorpus::from_attributes(&[vec![set(&["a"])]], &[vec!["zz"]], labels, 1)
            .unwrap_err();
        assert!(matches!(err, TrainError::Model(_)));
    }
}
