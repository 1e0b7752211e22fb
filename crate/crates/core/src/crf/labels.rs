use std::collections::HashMap;

use super::ModelError;
use crate::corpus::Corpus;

/// The label alphabet. Indices are stable for the lifetime of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    labels: Vec<String>,
    ids: HashMap<String, usize>,
}

impl LabelSet {
    pub fn new<I, S>(labels: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(ModelError::EmptyLabelSet);
        }
        let mut ids = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.contains(['\t', '\r', '\n']) {
                return Err(ModelError::InvalidLabel(label.clone()));
            }
            if ids.insert(label.clone(), i).is_some() {
                return Err(ModelError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels, ids })
    }

    /// Sorted distinct POS labels of a corpus; unlabeled tokens are skipped.
    pub fn from_corpus(corpus: &Corpus) -> Result<Self, ModelError> {
        let mut labels: Vec<&str> = corpus
            .sentences
            .iter()
            .flat_map(|s| s.tokens().iter().filter_map(|t| t.pos()))
            .collect();
        labels.sort_unstable();
        labels.dedup();
        Self::new(labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.ids.get(label).copied()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    /// Maps label strings to indices.
    pub fn encode<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, ModelError> {
        labels
            .iter()
            .map(|l| {
                self.id(l.as_ref())
                    .ok_or_else(|| ModelError::UnknownLabel(l.as_ref().to_string()))
            })
            .collect()
    }
}
