use std::collections::HashMap;

use super::{LabelSet, ModelError};
use crate::features::AttributeSet;

/// Maps features to parameter slots.
///
/// Slots `0..L*L` hold the dense transition matrix, row-major by previous
/// label. State slots follow, assigned in the order attributes were first
/// seen; each retained attribute normally owns one slot per label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureIndex {
    num_labels: usize,
    attrs: Vec<String>,
    attr_ids: HashMap<String, usize>,
    attr_slots: Vec<Vec<(usize, usize)>>,
    total: usize,
}

impl FeatureIndex {
    /// An index with only the transition block.
    pub fn with_labels(num_labels: usize) -> Result<Self, ModelError> {
        if num_labels == 0 {
            return Err(ModelError::EmptyLabelSet);
        }
        Ok(Self {
            num_labels,
            attrs: Vec::new(),
            attr_ids: HashMap::new(),
            attr_slots: Vec::new(),
            total: num_labels * num_labels,
        })
    }

    /// Appends a state slot for `(attr, label)` and returns it.
    pub fn push_state(&mut self, attr: &str, label: usize) -> Result<usize, ModelError> {
        if label >= self.num_labels {
            return Err(ModelError::LabelOutOfRange(label));
        }
        let id = match self.attr_ids.get(attr) {
            Some(&id) => id,
            None => {
                let id = self.attrs.len();
                self.attrs.push(attr.to_string());
                self.attr_ids.insert(attr.to_string(), id);
                self.attr_slots.push(Vec::new());
                id
            }
        };
        if self.attr_slots[id].iter().any(|&(y, _)| y == label) {
            return Err(ModelError::DuplicateFeature(attr.to_string()));
        }
        let slot = self.total;
        self.attr_slots[id].push((label, slot));
        self.total += 1;
        Ok(slot)
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    /// Total parameter count.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn num_attributes(&self) -> usize {
        self.attrs.len()
    }

    pub fn transition_slot(&self, from: usize, to: usize) -> usize {
        from * self.num_labels + to
    }

    pub fn attr_id(&self, attr: &str) -> Option<usize> {
        self.attr_ids.get(attr).copied()
    }

    pub fn attribute(&self, id: usize) -> &str {
        &self.attrs[id]
    }

    /// `(label, slot)` pairs owned by an attribute.
    pub fn state_slots(&self, attr_id: usize) -> &[(usize, usize)] {
        &self.attr_slots[attr_id]
    }

    pub fn state_slot(&self, attr: &str, label: usize) -> Option<usize> {
        let id = self.attr_id(attr)?;
        self.attr_slots[id]
            .iter()
            .find(|&&(y, _)| y == label)
            .map(|&(_, s)| s)
    }

    /// Indexed attribute ids of an attribute set; unknown attributes are dropped.
    pub fn resolve(&self, attrs: &AttributeSet) -> Vec<usize> {
        attrs.iter().filter_map(|a| self.attr_id(a)).collect()
    }
}

/// Builds the feature index for a labeled training set.
///
/// Every attribute occurring at least `cutoff` times is conjoined with every
/// label; all `L*L` transitions get a slot.
pub fn index_features(
    sentences: &[Vec<AttributeSet>],
    labels: &LabelSet,
    cutoff: usize,
) -> Result<FeatureIndex, ModelError> {
    if sentences.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    if cutoff == 0 {
        return Err(ModelError::InvalidCutoff);
    }
    let mut order: Vec<&str> = Vec::new();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for attr in sentences.iter().flatten().flat_map(AttributeSet::iter) {
        let count = counts.entry(attr).or_insert(0);
        if *count == 0 {
            order.push(attr);
        }
        *count += 1;
    }

    let mut index = FeatureIndex::with_labels(labels.len())?;
    for attr in order {
        if counts[attr] >= cutoff {
            for y in 0..labels.len() {
                index.push_state(attr, y)?;
            }
        }
    }
    Ok(index)
}
