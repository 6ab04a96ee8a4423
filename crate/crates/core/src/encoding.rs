//! Rank-based mappings from continuous positions to discrete solutions.
//!
//! Both decoders depend only on the ordering of the position components,
//! never on their magnitudes, so any monotone transform of a position
//! decodes to the same discrete solution.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EncodingError {
    #[error("position has {position_len} components but the production plan needs {expected}")]
    LengthMismatch {
        position_len: usize,
        expected: usize,
    },
}

/// A permutation of the task indices `1..=T`.
///
/// `order[j]` is the rank of position component `j` among all components
/// (1 = smallest), which makes `order` itself a permutation: `order[j]`
/// read left to right is the j-th task to consider during assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TaskPermutation {
    pub order: Vec<usize>,
}

impl TaskPermutation {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// A launch sequence: `slots[j]` is the 1-based model launched in position `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelSequence {
    pub slots: Vec<usize>,
}

impl ModelSequence {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

/// Indices of `position` sorted ascending by value, ties by lower index.
fn ascending_indices(position: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..position.len()).collect();
    idx.sort_by(|&a, &b| position[a].total_cmp(&position[b]).then(a.cmp(&b)));
    idx
}

/// Random-keys mapping: the smallest component becomes 1, the second
/// smallest 2, and so on until every component carries a task index.
pub fn random_keys_decode(position: &[f64]) -> TaskPermutation {
    let mut order = vec![0usize; position.len()];
    for (rank, &j) in ascending_indices(position).iter().enumerate() {
        order[j] = rank + 1;
    }
    TaskPermutation { order }
}

/// Multiple random-keys mapping: model 1 claims the `P_1` smallest
/// components, model 2 the next `P_2` smallest, and so on. Claimed
/// components are treated as consumed, which is equivalent to the
/// mask-with-a-large-sentinel formulation but immune to overflow.
pub fn multiple_random_keys_decode(
    position: &[f64],
    production_levels: &[u32],
) -> Result<ModelSequence, EncodingError> {
    let expected: usize = production_levels.iter().map(|&p| p as usize).sum();
    if position.len() != expected {
        return Err(EncodingError::LengthMismatch {
            position_len: position.len(),
            expected,
        });
    }
    let mut slots = vec![0usize; position.len()];
    let mut consumed = ascending_indices(position).into_iter();
    for (model0, &level) in production_levels.iter().enumerate() {
        for _ in 0..level {
            let slot = consumed.next().expect("length validated above");
            slots[slot] = model0 + 1;
        }
    }
    Ok(ModelSequence { slots })
}
