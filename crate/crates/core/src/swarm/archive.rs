//! Bounded archive of the best distinct solutions seen during a run.

use super::{ArchiveEntry, SolutionKey};

#[derive(Debug, Clone)]
struct Stored {
    key: SolutionKey,
    position: Vec<f64>,
    fitness: f64,
}

/// Keeps the `capacity` best solutions with pairwise distinct keys,
/// sorted best-first; ties in fitness go to the earlier discovery.
#[derive(Debug, Clone)]
pub struct SolutionArchive {
    capacity: usize,
    entries: Vec<Stored>,
}

impl SolutionArchive {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: Vec::with_capacity(capacity.min(64)),
        }
    }

    /// Offer one evaluated solution. Duplicate keys and entries that fall
    /// below a full archive's tail are ignored.
    pub fn offer(&mut self, position: &[f64], fitness: f64, key: &SolutionKey) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() == self.capacity
            && fitness < self.entries[self.capacity - 1].fitness
        {
            return;
        }
        // A duplicate key always carries the same fitness (the key is the
        // decoded solution), so the duplicate scan only needs the
        // equal-fitness band.
        if self
            .entries
            .iter()
            .filter(|e| e.fitness == fitness)
            .any(|e| &e.key == key)
        {
            return;
        }
        let at = self.entries.partition_point(|e| e.fitness >= fitness);
        self.entries.insert(
            at,
            Stored {
                key: key.clone(),
                position: position.to_vec(),
                fitness,
            },
        );
        self.entries.truncate(self.capacity);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn into_entries(self) -> Vec<ArchiveEntry> {
        self.entries
            .into_iter()
            .map(|e| ArchiveEntry {
                position: e.position,
                fitness: e.fitness,
            })
            .collect()
    }
}
