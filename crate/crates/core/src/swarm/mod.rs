//! Continuous population-based optimizers over a bounded search space.
//!
//! All optimizers maximize: minimization problems wrap their objective as
//! its negation before reaching this module. A full run is deterministic
//! given its seed.

mod archive;
pub mod fss;
pub mod pso;

pub use archive::SolutionArchive;
pub use fss::{run_fss, Fish, FssConfig, FssVariant};
pub use pso::{run_pso, Particle, PsoConfig};

use thiserror::Error;

use crate::space::SearchSpace;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("school size must be at least 1")]
    EmptySchool,
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error("w_scale must exceed 1 (got {0})")]
    InvalidWScale(f64),
    #[error("step fraction must lie in (0, 1] (got {0})")]
    InvalidStepFraction(f64),
    #[error("sar_alpha0 must lie in [0, 1] (got {0})")]
    InvalidAlpha(f64),
    #[error("constriction factor requires c1 + c2 >= 4 (got {c1} + {c2})")]
    InvalidConstriction { c1: f64, c2: f64 },
}

/// Discrete identity of an evaluated position; the archive treats two
/// positions as the same solution when their keys are equal.
pub type SolutionKey = Vec<u64>;

/// What a fitness callback returns: the (maximization-sense) fitness and
/// the discrete identity of the decoded solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    pub key: SolutionKey,
}

impl Evaluation {
    /// For raw continuous problems the bit pattern of the position itself
    /// serves as the identity.
    pub fn continuous(position: &[f64], fitness: f64) -> Self {
        Self {
            fitness,
            key: position.iter().map(|x| x.to_bits()).collect(),
        }
    }
}

/// One archived solution, best-first in [`SearchResult::archive`].
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub position: Vec<f64>,
    pub fitness: f64,
}

/// Outcome of a full optimizer run.
///
/// `fitness_history[i]` is the best-so-far fitness after iteration `i`
/// (entry 0 covers the initial evaluation), so the sequence is
/// non-decreasing. `iterations_until_convergence` is the last 1-based
/// iteration whose best-so-far improved by more than the configured
/// threshold, 0 when no such iteration exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub iterations_until_convergence: usize,
    pub fitness_history: Vec<f64>,
    pub archive: Vec<ArchiveEntry>,
}

/// Shared per-run bookkeeping: best-so-far, the distinct-solution archive,
/// the running fitness extremes, and the convergence history.
pub(crate) struct RunTracker {
    pub best_fitness: f64,
    pub best_position: Vec<f64>,
    pub fitness_min: f64,
    pub fitness_max: f64,
    archive: SolutionArchive,
    history: Vec<f64>,
    iuc: usize,
    threshold: f64,
}

impl RunTracker {
    pub fn new(archive_capacity: usize, iuc_threshold: f64) -> Self {
        Self {
            best_fitness: f64::NEG_INFINITY,
            best_position: Vec::new(),
            fitness_min: f64::INFINITY,
            fitness_max: f64::NEG_INFINITY,
            archive: SolutionArchive::new(archive_capacity),
            history: Vec::new(),
            iuc: 0,
            threshold: iuc_threshold,
        }
    }

    /// Record one fitness evaluation.
    pub fn observe(&mut self, position: &[f64], evaluation: &Evaluation) {
        self.fitness_min = self.fitness_min.min(evaluation.fitness);
        self.fitness_max = self.fitness_max.max(evaluation.fitness);
        if evaluation.fitness > self.best_fitness {
            self.best_fitness = evaluation.fitness;
            self.best_position = position.to_vec();
        }
        self.archive
            .offer(position, evaluation.fitness, &evaluation.key);
    }

    pub fn record_baseline(&mut self) {
        self.history.push(self.best_fitness);
    }

    /// Close iteration `iteration` (1-based), crediting it as the latest
    /// convergence point when the best-so-far moved past the threshold.
    pub fn end_iteration(&mut self, iteration: usize, best_before: f64) {
        if self.best_fitness - best_before > self.threshold {
            self.iuc = iteration;
        }
        self.history.push(self.best_fitness);
    }

    pub fn into_result(self) -> SearchResult {
        SearchResult {
            best_position: self.best_position,
            best_fitness: self.best_fitness,
            iterations_until_convergence: self.iuc,
            fitness_history: self.history,
            archive: self.archive.into_entries(),
        }
    }
}

/// Common knobs every optimizer run shares.
pub(crate) fn validate_population(size: usize, max_iterations: usize) -> Result<(), ConfigError> {
    if size == 0 {
        return Err(ConfigError::EmptySchool);
    }
    if max_iterations == 0 {
        return Err(ConfigError::NoIterations);
    }
    Ok(())
}

/// Euclidean distance between two equally sized vectors.
pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Defaults from the benchmark setup: bounds [-1000, 1000].
pub fn default_space(dimensions: usize) -> SearchSpace {
    SearchSpace::new(dimensions, -1000.0, 1000.0).expect("static bounds are valid")
}
