//! Simultaneous assembly line balancing and mixed-model sequencing,
//! solved with fish school search variants and constriction PSO.
//!
//! The crate is organized around the solution flow: continuous swarm
//! optimizers ([`swarm`]) explore a bounded real space, [`encoding`]
//! maps positions to task permutations and model sequences, and the
//! [`balancing`] / [`sequencing`] modules evaluate those discrete
//! solutions. [`pipeline`] wires the two problems together and
//! [`stats`] provides the analysis layer for benchmarking runs.

pub mod balancing;
pub mod encoding;
pub mod pipeline;
pub mod sequencing;
pub mod space;
pub mod stats;
pub mod swarm;

pub use balancing::{BalancingInstance, BalancingSolution, ModelData};
pub use encoding::{ModelSequence, TaskPermutation};
pub use pipeline::{CombinedSolution, OptimizerConfig, PipelineConfig, SelectionMetric};
pub use sequencing::{SequenceEvaluation, SequencingInstance};
pub use space::SearchSpace;
pub use swarm::{Evaluation, FssConfig, FssVariant, PsoConfig, SearchResult};
