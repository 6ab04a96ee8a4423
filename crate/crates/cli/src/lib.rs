//! Experiment harness around `swarmline-core`: `.alb` ingestion, seeded
//! mixed-model instance synthesis, batch orchestration and CSV reporting.

pub mod alb;
pub mod experiment;
pub mod report;
pub mod spec;

pub use alb::{parse_alb, serialize_alb, AlbError, AlbFile};
pub use experiment::{
    run_experiment, AlgorithmKind, ExperimentConfig, ExperimentOutput, ExperimentRecord,
    StatsReport,
};
pub use report::{read_results_csv, write_results_csv, write_stats_csv, ReportError};
pub use spec::{generate_mixed_model, MixedModelSpec, SpecError};
