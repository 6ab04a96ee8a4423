//! Batch experiment runner: repeated pipeline runs per algorithm, with
//! grouped-mean ANOVA and pooled confidence intervals over the outputs.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use swarmline_core::pipeline::{
    run_simultaneous, OptimizerConfig, PipelineConfig, PipelineError, SelectionMetric,
};
use swarmline_core::stats::{
    anova_oneway, group_sample_means, pooled_confidence_intervals, AnovaResult,
    ConfidenceInterval, GroupedSamples, StatsError,
};
use swarmline_core::swarm::{default_space, FssConfig, FssVariant, PsoConfig};

use crate::spec::{MixedModelSpec, SpecError};

/// Stage seeds are decoupled so the balancing and sequencing searches of
/// one run never share an RNG stream.
const SEQUENCING_SEED_OFFSET: u64 = 0x5EED_0FF5;

/// Confidence level of every reported interval.
pub const CONFIDENCE: f64 = 0.95;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("unknown algorithm '{0}' (expected fss-v, fss-sar, fss-npss-sar or pso)")]
    UnknownAlgorithm(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// The four benchmarked solution approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    FssVanilla,
    FssSar,
    FssNpssSar,
    Pso,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 4] = [
        AlgorithmKind::FssVanilla,
        AlgorithmKind::FssSar,
        AlgorithmKind::FssNpssSar,
        AlgorithmKind::Pso,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AlgorithmKind::FssVanilla => "fss-v",
            AlgorithmKind::FssSar => "fss-sar",
            AlgorithmKind::FssNpssSar => "fss-npss-sar",
            AlgorithmKind::Pso => "pso",
        }
    }

    /// Optimizer settings for one search stage.
    pub fn optimizer(
        self,
        dimensions: usize,
        population: usize,
        iterations: usize,
        seed: u64,
    ) -> OptimizerConfig {
        let space = default_space(dimensions.max(1));
        match self {
            AlgorithmKind::Pso => OptimizerConfig::Pso(PsoConfig {
                swarm_size: population,
                max_iterations: iterations,
                ..PsoConfig::defaults(space, seed)
            }),
            fss => {
                let variant = match fss {
                    AlgorithmKind::FssVanilla => FssVariant::Vanilla,
                    AlgorithmKind::FssSar => FssVariant::Sar,
                    _ => FssVariant::NpssSar,
                };
                OptimizerConfig::Fss(FssConfig {
                    school_size: population,
                    max_iterations: iterations,
                    ..FssConfig::defaults(space, variant, seed)
                })
            }
        }
    }
}

impl FromStr for AlgorithmKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fss-v" | "vanilla" => Ok(AlgorithmKind::FssVanilla),
            "fss-sar" | "sar" => Ok(AlgorithmKind::FssSar),
            "fss-npss-sar" | "npss-sar" => Ok(AlgorithmKind::FssNpssSar),
            "pso" => Ok(AlgorithmKind::Pso),
            other => Err(ExperimentError::UnknownAlgorithm(other.to_string())),
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Search budgets and line parameters of one batch.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub algorithms: Vec<AlgorithmKind>,
    pub repetitions: usize,
    pub base_seed: u64,
    pub group_size: usize,
    pub school_size: usize,
    pub iterations: usize,
    pub seq_school_size: usize,
    pub seq_iterations: usize,
    pub archive_n: usize,
    pub station_length: f64,
    pub max_workplaces: usize,
    pub selection_metric: SelectionMetric,
}

impl ExperimentConfig {
    /// Paper-style defaults at full scale; trim budgets for desk runs.
    pub fn new(algorithms: Vec<AlgorithmKind>, repetitions: usize, base_seed: u64) -> Self {
        Self {
            algorithms,
            repetitions,
            base_seed,
            group_size: 15,
            school_size: 30,
            iterations: 1000,
            seq_school_size: 30,
            seq_iterations: 1000,
            archive_n: 10,
            station_length: 0.95,
            max_workplaces: 3,
            selection_metric: SelectionMetric::CompletedWork,
        }
    }
}

/// One pipeline run's outputs, one row of the results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub run_id: usize,
    pub algorithm: String,
    pub instance: String,
    pub seed: u64,
    pub completed_work: f64,
    pub workload: f64,
    pub num_workplaces: usize,
    pub iuc_balancing: usize,
    pub iuc_sequencing: usize,
    pub wall_time_ms: u128,
}

/// A run that errored instead of producing a record.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub run_id: usize,
    pub algorithm: String,
    pub error: String,
}

/// Per-algorithm interval for one metric.
#[derive(Debug, Clone)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub sample_count: usize,
    pub interval: ConfidenceInterval,
}

/// ANOVA plus pooled intervals over the grouped means of one metric.
#[derive(Debug, Clone)]
pub struct MetricReport {
    pub metric: &'static str,
    pub anova: AnovaResult,
    pub per_algorithm: Vec<AlgorithmSummary>,
}

#[derive(Debug, Clone)]
pub struct StatsReport {
    pub group_size: usize,
    pub metrics: Vec<MetricReport>,
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub failures: Vec<RunFailure>,
    /// Present when the batch is large and regular enough to analyze:
    /// at least two algorithms, repetitions divisible into at least two
    /// groups, and no failed runs.
    pub stats: Option<StatsReport>,
}

/// (algorithm index, run id, record or failure) of one finished run.
type RunOutcome = (usize, usize, Result<ExperimentRecord, RunFailure>);

fn run_once(
    spec: &MixedModelSpec,
    config: &ExperimentConfig,
    algorithm: AlgorithmKind,
    run_id: usize,
) -> Result<ExperimentRecord, PipelineError> {
    let seed = config.base_seed + run_id as u64;
    let instance = spec
        .to_instance(config.max_workplaces)
        .expect("validated before the batch started");
    let pipeline = PipelineConfig {
        balancing_search: algorithm.optimizer(
            instance.num_tasks(),
            config.school_size,
            config.iterations,
            seed,
        ),
        sequencing_search: algorithm.optimizer(
            spec.plan_size as usize,
            config.seq_school_size,
            config.seq_iterations,
            seed.wrapping_add(SEQUENCING_SEED_OFFSET),
        ),
        archive_n: config.archive_n,
        selection_metric: config.selection_metric,
        station_length: config.station_length,
    };
    let started = Instant::now();
    let report = run_simultaneous(&instance, &pipeline)?;
    let wall_time_ms = started.elapsed().as_millis();
    let best = report.best;
    Ok(ExperimentRecord {
        run_id,
        algorithm: algorithm.label().to_string(),
        instance: spec.name.clone(),
        seed,
        completed_work: best.completed_work,
        workload: best.workload,
        num_workplaces: best.balance.num_workplaces(),
        iuc_balancing: best.iuc_balancing,
        iuc_sequencing: best.iuc_sequencing,
        wall_time_ms,
    })
}

/// Runs `repetitions` pipeline runs per algorithm, seeds `base_seed + run_id`
/// within each algorithm so identical algorithms produce identical columns.
/// Runs execute in parallel; records come back ordered by (algorithm,
/// run_id). Failures are collected, never fatal to the batch.
pub fn run_experiment(
    spec: &MixedModelSpec,
    config: &ExperimentConfig,
) -> Result<ExperimentOutput, ExperimentError> {
    spec.to_instance(config.max_workplaces)?;

    let jobs: Vec<(usize, AlgorithmKind, usize)> = config
        .algorithms
        .iter()
        .enumerate()
        .flat_map(|(algo_index, &algo)| {
            (0..config.repetitions).map(move |run_id| (algo_index, algo, run_id))
        })
        .collect();
    let mut outcomes: Vec<RunOutcome> = jobs
        .par_iter()
        .map(|&(algo_index, algo, run_id)| {
            let outcome = run_once(spec, config, algo, run_id).map_err(|e| RunFailure {
                run_id,
                algorithm: algo.label().to_string(),
                error: e.to_string(),
            });
            (algo_index, run_id, outcome)
        })
        .collect();
    outcomes.sort_by_key(|&(algo_index, run_id, _)| (algo_index, run_id));

    let mut records = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (_, _, outcome) in outcomes {
        match outcome {
            Ok(record) => records.push(record),
            Err(failure) => failures.push(failure),
        }
    }
    let stats = if failures.is_empty() {
        compute_stats(&records, config)?
    } else {
        None
    };
    Ok(ExperimentOutput {
        records,
        failures,
        stats,
    })
}

fn metric_value(record: &ExperimentRecord, metric: &str) -> f64 {
    match metric {
        "CW" => record.completed_work,
        "WL" => record.workload,
        "WP" => record.num_workplaces as f64,
        "CW_WL" => {
            if record.workload > 0.0 {
                record.completed_work / record.workload
            } else {
                1.0
            }
        }
        "IUC_bal" => record.iuc_balancing as f64,
        "IUC_seq" => record.iuc_sequencing as f64,
        _ => unreachable!("metric names are static"),
    }
}

const METRICS: [&str; 6] = ["CW", "WL", "WP", "CW_WL", "IUC_bal", "IUC_seq"];

/// Grouped-means ANOVA and pooled intervals per metric, when the batch
/// shape supports them.
pub fn compute_stats(
    records: &[ExperimentRecord],
    config: &ExperimentConfig,
) -> Result<Option<StatsReport>, ExperimentError> {
    let enough_groups = config.group_size > 0
        && config.repetitions.is_multiple_of(config.group_size)
        && config.repetitions / config.group_size >= 2;
    if config.algorithms.len() < 2 || !enough_groups {
        return Ok(None);
    }
    let mut metrics = Vec::with_capacity(METRICS.len());
    for metric in METRICS {
        let mut groups = Vec::with_capacity(config.algorithms.len());
        for algo in &config.algorithms {
            let raw: Vec<f64> = records
                .iter()
                .filter(|r| r.algorithm == algo.label())
                .map(|r| metric_value(r, metric))
                .collect();
            let means = group_sample_means(&raw, config.group_size)?;
            groups.push((algo.label().to_string(), means));
        }
        let grouped = GroupedSamples::new(groups);
        let anova = anova_oneway(&grouped)?;
        let intervals = pooled_confidence_intervals(&grouped, CONFIDENCE)?;
        let per_algorithm = grouped
            .observations()
            .zip(intervals)
            .map(|((name, means), interval)| AlgorithmSummary {
                algorithm: name.to_string(),
                sample_count: means.len(),
                interval,
            })
            .collect();
        metrics.push(MetricReport {
            metric,
            anova,
            per_algorithm,
        });
    }
    Ok(Some(StatsReport {
        group_size: config.group_size,
        metrics,
    }))
}
