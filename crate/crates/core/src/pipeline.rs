//! The simultaneous solution procedure: solve the balancing problem,
//! keep the n best distinct balancings, solve the sequencing problem for
//! each of them, and return the best combination.

use thiserror::Error;

use crate::balancing::{decode_balancing, BalancingError, BalancingInstance, BalancingSolution};
use crate::encoding::{multiple_random_keys_decode, random_keys_decode, ModelSequence};
use crate::sequencing::{
    derive_process_times, evaluate_sequence, evaluate_totals, SequenceEvaluation,
};
use crate::space::SpaceError;
use crate::swarm::{
    run_fss, run_pso, ConfigError, Evaluation, FssConfig, PsoConfig, SearchResult,
};

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Balancing(#[from] BalancingError),
    #[error("balancing stage found no feasible solution")]
    NoFeasibleBalance,
}

/// Either optimizer family behind one run interface.
#[derive(Debug, Clone)]
pub enum OptimizerConfig {
    Fss(FssConfig),
    Pso(PsoConfig),
}

impl OptimizerConfig {
    pub fn run<F>(&self, archive_size: usize, evaluate: F) -> Result<SearchResult, ConfigError>
    where
        F: FnMut(&[f64]) -> Evaluation,
    {
        match self {
            OptimizerConfig::Fss(config) => run_fss(config, archive_size, evaluate),
            OptimizerConfig::Pso(config) => run_pso(config, archive_size, evaluate),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            OptimizerConfig::Fss(config) => config.rng_seed,
            OptimizerConfig::Pso(config) => config.rng_seed,
        }
    }

    pub fn with_seed(&self, rng_seed: u64) -> Self {
        let mut next = self.clone();
        match &mut next {
            OptimizerConfig::Fss(config) => config.rng_seed = rng_seed,
            OptimizerConfig::Pso(config) => config.rng_seed = rng_seed,
        }
        next
    }

    /// Same settings over a space of different dimensionality.
    pub fn with_dimensions(&self, dimensions: usize) -> Result<Self, SpaceError> {
        let mut next = self.clone();
        match &mut next {
            OptimizerConfig::Fss(config) => {
                config.space = config.space.with_dimensions(dimensions)?;
            }
            OptimizerConfig::Pso(config) => {
                config.space = config.space.with_dimensions(dimensions)?;
            }
        }
        Ok(next)
    }
}

/// How the best balancing/sequencing combination is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMetric {
    #[default]
    CompletedWork,
    CwWlRatio,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub balancing_search: OptimizerConfig,
    pub sequencing_search: OptimizerConfig,
    /// How many distinct balancings feed the sequencing stage.
    pub archive_n: usize,
    pub selection_metric: SelectionMetric,
    /// Workstation length L, in cycle-time units.
    pub station_length: f64,
}

/// One balancing candidate with its sequencing outcome.
#[derive(Debug, Clone)]
pub struct CombinedSolution {
    pub balance: BalancingSolution,
    pub sequence: ModelSequence,
    pub completed_work: f64,
    pub workload: f64,
    pub cw_wl_ratio: f64,
    pub iuc_balancing: usize,
    pub iuc_sequencing: usize,
}

/// Output of [`run_simultaneous`]: the winning combination plus every
/// evaluated candidate in balancing-rank order.
#[derive(Debug, Clone)]
pub struct SimultaneousReport {
    pub best: CombinedSolution,
    pub candidates: Vec<CombinedSolution>,
}

/// Balancing stage output: up to `n` distinct decoded balancings,
/// best-first, plus the stage's convergence iteration.
#[derive(Debug, Clone)]
pub struct BalancingStage {
    pub solutions: Vec<BalancingSolution>,
    pub iterations_until_convergence: usize,
}

fn balancing_evaluation(position: &[f64], instance: &BalancingInstance) -> Evaluation {
    let perm = random_keys_decode(position);
    match decode_balancing(&perm, instance) {
        Ok(solution) => Evaluation {
            fitness: solution.fitness,
            key: solution.assignment_key(),
        },
        Err(_) => Evaluation {
            fitness: f64::NEG_INFINITY,
            key: Vec::new(),
        },
    }
}

/// Runs the configured optimizer over permutation space and returns up to
/// `n` distinct balancings, best-first. Distinctness is judged on the
/// decoded assignment, not the raw position.
pub fn solve_balancing_topn(
    instance: &BalancingInstance,
    config: &OptimizerConfig,
    n: usize,
) -> Result<BalancingStage, PipelineError> {
    let config = config.with_dimensions(instance.num_tasks())?;
    let result = config.run(n, |position| balancing_evaluation(position, instance))?;
    let mut solutions = Vec::with_capacity(result.archive.len());
    for entry in &result.archive {
        if entry.fitness == f64::NEG_INFINITY {
            continue;
        }
        let perm = random_keys_decode(&entry.position);
        solutions.push(decode_balancing(&perm, instance)?);
    }
    Ok(BalancingStage {
        solutions,
        iterations_until_convergence: result.iterations_until_convergence,
    })
}

/// Sequencing outcome for one balancing candidate.
#[derive(Debug, Clone)]
pub struct SequencingOutcome {
    pub sequence: ModelSequence,
    pub evaluation: SequenceEvaluation,
    pub iterations_until_convergence: usize,
}

/// Derives process times from a balancing and optimizes the launch
/// sequence for total completed work.
pub fn solve_sequencing_for(
    balance: &BalancingSolution,
    instance: &BalancingInstance,
    config: &OptimizerConfig,
    station_length: f64,
) -> Result<SequencingOutcome, PipelineError> {
    let seq_instance = derive_process_times(balance, instance.models(), instance, station_length);
    let config = config.with_dimensions(seq_instance.total_jobs())?;
    let levels = seq_instance.production_levels.clone();
    let result = config.run(1, |position| {
        let seq = multiple_random_keys_decode(position, &levels)
            .expect("search dimension matches the production plan");
        let (completed, _) = evaluate_totals(&seq, &seq_instance);
        Evaluation {
            fitness: completed,
            key: seq.slots.iter().map(|&m| m as u64).collect(),
        }
    })?;
    let sequence = multiple_random_keys_decode(&result.best_position, &levels)
        .expect("search dimension matches the production plan");
    let evaluation = evaluate_sequence(&sequence, &seq_instance);
    Ok(SequencingOutcome {
        sequence,
        evaluation,
        iterations_until_convergence: result.iterations_until_convergence,
    })
}

fn metric_of(candidate: &CombinedSolution, metric: SelectionMetric) -> f64 {
    match metric {
        SelectionMetric::CompletedWork => candidate.completed_work,
        SelectionMetric::CwWlRatio => candidate.cw_wl_ratio,
    }
}

/// The full simultaneous flow. Per-candidate sequencing seeds are the
/// configured sequencing seed plus the candidate index, keeping batches
/// reproducible.
pub fn run_simultaneous(
    instance: &BalancingInstance,
    config: &PipelineConfig,
) -> Result<SimultaneousReport, PipelineError> {
    let stage = solve_balancing_topn(instance, &config.balancing_search, config.archive_n)?;
    if stage.solutions.is_empty() {
        return Err(PipelineError::NoFeasibleBalance);
    }
    let base_seed = config.sequencing_search.seed();
    let mut candidates = Vec::with_capacity(stage.solutions.len());
    for (index, balance) in stage.solutions.iter().enumerate() {
        let seq_config = config
            .sequencing_search
            .with_seed(base_seed.wrapping_add(index as u64));
        let outcome =
            solve_sequencing_for(balance, instance, &seq_config, config.station_length)?;
        let completed_work = outcome.evaluation.total_completed_work;
        let workload = outcome.evaluation.total_workload;
        let cw_wl_ratio = if workload > 0.0 {
            completed_work / workload
        } else {
            1.0
        };
        candidates.push(CombinedSolution {
            balance: balance.clone(),
            sequence: outcome.sequence,
            completed_work,
            workload,
            cw_wl_ratio,
            iuc_balancing: stage.iterations_until_convergence,
            iuc_sequencing: outcome.iterations_until_convergence,
        });
    }
    let best_index = candidates
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            metric_of(a, config.selection_metric)
                .partial_cmp(&metric_of(b, config.selection_metric))
                .expect("metrics are finite")
        })
        .map(|(i, _)| i)
        .expect("candidates is non-empty");
    Ok(SimultaneousReport {
        best: candidates[best_index].clone(),
        candidates,
    })
}
