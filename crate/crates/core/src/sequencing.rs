//! Mixed-model sequencing on a paced line with closed stations.
//!
//! Jobs launch one cycle-time unit apart. Each workplace is a closed
//! station of length `L` (in cycle-time units): work on job `i` cannot
//! start before the job arrives, cannot start before the previous job is
//! released, and must stop when the job crosses the downstream border at
//! `i - 1 + L`. Whatever remains unfinished at the border is utility work
//! and simply vanishes from the line.

use crate::balancing::{BalancingInstance, BalancingSolution, ModelData};
use crate::encoding::{multiple_random_keys_decode, EncodingError, ModelSequence};

/// Per-model, per-workplace process times in cycle-time units, with the
/// production plan they serve. The launch interval is fixed at one unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SequencingInstance {
    pub num_workplaces: usize,
    pub station_length: f64,
    /// `process_time[model0][workplace]`, cycle-time units.
    pub process_time: Vec<Vec<f64>>,
    pub production_levels: Vec<u32>,
}

impl SequencingInstance {
    pub fn total_jobs(&self) -> usize {
        self.production_levels.iter().map(|&p| p as usize).sum()
    }
}

/// Full start/finish/completed-work schedule of one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceEvaluation {
    /// `start[job][workplace]`.
    pub start: Vec<Vec<f64>>,
    pub finish: Vec<Vec<f64>>,
    pub completed: Vec<Vec<f64>>,
    pub total_completed_work: f64,
    pub total_workload: f64,
}

/// Derives a sequencing instance from a decoded balancing: the process
/// time of model `m` at workplace `k` is the sum of that model's times
/// over the tasks assigned to `k`, plus the workplace's displacement
/// charges, normalized to cycle-time units.
pub fn derive_process_times(
    balance: &BalancingSolution,
    models: &[ModelData],
    instance: &BalancingInstance,
    station_length: f64,
) -> SequencingInstance {
    let cycle_time = instance.cycle_time();
    let process_time = models
        .iter()
        .map(|model| {
            balance
                .workplaces
                .iter()
                .map(|workplace| {
                    let task_sum: f64 = workplace
                        .tasks
                        .iter()
                        .map(|&task0| model.task_times[task0])
                        .sum();
                    (task_sum + workplace.displacement_time) / cycle_time
                })
                .collect()
        })
        .collect();
    SequencingInstance {
        num_workplaces: balance.num_workplaces(),
        station_length,
        process_time,
        production_levels: models.iter().map(|m| m.production_level).collect(),
    }
}

/// Core recursion shared by the full and totals-only evaluations. Calls
/// `cell` for every (job, workplace) with (start, finish, completed).
fn schedule<F: FnMut(usize, usize, f64, f64, f64)>(
    seq: &ModelSequence,
    inst: &SequencingInstance,
    mut cell: F,
) {
    let length = inst.station_length;
    let mut prev_finish = vec![0.0; inst.num_workplaces];
    for (i, &model) in seq.slots.iter().enumerate() {
        let launch = i as f64;
        let times = &inst.process_time[model - 1];
        for (k, prev) in prev_finish.iter_mut().enumerate() {
            let p = times[k];
            let start = launch.max(*prev);
            let finish = (start + p).min(launch + length);
            let completed = p.min(length + launch - start).max(0.0);
            *prev = finish;
            cell(i, k, start, finish, completed);
        }
    }
}

/// Evaluates a sequence: start times `s_ik = max(i-1, f_(i-1)k)`, finishes
/// capped at the station border, and completed work
/// `v_ik = min(p, L + i - 1 - s_ik)` floored at zero.
pub fn evaluate_sequence(seq: &ModelSequence, inst: &SequencingInstance) -> SequenceEvaluation {
    let jobs = seq.slots.len();
    let k = inst.num_workplaces;
    let mut start = vec![vec![0.0; k]; jobs];
    let mut finish = vec![vec![0.0; k]; jobs];
    let mut completed = vec![vec![0.0; k]; jobs];
    let mut total_completed = 0.0;
    let mut total_workload = 0.0;
    schedule(seq, inst, |i, kk, s, f, v| {
        start[i][kk] = s;
        finish[i][kk] = f;
        completed[i][kk] = v;
        total_completed += v;
        total_workload += inst.process_time[seq.slots[i] - 1][kk];
    });
    SequenceEvaluation {
        start,
        finish,
        completed,
        total_completed_work: total_completed,
        total_workload,
    }
}

/// Completed work and workload without materializing the schedule.
pub fn evaluate_totals(seq: &ModelSequence, inst: &SequencingInstance) -> (f64, f64) {
    let mut total_completed = 0.0;
    let mut total_workload = 0.0;
    schedule(seq, inst, |i, kk, _s, _f, v| {
        total_completed += v;
        total_workload += inst.process_time[seq.slots[i] - 1][kk];
    });
    (total_completed, total_workload)
}

/// The maximized sequencing objective: total completed work.
pub fn completed_work(evaluation: &SequenceEvaluation) -> f64 {
    evaluation.total_completed_work
}

/// Fitness of a raw position: decode through multiple random keys, then
/// total completed work.
pub fn sequencing_fitness(
    position: &[f64],
    inst: &SequencingInstance,
) -> Result<f64, EncodingError> {
    let seq = multiple_random_keys_decode(position, &inst.production_levels)?;
    Ok(evaluate_totals(&seq, inst).0)
}
