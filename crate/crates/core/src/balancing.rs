//! Workplace-time-dependent assembly line balancing with multi-manned
//! workstations.
//!
//! A mixed-model problem is first reduced to a single "mean model" whose
//! task times are production-level-weighted averages and whose precedence
//! graph is the union of the per-model graphs. Task permutations then
//! decode into assignments of tasks to (workstation, workplace) slots,
//! where each workplace is an operator who pays a displacement time
//! whenever consecutive tasks sit in different zones of the workstation.

use thiserror::Error;

use crate::encoding::TaskPermutation;

/// Number of workstation zones (three outside positions plus the product
/// interior).
pub const NUM_ZONES: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum BalancingError {
    #[error("joint precedence graph contains a cycle: {}", format_cycle(.cycle))]
    CyclicPrecedence { cycle: Vec<usize> },
    #[error("production plan is empty: all production levels are zero")]
    ZeroProductionPlan,
    #[error("task {task} needs {time} time units but the cycle time is only {cycle_time}")]
    InfeasibleTask {
        task: usize,
        time: f64,
        cycle_time: f64,
    },
    #[error("expected {expected} {what}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("task {task} has zone {zone}, zones must lie in 1..={NUM_ZONES}")]
    InvalidZone { task: usize, zone: usize },
    #[error("displacement matrix must be non-negative with a zero diagonal")]
    InvalidDisplacement,
    #[error("precedence pair ({pred}, {succ}) references a task outside 1..={num_tasks}")]
    InvalidPrecedencePair {
        pred: usize,
        succ: usize,
        num_tasks: usize,
    },
    #[error("max_workplaces must be at least 1")]
    NoWorkplaces,
}

fn format_cycle(cycle: &[usize]) -> String {
    cycle
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// Task times and production level of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelData {
    pub task_times: Vec<f64>,
    pub production_level: u32,
}

/// A fully validated balancing problem over the mean model.
///
/// Tasks are numbered 1..=T externally; vectors are indexed by `task - 1`.
#[derive(Debug, Clone)]
pub struct BalancingInstance {
    num_tasks: usize,
    precedence_pairs: Vec<(usize, usize)>,
    predecessors: Vec<Vec<usize>>,
    mean_times: Vec<f64>,
    zones: Vec<usize>,
    displacement: [[f64; NUM_ZONES]; NUM_ZONES],
    cycle_time: f64,
    max_workplaces: usize,
    models: Vec<ModelData>,
}

impl BalancingInstance {
    /// Validates and assembles an instance: the precedence relation must be
    /// acyclic and reference valid tasks, zones must lie in 1..=4, the
    /// displacement matrix must be non-negative with a zero diagonal, and
    /// every mean task time must fit within the cycle time.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        num_tasks: usize,
        precedence_pairs: Vec<(usize, usize)>,
        mean_times: Vec<f64>,
        zones: Vec<usize>,
        displacement: [[f64; NUM_ZONES]; NUM_ZONES],
        cycle_time: f64,
        max_workplaces: usize,
        models: Vec<ModelData>,
    ) -> Result<Self, BalancingError> {
        if mean_times.len() != num_tasks {
            return Err(BalancingError::DimensionMismatch {
                what: "mean task times",
                expected: num_tasks,
                got: mean_times.len(),
            });
        }
        if zones.len() != num_tasks {
            return Err(BalancingError::DimensionMismatch {
                what: "task zones",
                expected: num_tasks,
                got: zones.len(),
            });
        }
        if max_workplaces == 0 {
            return Err(BalancingError::NoWorkplaces);
        }
        for (task0, &zone) in zones.iter().enumerate() {
            if !(1..=NUM_ZONES).contains(&zone) {
                return Err(BalancingError::InvalidZone {
                    task: task0 + 1,
                    zone,
                });
            }
        }
        for (i, row) in displacement.iter().enumerate() {
            if row[i] != 0.0 || row.iter().any(|&d| d < 0.0) {
                return Err(BalancingError::InvalidDisplacement);
            }
        }
        for &(pred, succ) in &precedence_pairs {
            let valid = (1..=num_tasks).contains(&pred) && (1..=num_tasks).contains(&succ);
            if !valid {
                return Err(BalancingError::InvalidPrecedencePair {
                    pred,
                    succ,
                    num_tasks,
                });
            }
        }
        if let Some(cycle) = find_cycle(num_tasks, &precedence_pairs) {
            return Err(BalancingError::CyclicPrecedence { cycle });
        }
        for (task0, &time) in mean_times.iter().enumerate() {
            if time > cycle_time {
                return Err(BalancingError::InfeasibleTask {
                    task: task0 + 1,
                    time,
                    cycle_time,
                });
            }
        }
        let mut predecessors = vec![Vec::new(); num_tasks];
        for &(pred, succ) in &precedence_pairs {
            predecessors[succ - 1].push(pred - 1);
        }
        Ok(Self {
            num_tasks,
            precedence_pairs,
            predecessors,
            mean_times,
            zones,
            displacement,
            cycle_time,
            max_workplaces,
            models,
        })
    }

    pub fn num_tasks(&self) -> usize {
        self.num_tasks
    }

    pub fn cycle_time(&self) -> f64 {
        self.cycle_time
    }

    pub fn max_workplaces(&self) -> usize {
        self.max_workplaces
    }

    pub fn mean_times(&self) -> &[f64] {
        &self.mean_times
    }

    pub fn zones(&self) -> &[usize] {
        &self.zones
    }

    pub fn models(&self) -> &[ModelData] {
        &self.models
    }

    pub fn precedence_pairs(&self) -> &[(usize, usize)] {
        &self.precedence_pairs
    }

    /// 0-based predecessor lists, indexed by `task - 1`.
    pub fn predecessors(&self) -> &[Vec<usize>] {
        &self.predecessors
    }

    /// Displacement time for an operator moving from `from_zone` to
    /// `to_zone` (both 1-based).
    pub fn displacement_between(&self, from_zone: usize, to_zone: usize) -> f64 {
        self.displacement[from_zone - 1][to_zone - 1]
    }

    pub fn displacement_matrix(&self) -> &[[f64; NUM_ZONES]; NUM_ZONES] {
        &self.displacement
    }
}

/// One opened workplace: its workstation, the tasks it performs in order
/// (0-based ids), its displacement-corrected load and the displacement
/// share of that load.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkplaceLoad {
    pub station: usize,
    pub tasks: Vec<usize>,
    pub load: f64,
    pub displacement_time: f64,
}

/// A decoded balancing: per-task (workstation, workplace-within-station)
/// slots, both 0-based, plus the opened workplaces in line order.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancingSolution {
    pub assignment: Vec<(usize, usize)>,
    pub workplaces: Vec<WorkplaceLoad>,
    pub num_workstations: usize,
    pub fitness: f64,
}

impl BalancingSolution {
    pub fn num_workplaces(&self) -> usize {
        self.workplaces.len()
    }

    pub fn loads(&self) -> Vec<f64> {
        self.workplaces.iter().map(|w| w.load).collect()
    }

    /// Flattened discrete identity of the assignment, suitable as a
    /// search-archive key.
    pub fn assignment_key(&self) -> Vec<u64> {
        self.assignment
            .iter()
            .flat_map(|&(station, workplace)| [station as u64, workplace as u64])
            .collect()
    }
}

/// Returns one cycle (1-based task ids, first repeated last) if the edge
/// relation has any, `None` when it is acyclic.
pub fn find_cycle(num_nodes: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut successors = vec![Vec::new(); num_nodes];
    for &(pred, succ) in edges {
        successors[pred - 1].push(succ - 1);
    }
    // Iterative DFS with tri-color marking; `on_stack` recovers the cycle.
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Gray,
        Black,
    }
    let mut mark = vec![Mark::White; num_nodes];
    let mut parent = vec![usize::MAX; num_nodes];
    for root in 0..num_nodes {
        if mark[root] != Mark::White {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Gray;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next < successors[node].len() {
                let succ = successors[node][*next];
                *next += 1;
                match mark[succ] {
                    Mark::White => {
                        mark[succ] = Mark::Gray;
                        parent[succ] = node;
                        stack.push((succ, 0));
                    }
                    Mark::Gray => {
                        let mut cycle = vec![succ + 1, node + 1];
                        let mut cursor = node;
                        while cursor != succ {
                            cursor = parent[cursor];
                            cycle.push(cursor + 1);
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    Mark::Black => {}
                }
            } else {
                mark[node] = Mark::Black;
                stack.pop();
            }
        }
    }
    None
}

/// Mean task times plus the joint precedence relation.
pub type MeanModel = (Vec<f64>, Vec<(usize, usize)>);

/// Builds the mean model: production-level-weighted average task times and
/// the union of the per-model precedence relations.
pub fn build_mean_model(
    models: &[ModelData],
    per_model_precedence: &[Vec<(usize, usize)>],
) -> Result<MeanModel, BalancingError> {
    let total: u64 = models.iter().map(|m| m.production_level as u64).sum();
    if total == 0 {
        return Err(BalancingError::ZeroProductionPlan);
    }
    let num_tasks = models.first().map_or(0, |m| m.task_times.len());
    let mut mean_times = vec![0.0; num_tasks];
    for model in models {
        if model.task_times.len() != num_tasks {
            return Err(BalancingError::DimensionMismatch {
                what: "model task times",
                expected: num_tasks,
                got: model.task_times.len(),
            });
        }
        let level = model.production_level as f64;
        for (mean, &time) in mean_times.iter_mut().zip(&model.task_times) {
            *mean += level * time;
        }
    }
    for mean in mean_times.iter_mut() {
        *mean /= total as f64;
    }

    let mut joint: Vec<(usize, usize)> = per_model_precedence
        .iter()
        .flatten()
        .copied()
        .collect();
    joint.sort_unstable();
    joint.dedup();
    if let Some(cycle) = find_cycle(num_tasks, &joint) {
        return Err(BalancingError::CyclicPrecedence { cycle });
    }
    Ok((mean_times, joint))
}

/// Decodes a task permutation into a balancing.
///
/// The permutation is traversed with precedence repair: repeatedly take
/// its earliest element whose predecessors are all assigned. Each task
/// then tries the opened workplaces of the current workstation in index
/// order, opens a fresh workplace while fewer than `max_workplaces` are
/// in use, and otherwise closes the workstation. A task whose predecessor
/// sits in the current workstation may only join that predecessor's
/// workplace; conflicting predecessors on different workplaces push the
/// task into a new workstation. The cost of a task at a workplace is its
/// mean time plus the displacement from the zone of the workplace's
/// previous task.
pub fn decode_balancing(
    perm: &TaskPermutation,
    instance: &BalancingInstance,
) -> Result<BalancingSolution, BalancingError> {
    let num_tasks = instance.num_tasks;
    if perm.len() != num_tasks {
        return Err(BalancingError::DimensionMismatch {
            what: "permutation entries",
            expected: num_tasks,
            got: perm.len(),
        });
    }
    for (task0, &time) in instance.mean_times.iter().enumerate() {
        if time > instance.cycle_time {
            return Err(BalancingError::InfeasibleTask {
                task: task0 + 1,
                time,
                cycle_time: instance.cycle_time,
            });
        }
    }

    // Precedence repair: a min-heap over permutation slots of the ready
    // tasks yields exactly "the earliest ready element" each round.
    let mut slot_of = vec![0usize; num_tasks];
    for (slot, &task) in perm.order.iter().enumerate() {
        slot_of[task - 1] = slot;
    }
    let mut open_preds: Vec<usize> = instance
        .predecessors
        .iter()
        .map(|preds| preds.len())
        .collect();
    let mut successors = vec![Vec::new(); num_tasks];
    for &(pred, succ) in &instance.precedence_pairs {
        successors[pred - 1].push(succ - 1);
    }
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..num_tasks)
        .filter(|&t| open_preds[t] == 0)
        .map(|t| Reverse((slot_of[t], t)))
        .collect();

    let mut assignment = vec![(usize::MAX, usize::MAX); num_tasks];
    let mut workplaces: Vec<WorkplaceLoad> = Vec::new();
    let mut station = 0usize;
    let mut station_first_wp = 0usize; // index into `workplaces`
    let mut last_zone: Vec<usize> = Vec::new(); // aligned with `workplaces`

    while let Some(Reverse((_, task0))) = ready.pop() {
        let time = instance.mean_times[task0];
        let zone = instance.zones[task0];
        loop {
            // A predecessor inside the current workstation pins the task to
            // that predecessor's workplace.
            let mut required: Option<usize> = None;
            let mut conflict = false;
            for &pred0 in &instance.predecessors[task0] {
                let (pred_station, pred_wp) = assignment[pred0];
                if pred_station == station {
                    match required {
                        None => required = Some(pred_wp),
                        Some(wp) if wp != pred_wp => {
                            conflict = true;
                            break;
                        }
                        Some(_) => {}
                    }
                }
            }
            if !conflict {
                let open_count = workplaces.len() - station_first_wp;
                let mut placed = None;
                let (first_wp, last_wp) = match required {
                    Some(wp) => (wp, wp + 1),
                    None => (0, open_count),
                };
                for wp in first_wp..last_wp {
                    let global = station_first_wp + wp;
                    let move_time =
                        instance.displacement_between(last_zone[global], zone);
                    if workplaces[global].load + move_time + time <= instance.cycle_time {
                        placed = Some((wp, global, move_time));
                        break;
                    }
                }
                if let Some((wp, global, move_time)) = placed {
                    workplaces[global].tasks.push(task0);
                    workplaces[global].load += move_time + time;
                    workplaces[global].displacement_time += move_time;
                    last_zone[global] = zone;
                    assignment[task0] = (station, wp);
                    break;
                }
                if required.is_none() && open_count < instance.max_workplaces {
                    // First task on a fresh workplace pays no displacement.
                    workplaces.push(WorkplaceLoad {
                        station,
                        tasks: vec![task0],
                        load: time,
                        displacement_time: 0.0,
                    });
                    last_zone.push(zone);
                    assignment[task0] = (station, open_count);
                    break;
                }
            }
            station += 1;
            station_first_wp = workplaces.len();
        }
        for &succ0 in &successors[task0] {
            open_preds[succ0] -= 1;
            if open_preds[succ0] == 0 {
                ready.push(Reverse((slot_of[succ0], succ0)));
            }
        }
    }

    let num_workstations = workplaces.last().map_or(0, |w| w.station + 1);
    let loads: Vec<f64> = workplaces.iter().map(|w| w.load).collect();
    let fitness = -balancing_objective(&loads, instance.cycle_time);
    Ok(BalancingSolution {
        assignment,
        workplaces,
        num_workstations,
        fitness,
    })
}

/// The minimized balancing objective: `K * sqrt(sum_k (C - t_k)^2)` over
/// the `K` opened workplaces.
pub fn balancing_objective(loads: &[f64], cycle_time: f64) -> f64 {
    let sum_sq: f64 = loads
        .iter()
        .map(|&t| (cycle_time - t) * (cycle_time - t))
        .sum();
    loads.len() as f64 * sum_sq.sqrt()
}

/// Maximization-canonical fitness of a permutation: the negated objective,
/// with infeasible decodes pushed below every feasible value.
pub fn balancing_fitness(perm: &TaskPermutation, instance: &BalancingInstance) -> f64 {
    match decode_balancing(perm, instance) {
        Ok(solution) => solution.fitness,
        Err(_) => f64::NEG_INFINITY,
    }
}
