//! Mixed-model instance specs: seeded synthesis on top of a base `.alb`
//! file, TOML persistence, and conversion into a solvable instance.
//!
//! The generator draws, in order: per-model per-task time factors uniform
//! in [0.8, 1.2], raw production-level weights, task zones uniform in
//! 1..=4, and a symmetric displacement matrix with zero diagonal and
//! off-diagonal entries uniform in [0, 5% of the cycle time]. Production
//! levels are normalized to sum to the plan size with every model at
//! least 1. Everything is a pure function of the seed.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};
use swarmline_core::balancing::{
    build_mean_model, BalancingError, BalancingInstance, ModelData, NUM_ZONES,
};
use thiserror::Error;

use crate::alb::AlbFile;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("plan size {plan_size} cannot cover {num_models} models at one unit each")]
    PlanTooSmall { plan_size: u32, num_models: usize },
    #[error("num_models must be at least 1")]
    NoModels,
    #[error("spec is not valid TOML: {0}")]
    Toml(String),
    #[error("malformed spec: {0}")]
    Shape(String),
    #[error(transparent)]
    Instance(#[from] BalancingError),
}

/// The base single-model problem, embedded so a spec file is
/// self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseSection {
    pub num_tasks: usize,
    pub task_times: Vec<u64>,
    pub precedence: Vec<(usize, usize)>,
    pub cycle_time: f64,
}

/// The synthesized mixed-model layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedSection {
    pub production_levels: Vec<u32>,
    pub zones: Vec<usize>,
    pub displacement: Vec<Vec<f64>>,
    pub model_time_factors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedModelSpec {
    pub name: String,
    pub generator_seed: u64,
    pub plan_size: u32,
    pub base: BaseSection,
    pub mixed: MixedSection,
}

impl MixedModelSpec {
    pub fn num_models(&self) -> usize {
        self.mixed.production_levels.len()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec structs serialize to TOML")
    }

    pub fn from_toml(text: &str) -> Result<Self, SpecError> {
        toml::from_str(text).map_err(|e| SpecError::Toml(e.to_string()))
    }

    fn validate_shape(&self) -> Result<(), SpecError> {
        let num_tasks = self.base.num_tasks;
        if self.base.task_times.len() != num_tasks {
            return Err(SpecError::Shape(format!(
                "expected {num_tasks} base task times, got {}",
                self.base.task_times.len()
            )));
        }
        if self.mixed.model_time_factors.len() != self.num_models() {
            return Err(SpecError::Shape(format!(
                "expected {} factor rows, got {}",
                self.num_models(),
                self.mixed.model_time_factors.len()
            )));
        }
        if let Some(row) = self
            .mixed
            .model_time_factors
            .iter()
            .find(|row| row.len() != num_tasks)
        {
            return Err(SpecError::Shape(format!(
                "factor row has {} entries, expected {num_tasks}",
                row.len()
            )));
        }
        let square = self.mixed.displacement.len() == NUM_ZONES
            && self
                .mixed
                .displacement
                .iter()
                .all(|row| row.len() == NUM_ZONES);
        if !square {
            return Err(SpecError::Shape(format!(
                "displacement matrix must be {NUM_ZONES}x{NUM_ZONES}"
            )));
        }
        let plan: u64 = self
            .mixed
            .production_levels
            .iter()
            .map(|&p| p as u64)
            .sum();
        if plan != self.plan_size as u64 {
            return Err(SpecError::Shape(format!(
                "production levels sum to {plan}, plan_size says {}",
                self.plan_size
            )));
        }
        Ok(())
    }

    /// Materializes the solvable instance: per-model task times are the
    /// base times scaled by the drawn factors, the mean model averages
    /// them by production level.
    pub fn to_instance(&self, max_workplaces: usize) -> Result<BalancingInstance, SpecError> {
        self.validate_shape()?;
        let models: Vec<ModelData> = self
            .mixed
            .model_time_factors
            .iter()
            .zip(&self.mixed.production_levels)
            .map(|(factors, &level)| ModelData {
                task_times: self
                    .base
                    .task_times
                    .iter()
                    .zip(factors)
                    .map(|(&base, factor)| base as f64 * factor)
                    .collect(),
                production_level: level,
            })
            .collect();
        let per_model_precedence: Vec<Vec<(usize, usize)>> =
            vec![self.base.precedence.clone(); models.len()];
        let (mean_times, joint) = build_mean_model(&models, &per_model_precedence)?;
        let mut displacement = [[0.0; NUM_ZONES]; NUM_ZONES];
        for (i, row) in self.mixed.displacement.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                displacement[i][j] = value;
            }
        }
        Ok(BalancingInstance::new(
            self.base.num_tasks,
            joint,
            mean_times,
            self.mixed.zones.clone(),
            displacement,
            self.base.cycle_time,
            max_workplaces,
            models,
        )?)
    }
}

/// Distributes `plan_size` units over weights so every model gets at
/// least one; remainders go to the largest fractional shares, ties to the
/// lower index.
fn normalize_levels(weights: &[f64], plan_size: u32) -> Vec<u32> {
    let num_models = weights.len() as u32;
    let remaining = plan_size - num_models;
    let total: f64 = weights.iter().sum();
    let shares: Vec<f64> = weights
        .iter()
        .map(|w| w / total * remaining as f64)
        .collect();
    let mut levels: Vec<u32> = shares.iter().map(|&s| 1 + s.floor() as u32).collect();
    let assigned: u32 = levels.iter().sum();
    let mut leftover = plan_size - assigned;
    let mut by_fraction: Vec<usize> = (0..weights.len()).collect();
    by_fraction.sort_by(|&a, &b| {
        let fa = shares[a] - shares[a].floor();
        let fb = shares[b] - shares[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in by_fraction.iter().cycle() {
        if leftover == 0 {
            break;
        }
        levels[i] += 1;
        leftover -= 1;
    }
    levels
}

/// Seeded synthesis of a mixed-model spec from a base instance.
pub fn generate_mixed_model(
    base: &AlbFile,
    num_models: usize,
    plan_size: u32,
    seed: u64,
    name: impl Into<String>,
) -> Result<MixedModelSpec, SpecError> {
    if num_models == 0 {
        return Err(SpecError::NoModels);
    }
    if (plan_size as usize) < num_models {
        return Err(SpecError::PlanTooSmall {
            plan_size,
            num_models,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_tasks = base.num_tasks;

    let model_time_factors: Vec<Vec<f64>> = (0..num_models)
        .map(|_| (0..num_tasks).map(|_| rng.random_range(0.8..1.2)).collect())
        .collect();
    let weights: Vec<f64> = (0..num_models).map(|_| rng.random_range(0.0..1.0)).collect();
    let production_levels = normalize_levels(&weights, plan_size);
    let zones: Vec<usize> = (0..num_tasks)
        .map(|_| rng.random_range(1..=NUM_ZONES))
        .collect();
    let mut displacement = vec![vec![0.0; NUM_ZONES]; NUM_ZONES];
    for i in 0..NUM_ZONES {
        for j in (i + 1)..NUM_ZONES {
            let time = rng.random_range(0.0..0.05 * base.cycle_time);
            displacement[i][j] = time;
            displacement[j][i] = time;
        }
    }

    Ok(MixedModelSpec {
        name: name.into(),
        generator_seed: seed,
        plan_size,
        base: BaseSection {
            num_tasks,
            task_times: base.task_times.clone(),
            precedence: base.precedence.clone(),
            cycle_time: base.cycle_time,
        },
        mixed: MixedSection {
            production_levels,
            zones,
            displacement,
            model_time_factors,
        },
    })
}
