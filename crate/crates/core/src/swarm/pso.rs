//! Constriction-factor particle swarm optimization.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use super::{validate_population, ConfigError, Evaluation, RunTracker, SearchResult};
use crate::space::SearchSpace;

#[derive(Debug, Clone)]
pub struct PsoConfig {
    pub space: SearchSpace,
    pub swarm_size: usize,
    pub max_iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub rng_seed: u64,
    pub iuc_threshold: f64,
}

impl PsoConfig {
    /// Benchmark defaults: c1 = c2 = 2.1, 30 particles, 1000 iterations.
    pub fn defaults(space: SearchSpace, rng_seed: u64) -> Self {
        Self {
            space,
            swarm_size: 30,
            max_iterations: 1000,
            c1: 2.1,
            c2: 2.1,
            rng_seed,
            iuc_threshold: 1e-4,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        validate_population(self.swarm_size, self.max_iterations)?;
        constriction_factor(self.c1, self.c2)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

/// Clerc-Kennedy constriction factor
/// `chi = 2 / |2 - phi - sqrt(phi (phi - 4))|` with `phi = c1 + c2`,
/// defined for `c1 + c2 >= 4`.
pub fn constriction_factor(c1: f64, c2: f64) -> Result<f64, ConfigError> {
    let phi = c1 + c2;
    if phi.is_nan() || phi < 4.0 {
        return Err(ConfigError::InvalidConstriction { c1, c2 });
    }
    Ok(2.0 / (2.0 - phi - (phi * (phi - 4.0)).sqrt()).abs())
}

/// The bracketed velocity update, with the per-dimension random factors
/// made explicit: `chi (v + c1 r1 (pb - x) + c2 r2 (gb - x))`.
#[allow(clippy::too_many_arguments)] // one parameter per formula symbol
pub fn constricted_velocity(
    velocity: &[f64],
    position: &[f64],
    personal_best: &[f64],
    global_best: &[f64],
    chi: f64,
    c1: f64,
    c2: f64,
    r1: &[f64],
    r2: &[f64],
) -> Vec<f64> {
    (0..velocity.len())
        .map(|d| {
            chi * (velocity[d]
                + c1 * r1[d] * (personal_best[d] - position[d])
                + c2 * r2[d] * (global_best[d] - position[d]))
        })
        .collect()
}

/// One constricted step of a single particle: the bracketed update becomes
/// the new velocity, the position advances by it and clamps to the space.
/// One rand(0,1) per dimension for each of r1 and r2.
pub fn step_particle<R: Rng + ?Sized>(
    particle: &mut Particle,
    global_best: &[f64],
    c1: f64,
    c2: f64,
    chi: f64,
    space: &SearchSpace,
    rng: &mut R,
) {
    let dims = global_best.len();
    let r1: Vec<f64> = (0..dims).map(|_| rng.random_range(0.0..1.0)).collect();
    let r2: Vec<f64> = (0..dims).map(|_| rng.random_range(0.0..1.0)).collect();
    particle.velocity = constricted_velocity(
        &particle.velocity,
        &particle.position,
        &particle.best_position,
        global_best,
        chi,
        c1,
        c2,
        &r1,
        &r2,
    );
    for (x, v) in particle.position.iter_mut().zip(&particle.velocity) {
        *x += v;
    }
    space.clamp(&mut particle.position);
}

/// Move every particle one step against a fixed global best. Best
/// positions are refreshed by the caller after re-evaluation.
pub fn pso_update<R: Rng + ?Sized>(
    swarm: &mut [Particle],
    global_best: &[f64],
    c1: f64,
    c2: f64,
    chi: f64,
    space: &SearchSpace,
    rng: &mut R,
) {
    for particle in swarm.iter_mut() {
        step_particle(particle, global_best, c1, c2, chi, space, rng);
    }
}

/// Run one full PSO search. Particles start uniformly at random with zero
/// velocity; the global best refreshes as soon as any particle improves
/// it, so later particles within the same iteration already chase the new
/// attractor.
pub fn run_pso<F>(
    config: &PsoConfig,
    archive_size: usize,
    mut evaluate: F,
) -> Result<SearchResult, ConfigError>
where
    F: FnMut(&[f64]) -> Evaluation,
{
    config.validate()?;
    let space = config.space;
    let chi = constriction_factor(config.c1, config.c2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut tracker = RunTracker::new(archive_size, config.iuc_threshold);

    let mut swarm: Vec<Particle> = (0..config.swarm_size)
        .map(|_| {
            let position = space.sample(&mut rng);
            Particle {
                velocity: vec![0.0; position.len()],
                best_position: position.clone(),
                best_fitness: f64::NEG_INFINITY,
                position,
            }
        })
        .collect();
    for particle in swarm.iter_mut() {
        let evaluation = evaluate(&particle.position);
        tracker.observe(&particle.position, &evaluation);
        particle.best_fitness = evaluation.fitness;
    }
    tracker.record_baseline();
    let mut global_best = tracker.best_position.clone();
    let mut global_best_fitness = tracker.best_fitness;

    for t in 0..config.max_iterations {
        let best_before = tracker.best_fitness;
        for particle in swarm.iter_mut() {
            step_particle(
                particle,
                &global_best,
                config.c1,
                config.c2,
                chi,
                &space,
                &mut rng,
            );
            let evaluation = evaluate(&particle.position);
            tracker.observe(&particle.position, &evaluation);
            if evaluation.fitness > particle.best_fitness {
                particle.best_fitness = evaluation.fitness;
                particle.best_position = particle.position.clone();
            }
            if evaluation.fitness > global_best_fitness {
                global_best_fitness = evaluation.fitness;
                global_best = particle.position.clone();
            }
        }
        tracker.end_iteration(t + 1, best_before);
    }
    Ok(tracker.into_result())
}
