//! Fish school search: the vanilla algorithm plus the stagnation
//! avoidance (SAR) and not-penalizing-static-success (NPSS) variants.
//!
//! One iteration runs four operators in order: individual movement,
//! feeding, collective-instinctive movement, collective-volitive
//! movement. Movement steps decay linearly to zero over the run.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use super::{distance, validate_population, ConfigError, Evaluation, RunTracker, SearchResult};
use crate::space::SearchSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FssVariant {
    Vanilla,
    Sar,
    NpssSar,
}

impl FssVariant {
    /// Worsening moves may be accepted with probability alpha.
    pub fn has_sar(self) -> bool {
        matches!(self, FssVariant::Sar | FssVariant::NpssSar)
    }

    /// Weights come from the absolute min-max formula instead of the
    /// incremental one.
    pub fn uses_npss_feeding(self) -> bool {
        matches!(self, FssVariant::NpssSar)
    }
}

#[derive(Debug, Clone)]
pub struct FssConfig {
    pub space: SearchSpace,
    pub school_size: usize,
    pub max_iterations: usize,
    pub w_scale: f64,
    /// Initial individual step as a fraction of the search-space width.
    pub step_ind_initial_fraction: f64,
    /// Initial volitive step as a fraction of the search-space width.
    pub step_vol_initial_fraction: f64,
    pub variant: FssVariant,
    pub sar_alpha0: f64,
    pub sar_decay_rate: f64,
    pub rng_seed: u64,
    /// Improvements larger than this advance the convergence marker.
    pub iuc_threshold: f64,
}

impl FssConfig {
    /// Benchmark defaults: W_scale 10000, both steps 20% of the width,
    /// 30 fish, 1000 iterations, alpha schedule 0.8 e^(-0.007 t).
    pub fn defaults(space: SearchSpace, variant: FssVariant, rng_seed: u64) -> Self {
        Self {
            space,
            school_size: 30,
            max_iterations: 1000,
            w_scale: 10_000.0,
            step_ind_initial_fraction: 0.2,
            step_vol_initial_fraction: 0.2,
            variant,
            sar_alpha0: 0.8,
            sar_decay_rate: 0.007,
            rng_seed,
            iuc_threshold: 1e-4,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        validate_population(self.school_size, self.max_iterations)?;
        if self.w_scale.is_nan() || self.w_scale <= 1.0 {
            return Err(ConfigError::InvalidWScale(self.w_scale));
        }
        for fraction in [self.step_ind_initial_fraction, self.step_vol_initial_fraction] {
            if fraction.is_nan() || fraction <= 0.0 || fraction > 1.0 {
                return Err(ConfigError::InvalidStepFraction(fraction));
            }
        }
        if !(0.0..=1.0).contains(&self.sar_alpha0) {
            return Err(ConfigError::InvalidAlpha(self.sar_alpha0));
        }
        Ok(())
    }
}

/// A successful move: the displacement taken and the individual step in
/// effect at that time. Needed by the NPSS fake-displacement rule.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordedMove {
    pub displacement: Vec<f64>,
    pub step_ind: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fish {
    pub position: Vec<f64>,
    pub fitness: f64,
    pub weight: f64,
    /// Displacement of this iteration's individual movement; zero when the
    /// move was rejected.
    pub last_displacement: Vec<f64>,
    /// Fitness delta of this iteration's individual movement; zero when
    /// rejected.
    pub last_fitness_delta: f64,
    /// Whether this iteration's individual movement strictly improved.
    pub improved: bool,
    /// Weight delta applied by this iteration's feeding.
    pub weight_delta: f64,
    /// Most recent accepted move across all iterations.
    pub last_move: Option<RecordedMove>,
}

impl Fish {
    pub fn new(position: Vec<f64>, weight: f64) -> Self {
        let dims = position.len();
        Self {
            position,
            fitness: f64::NEG_INFINITY,
            weight,
            last_displacement: vec![0.0; dims],
            last_fitness_delta: 0.0,
            improved: false,
            weight_delta: 0.0,
            last_move: None,
        }
    }
}

/// Worsening-acceptance probability at iteration `t`: `alpha0 e^(-rate t)`.
pub fn sar_alpha(t: usize, alpha0: f64, rate: f64) -> f64 {
    alpha0 * (-rate * t as f64).exp()
}

/// Linear step decay: `initial (1 - t/it_max)`, floored at zero.
pub fn step_schedule(initial: f64, t: usize, it_max: usize) -> f64 {
    (initial * (1.0 - t as f64 / it_max as f64)).max(0.0)
}

/// Candidate position for one individual move: `position + draws[d] * step_ind`
/// componentwise, clamped into the space. `draws` come from rand(-1, 1).
pub fn individual_candidate(
    position: &[f64],
    draws: &[f64],
    step_ind: f64,
    space: &SearchSpace,
) -> Vec<f64> {
    let mut candidate: Vec<f64> = position
        .iter()
        .zip(draws)
        .map(|(x, d)| x + d * step_ind)
        .collect();
    space.clamp(&mut candidate);
    candidate
}

/// Individual movement with the random draws made explicit: one rand(-1,1)
/// per dimension in `draws`, and a lazily evaluated rand(0,1) for the SAR
/// worsening check. The SAR draw is consumed only when the candidate does
/// not improve and `alpha > 0`, so an `alpha` of zero reproduces the
/// vanilla acceptance rule draw-for-draw.
pub fn individual_movement_with_draws(
    fish: &mut Fish,
    step_ind: f64,
    alpha: f64,
    space: &SearchSpace,
    fitness_fn: &mut dyn FnMut(&[f64]) -> f64,
    draws: &[f64],
    sar_draw: impl FnOnce() -> f64,
) {
    let candidate = individual_candidate(&fish.position, draws, step_ind, space);
    let candidate_fitness = fitness_fn(&candidate);
    let improved = candidate_fitness > fish.fitness;
    let accepted = improved || (alpha > 0.0 && sar_draw() < alpha);
    if accepted {
        let displacement: Vec<f64> = candidate
            .iter()
            .zip(&fish.position)
            .map(|(c, p)| c - p)
            .collect();
        fish.last_fitness_delta = candidate_fitness - fish.fitness;
        fish.position = candidate;
        fish.fitness = candidate_fitness;
        if improved {
            // Only successful moves seed the NPSS fake displacement; a
            // worsening move accepted through SAR is not a success.
            fish.last_move = Some(RecordedMove {
                displacement: displacement.clone(),
                step_ind,
            });
        }
        fish.last_displacement = displacement;
    } else {
        fish.last_displacement.iter_mut().for_each(|d| *d = 0.0);
        fish.last_fitness_delta = 0.0;
    }
    fish.improved = improved;
}

/// Individual movement operator: local search around the fish, accepted
/// when it improves fitness or, under SAR, with probability `alpha`.
pub fn individual_movement<R: Rng + ?Sized>(
    fish: &mut Fish,
    step_ind: f64,
    alpha: f64,
    space: &SearchSpace,
    fitness_fn: &mut dyn FnMut(&[f64]) -> f64,
    rng: &mut R,
) {
    let draws: Vec<f64> = (0..fish.position.len())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    individual_movement_with_draws(fish, step_ind, alpha, space, fitness_fn, &draws, || {
        rng.random_range(0.0..1.0)
    });
}

/// Incremental feeding: each weight moves by its fitness delta normalized
/// by the school's largest absolute delta, clamped into [1, w_scale].
/// When no fish changed fitness all weights stay put.
pub fn feed_vanilla(school: &mut [Fish], w_scale: f64) {
    let max_abs_delta = school
        .iter()
        .map(|f| f.last_fitness_delta.abs())
        .fold(0.0, f64::max);
    for fish in school.iter_mut() {
        let before = fish.weight;
        if max_abs_delta > 0.0 {
            fish.weight =
                (fish.weight + fish.last_fitness_delta / max_abs_delta).clamp(1.0, w_scale);
        }
        fish.weight_delta = fish.weight - before;
    }
}

/// Absolute feeding: weights follow the fish's standing between the worst
/// and best fitness seen during the whole run. A degenerate range pins
/// every weight to the midpoint.
pub fn feed_npss(school: &mut [Fish], w_scale: f64, fitness_min: f64, fitness_max: f64) {
    for fish in school.iter_mut() {
        let before = fish.weight;
        let ratio = if fitness_max > fitness_min {
            (fish.fitness - fitness_min) / (fitness_max - fitness_min)
        } else {
            0.5
        };
        fish.weight = (1.0 + (w_scale - 1.0) * ratio).clamp(1.0, w_scale);
        fish.weight_delta = fish.weight - before;
    }
}

/// Stand-in contribution for a fish that did not improve this iteration:
/// its last successful displacement rescaled from the individual step to
/// the current volitive step, and a weight delta proportional to how much
/// weight the fish has accumulated. A fish that never moved contributes
/// nothing.
pub fn npss_fake_contribution(
    fish: &Fish,
    step_vol: f64,
    max_weight_delta: f64,
    w_scale: f64,
) -> (Vec<f64>, f64) {
    match &fish.last_move {
        None => (vec![0.0; fish.position.len()], 0.0),
        Some(recorded) => {
            let displacement = if recorded.step_ind > 0.0 {
                recorded
                    .displacement
                    .iter()
                    .map(|d| step_vol * d / recorded.step_ind)
                    .collect()
            } else {
                vec![0.0; fish.position.len()]
            };
            let weight_delta = max_weight_delta * (fish.weight - 1.0) / (w_scale - 1.0);
            (displacement, weight_delta)
        }
    }
}

/// Collective-instinctive movement: every fish shifts by the school's
/// delta-weighted average displacement. Vanilla averages over all fish,
/// SAR over the improved set only, and NPSS-SAR weighs displacements by
/// weight deltas with fake contributions standing in for non-improved
/// fish. A zero denominator moves nobody.
pub fn collective_instinctive(
    school: &mut [Fish],
    variant: FssVariant,
    step_vol: f64,
    w_scale: f64,
    space: &SearchSpace,
) {
    if school.is_empty() {
        return;
    }
    let dims = school[0].position.len();
    let mut numerator = vec![0.0; dims];
    let mut denominator = 0.0;
    let add = |numerator: &mut Vec<f64>, displacement: &[f64], weight: f64| {
        for (n, d) in numerator.iter_mut().zip(displacement) {
            *n += d * weight;
        }
    };
    match variant {
        FssVariant::Vanilla => {
            for fish in school.iter() {
                add(&mut numerator, &fish.last_displacement, fish.last_fitness_delta);
                denominator += fish.last_fitness_delta;
            }
        }
        FssVariant::Sar => {
            for fish in school.iter().filter(|f| f.improved) {
                add(&mut numerator, &fish.last_displacement, fish.last_fitness_delta);
                denominator += fish.last_fitness_delta;
            }
        }
        FssVariant::NpssSar => {
            let max_weight_delta = school
                .iter()
                .filter(|f| f.improved)
                .map(|f| f.weight_delta)
                .fold(0.0, f64::max);
            for fish in school.iter() {
                if fish.improved {
                    add(&mut numerator, &fish.last_displacement, fish.weight_delta);
                    denominator += fish.weight_delta;
                } else {
                    let (displacement, weight_delta) =
                        npss_fake_contribution(fish, step_vol, max_weight_delta, w_scale);
                    add(&mut numerator, &displacement, weight_delta);
                    denominator += weight_delta;
                }
            }
        }
    }
    if denominator == 0.0 {
        return;
    }
    let shift: Vec<f64> = numerator.iter().map(|n| n / denominator).collect();
    for fish in school.iter_mut() {
        for (x, s) in fish.position.iter_mut().zip(&shift) {
            *x += s;
        }
        space.clamp(&mut fish.position);
    }
}

/// Weight-weighted mean position of the school.
pub fn compute_barycenter(school: &[Fish]) -> Vec<f64> {
    let dims = school[0].position.len();
    let mut barycenter = vec![0.0; dims];
    let mut total_weight = 0.0;
    for fish in school {
        for (b, x) in barycenter.iter_mut().zip(&fish.position) {
            *b += x * fish.weight;
        }
        total_weight += fish.weight;
    }
    for b in barycenter.iter_mut() {
        *b /= total_weight;
    }
    barycenter
}

/// Radial move of one fish relative to the barycenter; negative sign
/// contracts, positive expands. `draw` comes from rand(0,1). A fish
/// sitting exactly on the barycenter stays put.
pub fn volitive_step(
    position: &mut [f64],
    barycenter: &[f64],
    step_vol: f64,
    draw: f64,
    contracting: bool,
    space: &SearchSpace,
) {
    let dist = distance(position, barycenter);
    if dist == 0.0 {
        return;
    }
    let sign = if contracting { -1.0 } else { 1.0 };
    let scale = sign * step_vol * draw / dist;
    for (x, b) in position.iter_mut().zip(barycenter) {
        *x += scale * (*x - b);
    }
    space.clamp(position);
}

/// Radial school move around the barycenter, one rand(0,1) per fish.
pub fn volitive_movement<R: Rng + ?Sized>(
    school: &mut [Fish],
    step_vol: f64,
    contracting: bool,
    space: &SearchSpace,
    rng: &mut R,
) {
    let barycenter = compute_barycenter(school);
    for fish in school.iter_mut() {
        let draw = rng.random_range(0.0..1.0);
        volitive_step(
            &mut fish.position,
            &barycenter,
            step_vol,
            draw,
            contracting,
            space,
        );
    }
}

/// Collective-volitive movement: the school contracts toward its
/// barycenter when total weight grew since the previous iteration and
/// expands away from it otherwise.
///
/// The incremental feeding makes the weight total a ratchet of search
/// success, which is what this trigger relies on; the NPSS run loop uses
/// [`volitive_movement`] directly with an improvement-driven trigger
/// because absolute weights carry no such ratchet.
pub fn collective_volitive<R: Rng + ?Sized>(
    school: &mut [Fish],
    step_vol: f64,
    total_weight_prev: f64,
    space: &SearchSpace,
    rng: &mut R,
) {
    let total_weight: f64 = school.iter().map(|f| f.weight).sum();
    volitive_movement(
        school,
        step_vol,
        total_weight > total_weight_prev,
        space,
        rng,
    );
}

/// Run one full fish school search.
///
/// The school is initialized uniformly at random with weights at
/// `w_scale / 2`; each iteration then applies the four operators and
/// re-evaluates the school after the collective moves. Every fitness
/// evaluation feeds the best-so-far tracker and the distinct-solution
/// archive.
pub fn run_fss<F>(
    config: &FssConfig,
    archive_size: usize,
    mut evaluate: F,
) -> Result<SearchResult, ConfigError>
where
    F: FnMut(&[f64]) -> Evaluation,
{
    config.validate()?;
    let space = config.space;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut tracker = RunTracker::new(archive_size, config.iuc_threshold);

    let initial_weight = (config.w_scale / 2.0).clamp(1.0, config.w_scale);
    let mut school: Vec<Fish> = (0..config.school_size)
        .map(|_| Fish::new(space.sample(&mut rng), initial_weight))
        .collect();
    for fish in school.iter_mut() {
        let evaluation = evaluate(&fish.position);
        tracker.observe(&fish.position, &evaluation);
        fish.fitness = evaluation.fitness;
    }
    tracker.record_baseline();

    let step_ind_initial = config.step_ind_initial_fraction * space.width();
    let step_vol_initial = config.step_vol_initial_fraction * space.width();
    let mut total_weight_prev: f64 = school.iter().map(|f| f.weight).sum();

    for t in 0..config.max_iterations {
        let best_before = tracker.best_fitness;
        let step_ind = step_schedule(step_ind_initial, t, config.max_iterations);
        let step_vol = step_schedule(step_vol_initial, t, config.max_iterations);
        let alpha = if config.variant.has_sar() {
            sar_alpha(t, config.sar_alpha0, config.sar_decay_rate)
        } else {
            0.0
        };

        for fish in school.iter_mut() {
            let mut scored = |position: &[f64]| {
                let evaluation = evaluate(position);
                tracker.observe(position, &evaluation);
                evaluation.fitness
            };
            individual_movement(fish, step_ind, alpha, &space, &mut scored, &mut rng);
        }

        if config.variant.uses_npss_feeding() {
            feed_npss(
                &mut school,
                config.w_scale,
                tracker.fitness_min,
                tracker.fitness_max,
            );
        } else {
            feed_vanilla(&mut school, config.w_scale);
        }

        collective_instinctive(&mut school, config.variant, step_vol, config.w_scale, &space);
        // Absolute weights do not accumulate, so for NPSS the exploitation
        // signal is whether anybody found food this iteration.
        let contracting = if config.variant.uses_npss_feeding() {
            school.iter().any(|f| f.improved)
        } else {
            school.iter().map(|f| f.weight).sum::<f64>() > total_weight_prev
        };
        volitive_movement(&mut school, step_vol, contracting, &space, &mut rng);
        total_weight_prev = school.iter().map(|f| f.weight).sum();

        // The collective moves changed positions without re-scoring.
        for fish in school.iter_mut() {
            let evaluation = evaluate(&fish.position);
            tracker.observe(&fish.position, &evaluation);
            fish.fitness = evaluation.fitness;
        }
        tracker.end_iteration(t + 1, best_before);
    }
    Ok(tracker.into_result())
}
