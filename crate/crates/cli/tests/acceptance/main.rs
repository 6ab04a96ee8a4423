//! Acceptance gate: one test per criterion, each printing a PASS line.
//!
//! Criteria 1-6 and 9 check the solver layers against worked examples and
//! independent oracles; 7, 8 and 10 drive the full experiment harness at
//! desk scale.


use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use swarmline_cli::experiment::{
    run_experiment, AlgorithmKind, ExperimentConfig, ExperimentOutput,
};
use swarmline_cli::report::{read_results_csv, write_results_csv, write_stats_csv};
use swarmline_cli::spec::{generate_mixed_model, MixedModelSpec};
use swarmline_cli::{parse_alb, AlbFile};
use swarmline_core::balancing::{
    balancing_fitness, balancing_objective, build_mean_model, decode_balancing,
    BalancingInstance, ModelData, NUM_ZONES,
};
use swarmline_core::encoding::{
    multiple_random_keys_decode, random_keys_decode, ModelSequence, TaskPermutation,
};
use swarmline_core::pipeline::{
    run_simultaneous, solve_balancing_topn, solve_sequencing_for, OptimizerConfig,
    PipelineConfig, SelectionMetric,
};
use swarmline_core::sequencing::{
    completed_work, derive_process_times, evaluate_sequence, evaluate_totals, sequencing_fitness,
    SequencingInstance,
};
use swarmline_core::stats::{
    anova_oneway, group_sample_means, pooled_confidence_intervals, t_quantile, GroupedSamples,
};
use swarmline_core::swarm::fss::{
    collective_instinctive, compute_barycenter, feed_npss, feed_vanilla,
    individual_movement_with_draws, npss_fake_contribution, sar_alpha, step_schedule,
    volitive_step, Fish, FssVariant, RecordedMove,
};
use swarmline_core::swarm::pso::{constricted_velocity, constriction_factor};
use swarmline_core::swarm::{default_space, run_fss, Evaluation};
use swarmline_core::{FssConfig, SearchSpace};

const EXACT: f64 = 1e-9;

fn close(actual: f64, expected: f64, tolerance: f64, what: &str) {
    assert!(
        (actual - expected).abs() < tolerance,
        "{what}: got {actual}, expected {expected} (tol {tolerance})"
    );
}

fn fish_at(position: Vec<f64>, fitness: f64, weight: f64) -> Fish {
    let mut fish = Fish::new(position, weight);
    fish.fitness = fitness;
    fish
}

fn sphere(p: &[f64]) -> f64 {
    -p.iter().map(|x| x * x).sum::<f64>()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

fn instances_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn tasks20_base() -> AlbFile {
    let text = std::fs::read_to_string(instances_dir().join("tasks20.alb"))
        .expect("bundled instance file");
    parse_alb(&text).expect("bundled instance parses")
}

// ---------------------------------------------------------------------
// Criterion 1: every worked operator example, closed-form arithmetic.
// ---------------------------------------------------------------------
#[test]
fn criterion_01_operator_correctness() {
    let line = SearchSpace::new(1, -1000.0, 1000.0).unwrap();

    // Individual movement.
    {
        let mut fish = fish_at(vec![5.0], 7.0, 1.0);
        let mut improves = |_: &[f64]| 8.0;
        individual_movement_with_draws(&mut fish, 2.0, 0.0, &line, &mut improves, &[0.5], || 0.0);
        close(fish.position[0], 6.0, EXACT, "candidate = 5 + 0.5*2");
        assert!(fish.improved);

        let mut fish = fish_at(vec![5.0], 7.0, 1.0);
        let mut same = |_: &[f64]| 7.0;
        individual_movement_with_draws(&mut fish, 2.0, 0.0, &line, &mut same, &[0.0], || 0.0);
        assert_eq!(fish.position, vec![5.0]);
        assert_eq!(fish.last_displacement, vec![0.0]);
        assert_eq!(fish.last_fitness_delta, 0.0);

        let mut fish = fish_at(vec![5.0], 7.0, 1.0);
        let mut worse = |_: &[f64]| 6.0;
        individual_movement_with_draws(&mut fish, 2.0, 0.0, &line, &mut worse, &[0.5], || {
            unreachable!("vanilla never draws the SAR check")
        });
        assert_eq!(fish.position, vec![5.0]);
        assert_eq!(fish.last_displacement, vec![0.0]);

        let mut fish = fish_at(vec![5.0], 7.0, 1.0);
        let mut worse = |_: &[f64]| 6.0;
        individual_movement_with_draws(&mut fish, 2.0, 1.0, &line, &mut worse, &[0.5], || 0.5);
        close(fish.position[0], 6.0, EXACT, "alpha=1 forces the worsening move");
        assert!(!fish.improved);
    }

    // SAR schedule.
    close(sar_alpha(0, 0.8, 0.007), 0.8, EXACT, "alpha(0)");
    close(
        sar_alpha(100, 0.8, 0.007),
        0.8 * (-0.7f64).exp(),
        EXACT,
        "alpha(100) closed form",
    );
    close(sar_alpha(100, 0.8, 0.007), 0.39726824, 1e-7, "alpha(100) value");
    assert!((0..500).all(|t| sar_alpha(t + 1, 0.8, 0.007) < sar_alpha(t, 0.8, 0.007)));

    // Feeding, incremental form.
    {
        let mut school = vec![
            fish_at(vec![0.0], 0.0, 10.0),
            fish_at(vec![0.0], 0.0, 10.0),
            fish_at(vec![0.0], 0.0, 100.0),
        ];
        school[0].last_fitness_delta = 4.0;
        school[1].last_fitness_delta = 0.0;
        school[2].last_fitness_delta = 4.0;
        feed_vanilla(&mut school, 100.0);
        close(school[0].weight, 11.0, EXACT, "max-delta fish gains exactly 1");
        close(school[1].weight, 10.0, EXACT, "zero-delta fish unchanged");
        close(school[2].weight, 100.0, EXACT, "weight clamps at w_scale");
    }

    // Feeding, absolute form.
    {
        let mut school = vec![
            fish_at(vec![0.0], 10.0, 5.0),
            fish_at(vec![0.0], 0.0, 5.0),
            fish_at(vec![0.0], 5.0, 5.0),
        ];
        feed_npss(&mut school, 10_000.0, 0.0, 10.0);
        close(school[0].weight, 10_000.0, EXACT, "F=f_max maps to w_scale");
        close(school[1].weight, 1.0, EXACT, "F=f_min maps to 1");
        close(school[2].weight, 5000.5, EXACT, "midpoint maps to 5000.5");
    }

    // Fake contributions.
    {
        let mut fish = fish_at(vec![0.0], 0.0, 1.0);
        fish.last_move = Some(RecordedMove {
            displacement: vec![2.0],
            step_ind: 4.0,
        });
        let (dx, dw) = npss_fake_contribution(&fish, 1.0, 3.0, 10.0);
        close(dx[0], 0.5, EXACT, "fake displacement 2/4*1");
        close(dw, 0.0, EXACT, "weight 1 gives zero fake weight");
        fish.weight = 10.0;
        let (_, dw) = npss_fake_contribution(&fish, 1.0, 3.0, 10.0);
        close(dw, 3.0, EXACT, "weight w_scale takes max_weight_delta");
        let never_moved = fish_at(vec![0.0], 0.0, 5.0);
        assert_eq!(
            npss_fake_contribution(&never_moved, 1.0, 3.0, 10.0),
            (vec![0.0], 0.0)
        );
    }

    // Collective-instinctive movement.
    {
        let plane = SearchSpace::new(2, -1000.0, 1000.0).unwrap();
        let mut school = vec![fish_at(vec![0.0, 0.0], 0.0, 1.0)];
        school[0].last_displacement = vec![1.0, 0.0];
        school[0].last_fitness_delta = 2.0;
        school[0].improved = true;
        collective_instinctive(&mut school, FssVariant::Vanilla, 0.0, 10.0, &plane);
        close(school[0].position[0], 1.0, EXACT, "single contributor x");
        close(school[0].position[1], 0.0, EXACT, "single contributor y");

        let mut school = vec![
            fish_at(vec![0.0, 0.0], 0.0, 1.0),
            fish_at(vec![0.0, 0.0], 0.0, 1.0),
        ];
        school[0].last_displacement = vec![1.0, 0.0];
        school[0].last_fitness_delta = 1.0;
        school[0].improved = true;
        school[1].last_displacement = vec![0.0, 1.0];
        school[1].last_fitness_delta = 3.0;
        school[1].improved = true;
        collective_instinctive(&mut school, FssVariant::Vanilla, 0.0, 10.0, &plane);
        close(school[0].position[0], 0.25, EXACT, "two-fish average x");
        close(school[0].position[1], 0.75, EXACT, "two-fish average y");

        let mut school = vec![fish_at(vec![3.0], 0.0, 1.0)];
        collective_instinctive(&mut school, FssVariant::Sar, 0.0, 10.0, &line);
        assert_eq!(school[0].position, vec![3.0], "empty improved set moves nobody");
    }

    // Barycenter.
    {
        let equal = vec![fish_at(vec![0.0], 0.0, 3.0), fish_at(vec![2.0], 0.0, 3.0)];
        close(compute_barycenter(&equal)[0], 1.0, EXACT, "equal weights");
        let skewed = vec![fish_at(vec![0.0], 0.0, 1.0), fish_at(vec![2.0], 0.0, 3.0)];
        close(compute_barycenter(&skewed)[0], 1.5, EXACT, "weighted barycenter");
        let single = vec![fish_at(vec![7.0], 0.0, 9.0)];
        close(compute_barycenter(&single)[0], 7.0, EXACT, "single fish");
    }

    // Collective-volitive movement.
    {
        let mut x = vec![4.0];
        volitive_step(&mut x, &[0.0], 1.0, 1.0, true, &line);
        close(x[0], 3.0, EXACT, "contraction toward barycenter");
        let mut x = vec![4.0];
        volitive_step(&mut x, &[0.0], 1.0, 1.0, false, &line);
        close(x[0], 5.0, EXACT, "expansion away from barycenter");
        let mut x = vec![2.0];
        volitive_step(&mut x, &[2.0], 5.0, 0.9, true, &line);
        assert_eq!(x, vec![2.0], "fish on the barycenter stays");
    }

    // Step decay.
    close(step_schedule(400.0, 0, 100), 400.0, EXACT, "step at t=0");
    close(step_schedule(400.0, 100, 100), 0.0, EXACT, "step at it_max");
    close(step_schedule(400.0, 50, 100), 200.0, EXACT, "step midpoint");

    // PSO constriction.
    {
        let chi = constriction_factor(2.1, 2.1).unwrap();
        close(chi, 0.64174, 1e-4, "chi(2.1, 2.1)");
        let v = constricted_velocity(
            &[0.5, 2.0],
            &[3.0, -1.0],
            &[3.0, -1.0],
            &[3.0, -1.0],
            chi,
            2.1,
            2.1,
            &[0.4, 0.6],
            &[0.7, 0.2],
        );
        close(v[0], chi * 0.5, 1e-12, "x=pb=gb leaves chi*v (dim 0)");
        close(v[1], chi * 2.0, 1e-12, "x=pb=gb leaves chi*v (dim 1)");
        let v = constricted_velocity(&[1.0], &[0.0], &[1.0], &[1.0], chi, 2.1, 2.1, &[1.0], &[1.0]);
        close(v[0], 3.3370, 1e-3, "hand-evaluated step");
        close(v[0], chi * 5.2, 1e-12, "hand-evaluated step closed form");
    }

    // Full runs: constant fitness, improvement, degenerate archive.
    {
        let config = FssConfig {
            school_size: 6,
            max_iterations: 30,
            ..FssConfig::defaults(default_space(3), FssVariant::Vanilla, 5)
        };
        let flat = run_fss(&config, 1, |p| Evaluation::continuous(p, 3.5)).unwrap();
        assert_eq!(flat.iterations_until_convergence, 0, "constant fitness IUC");
        close(flat.best_fitness, 3.5, EXACT, "constant fitness value");

        let config = FssConfig {
            max_iterations: 120,
            ..FssConfig::defaults(default_space(10), FssVariant::Vanilla, 5)
        };
        let run = run_fss(&config, 1, |p| Evaluation::continuous(p, sphere(p))).unwrap();
        assert!(run.best_fitness > run.fitness_history[0], "sphere improves");
        assert_eq!(run.archive.len(), 1, "degenerate archive");
        assert_eq!(run.archive[0].fitness, run.best_fitness);
    }

    // Random-keys mappings.
    assert_eq!(random_keys_decode(&[0.5, -1.1, 2.4]).order, vec![2, 1, 3]);
    assert_eq!(random_keys_decode(&[-2.0, 0.0, 1.0, 5.0]).order, vec![1, 2, 3, 4]);
    assert_eq!(random_keys_decode(&[0.0, 0.0]).order, vec![1, 2]);
    assert_eq!(
        multiple_random_keys_decode(&[0.7, -0.3, 0.4], &[2, 1]).unwrap().slots,
        vec![2, 1, 1]
    );
    assert_eq!(
        multiple_random_keys_decode(&[3.0, -1.0, 0.5], &[3]).unwrap().slots,
        vec![1, 1, 1]
    );
    assert_eq!(
        multiple_random_keys_decode(&[3.0, 1.0, 2.0], &[1, 1, 1]).unwrap().slots,
        vec![3, 1, 2]
    );

    // Mean model.
    {
        let two = |a: f64, b: f64, pa: u32, pb: u32| {
            vec![
                ModelData { task_times: vec![a], production_level: pa },
                ModelData { task_times: vec![b], production_level: pb },
            ]
        };
        let (mean, _) = build_mean_model(&two(4.0, 6.0, 1, 1), &[vec![], vec![]]).unwrap();
        close(mean[0], 5.0, EXACT, "equal-weight mean");
        let (mean, _) = build_mean_model(&two(4.0, 8.0, 3, 1), &[vec![], vec![]]).unwrap();
        close(mean[0], 5.0, EXACT, "production-weighted mean");
        let models = vec![
            ModelData { task_times: vec![1.0; 3], production_level: 1 },
            ModelData { task_times: vec![1.0; 3], production_level: 1 },
        ];
        let (_, joint) = build_mean_model(&models, &[vec![(1, 2)], vec![(2, 3)]]).unwrap();
        assert_eq!(joint, vec![(1, 2), (2, 3)], "joint graph is the union");
    }

    // Balancing decode and objective.
    {
        let zero = [[0.0; NUM_ZONES]; NUM_ZONES];
        let single = BalancingInstance::new(
            1, vec![], vec![600.0], vec![1], zero, 1000.0, 3,
            vec![ModelData { task_times: vec![600.0], production_level: 1 }],
        )
        .unwrap();
        let solution = decode_balancing(&TaskPermutation { order: vec![1] }, &single).unwrap();
        assert_eq!(solution.num_workplaces(), 1);
        assert_eq!(solution.num_workstations, 1);
        close(solution.workplaces[0].load, 600.0, EXACT, "single-task load");

        let pair = BalancingInstance::new(
            2, vec![], vec![600.0, 600.0], vec![1, 1], zero, 1000.0, 2,
            vec![ModelData { task_times: vec![600.0, 600.0], production_level: 1 }],
        )
        .unwrap();
        let solution = decode_balancing(&TaskPermutation { order: vec![1, 2] }, &pair).unwrap();
        assert_eq!(solution.assignment, vec![(0, 0), (0, 1)], "second workplace opens");
        assert_eq!(solution.loads(), vec![600.0, 600.0]);

        let mut displaced = zero;
        displaced[0][1] = 50.0;
        displaced[1][0] = 50.0;
        let forced = BalancingInstance::new(
            2, vec![], vec![400.0, 400.0], vec![1, 2], displaced, 1000.0, 1,
            vec![ModelData { task_times: vec![400.0, 400.0], production_level: 1 }],
        )
        .unwrap();
        let solution = decode_balancing(&TaskPermutation { order: vec![1, 2] }, &forced).unwrap();
        close(solution.workplaces[0].load, 850.0, EXACT, "displacement-corrected load");

        close(balancing_objective(&[8.0, 9.0], 10.0), 2.0 * 5.0f64.sqrt(), EXACT, "K=2 objective");
        close(balancing_objective(&[10.0, 10.0], 10.0), 0.0, EXACT, "perfect balance");
        close(balancing_objective(&[4.0], 10.0), 6.0, EXACT, "K=1 objective");

        close(
            balancing_fitness(&TaskPermutation { order: vec![1, 2] }, &pair),
            -(2.0 * (400.0f64.powi(2) * 2.0).sqrt()),
            EXACT,
            "fitness is the negated objective",
        );
        assert_eq!(
            balancing_fitness(&TaskPermutation { order: vec![1] }, &single),
            -balancing_objective(&[600.0], 1000.0)
        );
    }

    // Sequencing recursion and fitness.
    {
        let inst = SequencingInstance {
            num_workplaces: 1,
            station_length: 2.0,
            process_time: vec![vec![1.5]],
            production_levels: vec![3],
        };
        let eval = evaluate_sequence(&ModelSequence { slots: vec![1, 1, 1] }, &inst);
        assert_eq!(eval.start.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.0, 1.5, 3.0]);
        assert_eq!(eval.finish.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![1.5, 3.0, 4.0]);
        assert_eq!(eval.completed.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![1.5, 1.5, 1.0]);
        close(completed_work(&eval), 4.0, EXACT, "hand-traced completed work");

        let idle = SequencingInstance {
            num_workplaces: 2,
            station_length: 0.95,
            process_time: vec![vec![0.0, 0.0]],
            production_levels: vec![2],
        };
        close(
            sequencing_fitness(&[0.3, 0.9], &idle).unwrap(),
            0.0,
            EXACT,
            "zero process times give zero fitness",
        );

        let light = SequencingInstance {
            num_workplaces: 3,
            station_length: 1.0,
            process_time: vec![vec![0.9, 0.4, 0.7]],
            production_levels: vec![4],
        };
        let eval = evaluate_sequence(&ModelSequence { slots: vec![1; 4] }, &light);
        close(
            eval.total_completed_work,
            eval.total_workload,
            EXACT,
            "no overload when every p <= 1",
        );
    }

    // Statistics.
    {
        assert_eq!(group_sample_means(&[1.0, 3.0, 2.0, 4.0], 2).unwrap(), vec![2.0, 3.0]);
        let groups = GroupedSamples::new(vec![
            ("a".into(), vec![1.0, 2.0, 3.0]),
            ("b".into(), vec![2.0, 3.0, 4.0]),
            ("c".into(), vec![3.0, 4.0, 5.0]),
        ]);
        let anova = anova_oneway(&groups).unwrap();
        close(anova.f_statistic, 3.0, EXACT, "textbook F");
        let intervals = pooled_confidence_intervals(&groups, 0.95).unwrap();
        close(intervals[0].half_width, 1.4128, 1e-3, "pooled half-width");
    }

    // Pipeline argmax and archive shape on a small instance.
    {
        let instance = five_task_instance(&mut ChaCha8Rng::seed_from_u64(12345), 2);
        let config = fss_stage(FssVariant::Sar, 5, 10, 60);
        let stage = solve_balancing_topn(&instance, &config, 1).unwrap();
        assert_eq!(stage.solutions.len(), 1, "top-1 list is a singleton");
        let pipeline = PipelineConfig {
            balancing_search: fss_stage(FssVariant::Sar, 5, 10, 60),
            sequencing_search: fss_stage(FssVariant::Sar, 5, 10, 30),
            archive_n: 3,
            selection_metric: SelectionMetric::CompletedWork,
            station_length: 0.95,
        };
        let report = run_simultaneous(&instance, &pipeline).unwrap();
        for candidate in &report.candidates {
            assert!(report.best.completed_work >= candidate.completed_work, "argmax");
        }
        let rerun = run_simultaneous(&instance, &pipeline).unwrap();
        assert_eq!(report.best.sequence, rerun.best.sequence, "pipeline determinism");
        assert_eq!(report.best.completed_work, rerun.best.completed_work);
    }

    println!("criterion 01 (operator correctness): PASS");
}

// ---------------------------------------------------------------------
// Criterion 2: recursion equals independent discrete-event simulation.
// ---------------------------------------------------------------------
#[test]
fn criterion_02_sequencing_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_811);
    for case in 0..1000 {
        let workplaces = rng.random_range(1..=3);
        let jobs = rng.random_range(1..=6);
        let num_models = rng.random_range(1..=3.min(jobs));
        let slots: Vec<usize> = (0..jobs)
            .map(|_| rng.random_range(1..=num_models))
            .collect();
        let mut levels = vec![0u32; num_models];
        for &m in &slots {
            levels[m - 1] += 1;
        }
        let length = [0.95, 1.5, 2.0][rng.random_range(0..3)];
        let process_time: Vec<Vec<f64>> = (0..num_models)
            .map(|_| (0..workplaces).map(|_| rng.random_range(0.0..2.5)).collect())
            .collect();
        let inst = SequencingInstance {
            num_workplaces: workplaces,
            station_length: length,
            process_time,
            production_levels: levels,
        };
        let seq = ModelSequence { slots };
        let eval = evaluate_sequence(&seq, &inst);
        let simulated = oracles::simulate_line(&seq, &inst);
        let mut simulated_total = 0.0;
        for i in 0..jobs {
            for k in 0..workplaces {
                assert!(
                    (eval.completed[i][k] - simulated[i][k]).abs() < EXACT,
                    "case {case}: cell ({i},{k}) recursion {} vs simulation {}",
                    eval.completed[i][k],
                    simulated[i][k]
                );
                simulated_total += simulated[i][k];
            }
        }
        close(
            eval.total_completed_work,
            simulated_total,
            EXACT,
            "total completed work",
        );
    }
    println!("criterion 02 (sequencing oracle equivalence, 1000 instances): PASS");
}

// ---------------------------------------------------------------------
// Criterion 3: balancing search hits the enumeration optimum.
// ---------------------------------------------------------------------

fn five_task_instance(rng: &mut ChaCha8Rng, max_workplaces: usize) -> BalancingInstance {
    let n = 5;
    let times: Vec<f64> = (0..n).map(|_| rng.random_range(100.0..900.0)).collect();
    let mut pairs = Vec::new();
    for succ in 2..=n {
        for pred in 1..succ {
            if rng.random_bool(0.3) {
                pairs.push((pred, succ));
            }
        }
    }
    let zones: Vec<usize> = (0..n).map(|_| rng.random_range(1..=NUM_ZONES)).collect();
    let mut displacement = [[0.0; NUM_ZONES]; NUM_ZONES];
    for i in 0..NUM_ZONES {
        for j in (i + 1)..NUM_ZONES {
            let d = rng.random_range(0.0..50.0);
            displacement[i][j] = d;
            displacement[j][i] = d;
        }
    }
    BalancingInstance::new(
        n,
        pairs,
        times.clone(),
        zones,
        displacement,
        1000.0,
        max_workplaces,
        vec![ModelData {
            task_times: times,
            production_level: 1,
        }],
    )
    .unwrap()
}

fn fss_stage(variant: FssVariant, dimensions: usize, school: usize, iterations: usize) -> OptimizerConfig {
    OptimizerConfig::Fss(FssConfig {
        school_size: school,
        max_iterations: iterations,
        ..FssConfig::defaults(default_space(dimensions), variant, 97)
    })
}

#[test]
fn criterion_03_balancing_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut successes = [0usize; 4];
    const CASES: usize = 20;
    for case in 0..CASES {
        let instance = five_task_instance(&mut rng, case % 3 + 1);
        let optimum = oracles::permutations(5)
            .into_iter()
            .map(|order| balancing_fitness(&TaskPermutation { order }, &instance))
            .fold(f64::NEG_INFINITY, f64::max);
        for (index, algorithm) in AlgorithmKind::ALL.into_iter().enumerate() {
            let config = algorithm.optimizer(5, 10, 2000, 7_000 + case as u64);
            let stage = solve_balancing_topn(&instance, &config, 1).unwrap();
            if (stage.solutions[0].fitness - optimum).abs() < EXACT {
                successes[index] += 1;
            }
        }
    }
    for (index, algorithm) in AlgorithmKind::ALL.into_iter().enumerate() {
        assert!(
            successes[index] >= 19,
            "{algorithm}: optimum found in only {}/{CASES} cases",
            successes[index]
        );
    }
    println!(
        "criterion 03 (balancing brute force, hits/20 per algorithm {successes:?}): PASS"
    );
}

// ---------------------------------------------------------------------
// Criterion 4: sequencing stage hits the enumeration optimum.
// ---------------------------------------------------------------------
#[test]
fn criterion_04_sequencing_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut successes = 0usize;
    const CASES: usize = 20;
    for case in 0..CASES {
        // Two models over three tasks, plan [2, 3]: five launches.
        let times_a: Vec<f64> = (0..3).map(|_| rng.random_range(100.0..1000.0)).collect();
        let times_b: Vec<f64> = (0..3).map(|_| rng.random_range(100.0..1000.0)).collect();
        let models = vec![
            ModelData { task_times: times_a, production_level: 2 },
            ModelData { task_times: times_b, production_level: 3 },
        ];
        let (mean, joint) = build_mean_model(&models, &[vec![(1, 2)], vec![(1, 2)]]).unwrap();
        let instance = BalancingInstance::new(
            3, joint, mean, vec![1, 2, 3],
            [[0.0; NUM_ZONES]; NUM_ZONES], 1000.0, 2, models,
        )
        .unwrap();
        let stage = solve_balancing_topn(
            &instance,
            &fss_stage(FssVariant::Sar, 3, 8, 40),
            1,
        )
        .unwrap();
        let balance = &stage.solutions[0];

        let seq_instance = derive_process_times(balance, instance.models(), &instance, 0.95);
        let optimum = oracles::two_model_sequences(5, 2)
            .into_iter()
            .map(|slots| evaluate_totals(&ModelSequence { slots }, &seq_instance).0)
            .fold(f64::NEG_INFINITY, f64::max);

        let outcome = solve_sequencing_for(
            balance,
            &instance,
            &fss_stage(FssVariant::Sar, 5, 10, 300).with_seed(4_000 + case as u64),
            0.95,
        )
        .unwrap();
        if (outcome.evaluation.total_completed_work - optimum).abs() < EXACT {
            successes += 1;
        }
    }
    assert!(successes >= 19, "optimum reached in only {successes}/{CASES} cases");
    println!("criterion 04 (sequencing brute force, hits {successes}/20): PASS");
}

// ---------------------------------------------------------------------
// Criterion 5: FSS-SAR with alpha = 0 is bit-identical to vanilla.
// ---------------------------------------------------------------------
#[test]
fn criterion_05_sar_vanilla_equivalence() {
    for seed in 0..10u64 {
        let vanilla = FssConfig {
            max_iterations: 200,
            ..FssConfig::defaults(default_space(30), FssVariant::Vanilla, seed)
        };
        let sar = FssConfig {
            variant: FssVariant::Sar,
            sar_alpha0: 0.0,
            ..vanilla.clone()
        };
        let run = |config: &FssConfig| {
            run_fss(config, 3, |p| Evaluation::continuous(p, sphere(p))).unwrap()
        };
        assert_eq!(run(&vanilla), run(&sar), "seed {seed}: results diverged");
    }
    println!("criterion 05 (SAR/vanilla bit-for-bit equivalence, 10 seeds): PASS");
}

// ---------------------------------------------------------------------
// Criterion 6: three orders of magnitude on the 30-d sphere.
// ---------------------------------------------------------------------
#[test]
fn criterion_06_convergence_sanity() {
    let mut report = Vec::new();
    for algorithm in AlgorithmKind::ALL {
        let mut initial = Vec::new();
        let mut finals = Vec::new();
        for seed in 0..20u64 {
            let config = algorithm.optimizer(30, 30, 500, 600 + seed);
            let result = config
                .run(1, |p| Evaluation::continuous(p, sphere(p)))
                .unwrap();
            initial.push(-result.fitness_history[0]);
            finals.push(-result.best_fitness);
        }
        let initial_median = median(&mut initial);
        let final_median = median(&mut finals);
        let gain = initial_median / final_median;
        assert!(
            gain >= 1e3,
            "{algorithm}: median improvement only {gain:.1}x ({initial_median:.3e} -> {final_median:.3e})"
        );
        report.push(format!("{algorithm} {gain:.1e}x"));
    }
    println!("criterion 06 (convergence sanity, {}): PASS", report.join(", "));
}

// ---------------------------------------------------------------------
// Criteria 7 and 8 share one desk-scale protocol batch.
// ---------------------------------------------------------------------

struct ProtocolBatch {
    spec: MixedModelSpec,
    config: ExperimentConfig,
    output: ExperimentOutput,
}

fn protocol_batch() -> &'static ProtocolBatch {
    static BATCH: OnceLock<ProtocolBatch> = OnceLock::new();
    BATCH.get_or_init(|| {
        let spec = generate_mixed_model(&tasks20_base(), 50, 998, 4242, "t20_m50").unwrap();
        let config = ExperimentConfig {
            group_size: 15,
            school_size: 20,
            iterations: 150,
            seq_school_size: 12,
            seq_iterations: 40,
            archive_n: 2,
            station_length: 0.95,
            max_workplaces: 3,
            ..ExperimentConfig::new(AlgorithmKind::ALL.to_vec(), 45, 9_000)
        };
        let output = run_experiment(&spec, &config).expect("protocol batch runs");
        ProtocolBatch {
            spec,
            config,
            output,
        }
    })
}

#[test]
fn criterion_07_paper_protocol_shape() {
    let batch = protocol_batch();
    let output = &batch.output;
    assert!(output.failures.is_empty(), "failures: {:?}", output.failures);
    assert_eq!(output.records.len(), 4 * 45);

    for record in &output.records {
        assert!(
            record.completed_work <= record.workload + 1e-9,
            "run {} ({}): CW {} > WL {}",
            record.run_id,
            record.algorithm,
            record.completed_work,
            record.workload
        );
        let ratio = record.completed_work / record.workload;
        assert!((0.0..=1.0 + 1e-12).contains(&ratio));
        assert!(record.num_workplaces >= 1);
    }

    let stats = output.stats.as_ref().expect("45/15 = 3 means per algorithm");
    for metric in &stats.metrics {
        assert_eq!(metric.anova.df_between, 3, "{}: v1", metric.metric);
        assert_eq!(metric.anova.df_within, 8, "{}: v2", metric.metric);
        assert_eq!(metric.per_algorithm.len(), 4);
        for summary in &metric.per_algorithm {
            assert_eq!(summary.sample_count, 3, "3 grouped means per algorithm");
            assert!(summary.interval.half_width >= 0.0);
        }
    }

    // The full report files are produced and read back losslessly.
    let dir = std::env::temp_dir().join(format!("swarmline-protocol-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let results_path = dir.join("results.csv");
    write_results_csv(&output.records, &results_path).unwrap();
    write_stats_csv(stats, &dir.join("stats.csv")).unwrap();
    assert_eq!(read_results_csv(&results_path).unwrap(), output.records);
    std::fs::remove_dir_all(&dir).ok();

    // Workplaces can never undercut workstations; spot-check live runs.
    let instance = batch.spec.to_instance(batch.config.max_workplaces).unwrap();
    for algorithm in AlgorithmKind::ALL {
        let pipeline = PipelineConfig {
            balancing_search: algorithm.optimizer(instance.num_tasks(), 20, 150, 9_000),
            sequencing_search: algorithm.optimizer(998, 12, 40, 13_000),
            archive_n: 2,
            selection_metric: SelectionMetric::CompletedWork,
            station_length: 0.95,
        };
        let report = run_simultaneous(&instance, &pipeline).unwrap();
        for candidate in &report.candidates {
            assert!(
                candidate.balance.num_workplaces() >= candidate.balance.num_workstations,
                "{algorithm}: WP < workstations"
            );
        }
    }
    println!("criterion 07 (protocol shape, 180 records + report): PASS");
}

#[test]
fn criterion_08_workplace_spread_echo() {
    let batch = protocol_batch();
    let mut spreads = Vec::new();
    for algorithm in AlgorithmKind::ALL {
        let workplaces: Vec<usize> = batch
            .output
            .records
            .iter()
            .filter(|r| r.algorithm == algorithm.label())
            .map(|r| r.num_workplaces)
            .collect();
        assert_eq!(workplaces.len(), 45);
        let min = *workplaces.iter().min().unwrap();
        let max = *workplaces.iter().max().unwrap();
        assert!(
            max - min <= 1,
            "{algorithm}: WP spread {} (min {min}, max {max})",
            max - min
        );
        spreads.push(format!("{algorithm} {min}..{max}"));
    }
    println!("criterion 08 (WP spread <= 1 per algorithm; {}): PASS", spreads.join(", "));
}

// ---------------------------------------------------------------------
// Criterion 9: statistics layer hand checks.
// ---------------------------------------------------------------------
#[test]
fn criterion_09_statistics_hand_checks() {
    let groups = GroupedSamples::new(vec![
        ("a".into(), vec![1.0, 2.0, 3.0]),
        ("b".into(), vec![2.0, 3.0, 4.0]),
        ("c".into(), vec![3.0, 4.0, 5.0]),
    ]);
    close(anova_oneway(&groups).unwrap().f_statistic, 3.0, EXACT, "textbook F");

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..1000 {
        let group_count = rng.random_range(2..=5);
        let named: Vec<(String, Vec<f64>)> = (0..group_count)
            .map(|g| {
                let size = rng.random_range(2..=20);
                let values = (0..size).map(|_| rng.random_range(-10.0..10.0)).collect();
                (format!("g{g}"), values)
            })
            .collect();
        let all: Vec<f64> = named.iter().flat_map(|(_, v)| v.iter().copied()).collect();
        let grand = all.iter().sum::<f64>() / all.len() as f64;
        let ss_total: f64 = all.iter().map(|&x| (x - grand) * (x - grand)).sum();
        let result = anova_oneway(&GroupedSamples::new(named)).unwrap();
        assert!(
            (ss_total - (result.ss_between + result.ss_within)).abs() < EXACT,
            "SS decomposition broke: {ss_total} vs {} + {}",
            result.ss_between,
            result.ss_within
        );
    }

    for (df, expected) in [(1.0, 12.7062), (6.0, 2.4469), (30.0, 2.0423), (87.0, 1.9876)] {
        close(t_quantile(0.975, df), expected, 1e-3, "tabulated t quantile");
    }
    println!("criterion 09 (statistics hand checks): PASS");
}

// ---------------------------------------------------------------------
// Criterion 10: byte-identical experiment reruns.
// ---------------------------------------------------------------------
#[test]
fn criterion_10_experiment_determinism() {
    let spec = generate_mixed_model(&tasks20_base(), 4, 12, 777, "t20_m4").unwrap();
    let config = ExperimentConfig {
        group_size: 3,
        school_size: 8,
        iterations: 25,
        seq_school_size: 8,
        seq_iterations: 15,
        archive_n: 2,
        station_length: 0.95,
        max_workplaces: 3,
        ..ExperimentConfig::new(
            vec![AlgorithmKind::FssSar, AlgorithmKind::Pso],
            6,
            31_337,
        )
    };
    let dir = std::env::temp_dir().join(format!("swarmline-determinism-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut normalized = Vec::new();
    for round in 0..2 {
        let output = run_experiment(&spec, &config).unwrap();
        assert!(output.failures.is_empty());
        let path = dir.join(format!("results-{round}.csv"));
        write_results_csv(&output.records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        // The wall_time column is the only nondeterministic field.
        let stripped: String = text
            .lines()
            .map(|line| line.rsplit_once(',').expect("csv rows have columns").0)
            .collect::<Vec<_>>()
            .join("\n");
        normalized.push(stripped);
    }
    assert_eq!(normalized[0], normalized[1], "reruns are not byte-identical");
    std::fs::remove_dir_all(&dir).ok();
    println!("criterion 10 (experiment determinism): PASS");
}
