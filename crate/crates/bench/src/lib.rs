//! Shared fixtures for the benchmark targets.

use swarmline_core::balancing::{BalancingInstance, ModelData, NUM_ZONES};

/// A 12-task, 3-model instance big enough to exercise the decoder paths.
pub fn bench_instance() -> BalancingInstance {
    let base: [f64; 12] = [
        285.0, 420.0, 175.0, 310.0, 240.0, 195.0, 365.0, 150.0, 280.0, 330.0, 410.0, 225.0,
    ];
    let models: Vec<ModelData> = (0..3)
        .map(|m| ModelData {
            task_times: base
                .iter()
                .enumerate()
                .map(|(j, &t)| t * (0.9 + 0.1 * ((m + j) % 3) as f64))
                .collect(),
            production_level: 2 + m as u32,
        })
        .collect();
    let (mean, joint) = swarmline_core::balancing::build_mean_model(
        &models,
        &vec![vec![(1, 3), (2, 4), (3, 5), (4, 7), (5, 8), (6, 9), (9, 11), (10, 12)]; 3],
    )
    .unwrap();
    let mut displacement = [[0.0; NUM_ZONES]; NUM_ZONES];
    for i in 0..NUM_ZONES {
        for j in 0..NUM_ZONES {
            if i != j {
                displacement[i][j] = 12.5;
            }
        }
    }
    BalancingInstance::new(
        12,
        joint,
        mean,
        vec![1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4],
        displacement,
        1000.0,
        3,
        models,
    )
    .unwrap()
}
