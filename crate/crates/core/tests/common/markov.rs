//! Monte Carlo sampling of optical-pumping trajectories.

use drsc::heating::PumpingGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Mean steps to absorption and its standard error.
pub fn sample(graph: &PumpingGraph, starts: &[usize], trajectories: usize, seed: u64) -> (f64, f64) {
    let cumulative: Vec<Vec<f64>> = graph
        .step_matrix
        .iter()
        .map(|row| {
            row.iter()
                .scan(0.0, |acc, p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    let streams = 64;
    let per = trajectories / streams;
    let sums: Vec<(f64, f64)> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(s as u64));
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..per {
                let mut state = starts[rng.gen_range(0..starts.len())];
                let mut steps = 0u64;
                while state != graph.absorbing {
                    let u: f64 = rng.gen();
                    let row = &cumulative[state];
                    state = row.partition_point(|&c| c < u).min(row.len() - 1);
                    steps += 1;
                }
                sum += steps as f64;
                sq += (steps * steps) as f64;
            }
            (sum, sq)
        })
        .collect();
    let n = (per * streams) as f64;
    let sum: f64 = sums.iter().map(|x| x.0).sum();
    let sq: f64 = sums.iter().map(|x| x.1).sum();
    let mean = sum / n;
    let var = sq / n - mean * mean;
    (mean, (var / n).sqrt())
}
