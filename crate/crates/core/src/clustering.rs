//! K-means++ seeding and Lloyd iteration over full-length series.
//!
//! Seeding draws from a ChaCha8 generator seeded with the run's `rng_seed`,
//! so a given `(dataset, hyperparameters)` pair always yields the same model.
//! Clusters that end up empty are dropped after convergence, which is how the
//! returned `K` can fall below `k_max`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Dataset, Hyperparameters};

pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub centroids: Vec<Vec<f64>>,
    /// Cluster index per series, in dataset order.
    pub assignments: Vec<usize>,
    /// Sum of squared Euclidean distances to the assigned centroids.
    pub cost: f64,
    /// Cost after every assignment step, ending with the final model's cost.
    pub cost_trace: Vec<f64>,
    pub iterations: usize,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn members(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignments
            .iter()
            .enumerate()
            .filter(move |(_, &a)| a == k)
            .map(|(i, _)| i)
    }
}

pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// D²-weighted seeding. Stops early once every series coincides with a seed.
pub fn seed_kmeanspp(dataset: &Dataset, k_max: usize, rng_seed: u64) -> Result<Vec<Vec<f64>>> {
    if k_max < 1 {
        return Err(Error::param("k_max must be at least 1"));
    }
    let series = dataset.series();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);

    let first = rng.gen_range(0..series.len());
    let mut seeds = vec![series[first].values.clone()];
    let mut nearest: Vec<f64> = series
        .par_iter()
        .map(|s| squared_euclidean(&s.values, &seeds[0]))
        .collect();

    while seeds.len() < k_max {
        let total: f64 = nearest.iter().sum();
        if total <= 0.0 {
            break;
        }
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &d) in nearest.iter().enumerate() {
            if d <= 0.0 {
                continue;
            }
            acc += d;
            pick = Some(i);
            if acc > target {
                break;
            }
        }
        // rounding can leave `acc` just short of `target`; the last positive
        // weight is taken then
        let pick = pick.expect("total > 0 implies a positive weight");
        let seed = series[pick].values.clone();
        nearest
            .par_iter_mut()
            .zip(series.par_iter())
            .for_each(|(d, s)| *d = d.min(squared_euclidean(&s.values, &seed)));
        seeds.push(seed);
    }
    Ok(seeds)
}

fn assign(dataset: &Dataset, centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    dataset
        .series()
        .par_iter()
        .map(|s| {
            let mut best = (0, f64::INFINITY);
            for (k, c) in centroids.iter().enumerate() {
                let d = squared_euclidean(&s.values, c);
                if d < best.1 {
                    best = (k, d);
                }
            }
            best
        })
        .unzip()
}

/// Pointwise means; a cluster with no members keeps its previous centroid.
fn update(dataset: &Dataset, assignments: &[usize], previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let t = dataset.t();
    let mut sums = vec![vec![0.0; t]; previous.len()];
    let mut counts = vec![0usize; previous.len()];
    for (s, &k) in dataset.series().iter().zip(assignments) {
        counts[k] += 1;
        for (acc, v) in sums[k].iter_mut().zip(&s.values) {
            *acc += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .zip(previous)
        .map(|((sum, count), prev)| {
            if count == 0 {
                prev.clone()
            } else {
                let n = count as f64;
                sum.into_iter().map(|v| v / n).collect()
            }
        })
        .collect()
}

fn total_cost(distances: &[f64]) -> f64 {
    distances.iter().sum()
}

/// Lloyd iteration until assignments stop changing or `max_iters` updates
/// have run. Assignment ties go to the lowest cluster index.
pub fn lloyd_cluster(dataset: &Dataset, seeds: Vec<Vec<f64>>, max_iters: usize) -> Result<ClusterModel> {
    if seeds.is_empty() {
        return Err(Error::param("at least one seed is required"));
    }
    if let Some(bad) = seeds.iter().find(|s| s.len() != dataset.t()) {
        return Err(Error::Shape(format!(
            "seed length {} does not match series length {}",
            bad.len(),
            dataset.t()
        )));
    }
    let mut centroids = seeds;
    let (mut assignments, dist) = assign(dataset, &centroids);
    let mut cost_trace = vec![total_cost(&dist)];
    let mut iterations = 0;

    while iterations < max_iters {
        centroids = update(dataset, &assignments, &centroids);
        iterations += 1;
        let (next, dist) = assign(dataset, &centroids);
        cost_trace.push(total_cost(&dist));
        if next == assignments {
            break;
        }
        assignments = next;
    }

    // final centroids are the means of the final assignment, so membership
    // holds even when the iteration cap was hit
    centroids = update(dataset, &assignments, &centroids);

    let mut used = vec![false; centroids.len()];
    for &a in &assignments {
        used[a] = true;
    }
    let mut remap = vec![usize::MAX; centroids.len()];
    let mut kept = Vec::new();
    for (k, c) in centroids.into_iter().enumerate() {
        if used[k] {
            remap[k] = kept.len();
            kept.push(c);
        }
    }
    let assignments: Vec<usize> = assignments.iter().map(|&a| remap[a]).collect();
    let cost = dataset
        .series()
        .iter()
        .zip(&assignments)
        .map(|(s, &k)| squared_euclidean(&s.values, &kept[k]))
        .sum();
    cost_trace.push(cost);

    Ok(ClusterModel {
        centroids: kept,
        assignments,
        cost,
        cost_trace,
        iterations,
    })
}

/// Seeding followed by Lloyd iteration with the run's hyperparameters.
pub fn cluster(dataset: &Dataset, hyper: &Hyperparameters) -> Result<ClusterModel> {
    let seeds = seed_kmeanspp(dataset, hyper.k_max, hyper.rng_seed)?;
    lloyd_cluster(dataset, seeds, hyper.max_iters)
}
