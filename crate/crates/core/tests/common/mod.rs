//! Fixture loading and brute-force oracles shared by the integration tests.
//! The oracles deliberately avoid the library's algorithms.

#![allow(dead_code)]

use std::fs::File;
use std::path::PathBuf;

use series_summary::ingest::{self, CumulativeTable};
use series_summary::Dataset;

pub const CONFIRMED: &str = "time_series_covid19_confirmed_global.csv";
pub const RECOVERED: &str = "time_series_covid19_recovered_global.csv";
pub const DEATHS: &str = "time_series_covid19_deaths_global.csv";

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixture_dir().join(name)
}

pub fn table(name: &str) -> CumulativeTable {
    ingest::parse_cumulative_csv(File::open(fixture_path(name)).unwrap()).unwrap()
}

pub fn manifest() -> serde_json::Value {
    serde_json::from_reader(File::open(fixture_path("MANIFEST.json")).unwrap()).unwrap()
}

/// Experiment 1: net daily infections.
pub fn net_infections() -> Dataset {
    ingest::build_net_infections(&table(CONFIRMED), &table(RECOVERED)).unwrap()
}

/// Experiment 2: daily deaths.
pub fn daily_deaths() -> Dataset {
    ingest::build_daily_deaths(&table(DEATHS)).unwrap()
}

/// Replays controls `u[0..T-1]` (true = hold stock over the next step)
/// through the cash/stock transition equations and returns final wealth.
pub fn replay_controls(prices: &[f64], controls: &[bool], eps: f64) -> f64 {
    let mut shares = 0.0;
    let mut cash = prices[0] / (1.0 - eps);
    let mut in_stock = false;
    let mut wealth = cash;
    for t in 0..prices.len() - 1 {
        let (p, next) = (prices[t], prices[t + 1]);
        match (in_stock, controls[t]) {
            (false, false) => {
                wealth = cash;
            }
            (false, true) => {
                shares = cash * (1.0 - eps) / p;
                cash = 0.0;
                wealth = shares * next;
            }
            (true, false) => {
                cash = shares * p * (1.0 - eps);
                shares = 0.0;
                wealth = cash;
            }
            (true, true) => {
                wealth = shares * next;
            }
        }
        in_stock = controls[t];
    }
    wealth
}

/// Maximum final wealth over all 2^(T-1) control sequences, with the
/// maximizing controls (first found on ties, in binary counting order).
pub fn brute_force_trade(prices: &[f64], eps: f64) -> (f64, Vec<bool>) {
    let steps = prices.len() - 1;
    let mut best = (f64::NEG_INFINITY, vec![]);
    for mask in 0u64..(1 << steps) {
        let controls: Vec<bool> = (0..steps).map(|t| mask >> t & 1 == 1).collect();
        let w = replay_controls(prices, &controls, eps);
        if w > best.0 {
            best = (w, controls);
        }
    }
    best
}

/// Minimum over every monotone, continuous, end-anchored warping path of the
/// summed squared differences, by explicit path enumeration.
pub fn dtw_by_paths(a: &[f64], b: &[f64]) -> f64 {
    fn walk(a: &[f64], b: &[f64], i: usize, j: usize, acc: f64, best: &mut f64) {
        let d = a[i] - b[j];
        let acc = acc + d * d;
        if i + 1 == a.len() && j + 1 == b.len() {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        if i + 1 < a.len() {
            walk(a, b, i + 1, j, acc, best);
        }
        if j + 1 < b.len() {
            walk(a, b, i, j + 1, acc, best);
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, i + 1, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, 0, 0, 0.0, &mut best);
    best
}

/// Optimal within-cluster sum of squares over every assignment of the rows
/// to at most `k` clusters.
pub fn brute_force_kmeans(rows: &[Vec<f64>], k: usize) -> (f64, Vec<usize>) {
    let n = rows.len();
    let mut best = (f64::INFINITY, vec![]);
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut labels = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            labels.push(c % k);
            c /= k;
        }
        let mut cost = 0.0;
        for cl in 0..k {
            let members: Vec<&Vec<f64>> =
                rows.iter().zip(&labels).filter(|(_, &l)| l == cl).map(|(r, _)| r).collect();
            if members.is_empty() {
                continue;
            }
            let dim = members[0].len();
            for d in 0..dim {
                let mean = members.iter().map(|m| m[d]).sum::<f64>() / members.len() as f64;
                cost += members.iter().map(|m| (m[d] - mean).powi(2)).sum::<f64>();
            }
        }
        if cost < best.0 {
            best = (cost, labels);
        }
    }
    best
}
