#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sta_tsp::tsplib::{Metric, NodeCoord, TspInstance};
use sta_tsp::DistanceMatrix;

pub fn data_path(file: &str) -> String {
    format!("{}/data/{file}", env!("CARGO_MANIFEST_DIR"))
}

pub fn load(name: &str) -> TspInstance {
    TspInstance::from_file(data_path(&format!("{name}.tsp"))).expect("bundled instance parses")
}

pub const ULYSSES16_TOUR: &str = "7 6 14 13 12 16 1 3 2 4 8 15 5 11 9 10";
pub const ATT48_TOUR: &str = "9 40 15 12 11 23 3 22 16 41 34 48 5 29 2 42 26 4 35 45 10 24 32 39 25 14 13 21 47 20 33 46 36 30 43 17 27 19 37 6 28 7 18 44 31 38 8 1";
pub const BERLIN52_TOUR: &str = "3 17 21 42 7 2 30 23 20 50 29 16 46 44 34 35 36 39 40 37 38 48 24 5 15 6 4 25 12 28 27 26 47 13 14 52 11 51 33 43 10 9 8 41 19 45 32 49 1 22 31 18";

/// Uniform points in the 100 x 100 square, as a RAW_EUC instance.
pub fn random_instance(n: usize, seed: u64) -> TspInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n)
        .map(|i| NodeCoord { id: i + 1, x: rng.random::<f64>() * 100.0, y: rng.random::<f64>() * 100.0 })
        .collect();
    TspInstance {
        name: format!("random{n}-{seed}"),
        coords,
        declared_metric: Metric::Euc2d,
        active_metric: Metric::RawEuc,
    }
}

/// Exhaustive optimum: node 0 fixed first, every ordering of the rest.
pub fn brute_force_optimum(d: &DistanceMatrix) -> f64 {
    fn rec(d: &DistanceMatrix, path: &mut Vec<usize>, used: &mut [bool], acc: f64, best: &mut f64) {
        let n = d.n();
        let last = *path.last().unwrap();
        if path.len() == n {
            *best = best.min(acc + d.get(last, path[0]));
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                path.push(v);
                rec(d, path, used, acc + d.get(last, v), best);
                path.pop();
                used[v] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; d.n()];
    used[0] = true;
    rec(d, &mut vec![0], &mut used, 0.0, &mut best);
    best
}

/// Held-Karp dynamic program over subsets; fine up to ~16 nodes.
pub fn held_karp_optimum(d: &DistanceMatrix) -> f64 {
    let n = d.n();
    let m = n - 1;
    let full = (1usize << m) - 1;
    let mut dp = vec![f64::INFINITY; (1 << m) * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = d.get(0, j + 1);
    }
    for set in 1..=full {
        for j in 0..m {
            let v = dp[set * m + j];
            if v == f64::INFINITY || set & (1 << j) == 0 {
                continue;
            }
            for k in 0..m {
                if set & (1 << k) != 0 {
                    continue;
                }
                let next = set | (1 << k);
                let nv = v + d.get(j + 1, k + 1);
                if nv < dp[next * m + k] {
                    dp[next * m + k] = nv;
                }
            }
        }
    }
    (0..m).map(|j| dp[full * m + j] + d.get(j + 1, 0)).fold(f64::INFINITY, f64::min)
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}
