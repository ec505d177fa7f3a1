//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use fairnfr::catalog::{CacheSet, DemandDistribution, ScoreMatrix};
use fairnfr::demand::{RecommendationPolicy, UserModel};

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let d = a[col][col];
        assert!(d.abs() > 1e-14, "singular system");
        for row in col + 1..n {
            let f = a[row][col] / d;
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Stationary demand from the dense system `p_j - (a/N) sum_i p_i r_ij = (1-a) pd_j`.
pub fn stationary_oracle(policy: &RecommendationPolicy, user: &UserModel) -> Vec<f64> {
    let k = policy.size();
    let scale = user.alpha() / user.list_size() as f64;
    let mut a = vec![vec![0.0; k]; k];
    for (j, row) in a.iter_mut().enumerate() {
        row[j] = 1.0;
    }
    for i in 0..k {
        for &(j, r) in policy.row(i) {
            a[j][i] -= scale * r;
        }
    }
    let b = user
        .direct()
        .as_slice()
        .iter()
        .map(|&d| (1.0 - user.alpha()) * d)
        .collect();
    dense_solve(a, b)
}

pub fn tv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn chr_of(p: &[f64], cache: &CacheSet) -> f64 {
    cache.members().iter().map(|&i| p[i]).sum()
}

/// Calls `visit` with every deterministic single-item policy (`N = 1`) of a
/// `k`-content catalog, as the list of chosen successors.
pub fn for_each_single_item_policy(k: usize, mut visit: impl FnMut(&[usize])) {
    let mut choice: Vec<usize> = (0..k).map(|i| if i == 0 { 1 } else { 0 }).collect();
    loop {
        visit(&choice);
        let mut pos = 0;
        loop {
            if pos == k {
                return;
            }
            let mut next = choice[pos] + 1;
            if next == pos {
                next += 1;
            }
            if next < k {
                choice[pos] = next;
                break;
            }
            choice[pos] = if pos == 0 { 1 } else { 0 };
            pos += 1;
        }
    }
}

pub fn dist(v: &[f64]) -> DemandDistribution {
    DemandDistribution::from_weights(v.to_vec()).unwrap()
}

/// Dense random score matrix with roughly `density` of the off-diagonal
/// entries present.
pub fn random_scores(k: usize, density: f64, rng: &mut impl rand::Rng) -> ScoreMatrix {
    let mut entries = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i != j && rng.gen::<f64>() < density {
                entries.push((i, j, rng.gen_range(0.05..1.0)));
            }
        }
    }
    ScoreMatrix::from_entries(k, entries).unwrap()
}
