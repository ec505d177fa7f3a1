//! Baseline top-N recommender and the heuristic network-friendly recommenders.

use std::collections::HashSet;

use crate::catalog::{CacheSet, ScoreMatrix};
use crate::demand::RecommendationPolicy;
use crate::error::{Error, Result};

/// Admission slack for the quality test, relative to the baseline quality.
const QUALITY_SLACK: f64 = 1e-12;

/// Items of row `i` ranked by score (descending, ties by index), followed by
/// zero-score items in ascending index order. Never contains `i`.
pub fn ranked_row(u: &ScoreMatrix, i: usize) -> Vec<(usize, f64)> {
    let mut ranked: Vec<(usize, f64)> = u.row(i).to_vec();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let positive: HashSet<usize> = ranked.iter().map(|&(j, _)| j).collect();
    ranked.extend(
        (0..u.size())
            .filter(|&j| j != i && !positive.contains(&j))
            .map(|j| (j, 0.0)),
    );
    ranked
}

/// First `count` entries of [`ranked_row`].
pub fn top_items(u: &ScoreMatrix, i: usize, count: usize) -> Vec<(usize, f64)> {
    let mut ranked: Vec<(usize, f64)> = u.row(i).to_vec();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(count);
    if ranked.len() < count {
        let row = u.row(i);
        let mut pad = (0..u.size())
            .filter(|&j| j != i && row.binary_search_by_key(&j, |&(c, _)| c).is_err());
        while ranked.len() < count {
            match pad.next() {
                Some(j) => ranked.push((j, 0.0)),
                None => break,
            }
        }
    }
    ranked
}

/// The baseline recommender: top-`N` lists per content and their quality.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineProfile {
    /// `R_i^BS` in ranking order.
    pub lists: Vec<Vec<usize>>,
    /// `q_i^BS`, the summed score of each baseline list.
    pub quality: Vec<f64>,
    pub policy: RecommendationPolicy,
}

impl BaselineProfile {
    pub fn list_size(&self) -> usize {
        self.policy.list_size()
    }

    pub fn size(&self) -> usize {
        self.lists.len()
    }
}

/// Top-`N` recommendations per row. Rows with fewer than `N` scored items are
/// padded with the lowest-index zero-score contents.
pub fn baseline_policy(u: &ScoreMatrix, list_size: usize) -> Result<BaselineProfile> {
    if list_size == 0 || list_size >= u.size() {
        return Err(Error::Config(format!(
            "list size N = {list_size} must satisfy 0 < N < K = {}",
            u.size()
        )));
    }
    let mut lists = Vec::with_capacity(u.size());
    let mut quality = Vec::with_capacity(u.size());
    for i in 0..u.size() {
        let top = top_items(u, i, list_size);
        quality.push(top.iter().map(|&(_, s)| s).sum());
        lists.push(top.into_iter().map(|(j, _)| j).collect::<Vec<_>>());
    }
    let policy = RecommendationPolicy::from_lists(list_size, &lists)?;
    Ok(BaselineProfile {
        lists,
        quality,
        policy,
    })
}

/// Greedy network-friendly recommender.
///
/// Cached items are considered in ranking order. A candidate is admitted when
/// the list made of the admitted items, the candidate, and the best remaining
/// items still reaches `q * q_i^BS`. The final list is the admitted items
/// completed with the best remaining items.
pub fn greedy_nfr(
    u: &ScoreMatrix,
    baseline: &BaselineProfile,
    cache: &CacheSet,
    q: f64,
) -> Result<RecommendationPolicy> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Config(format!("quality factor q = {q} outside [0, 1]")));
    }
    check_sizes(u, baseline, cache)?;
    let n = baseline.list_size();
    let lists: Vec<Vec<usize>> = (0..u.size())
        .map(|i| {
            let ranked = ranked_row(u, i);
            let required = q * baseline.quality[i] * (1.0 - QUALITY_SLACK);
            let mut admitted: Vec<usize> = Vec::with_capacity(n);
            for &(c, _) in ranked.iter().filter(|(j, _)| cache.contains(*j)) {
                if admitted.len() == n {
                    break;
                }
                admitted.push(c);
                let quality: f64 = complete(&ranked, &admitted, n).iter().map(|&(_, s)| s).sum();
                if quality < required {
                    admitted.pop();
                }
            }
            complete(&ranked, &admitted, n)
                .into_iter()
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    RecommendationPolicy::from_lists(n, &lists)
}

/// `chosen` followed by the best-ranked items not already chosen, `n` in total.
fn complete(ranked: &[(usize, f64)], chosen: &[usize], n: usize) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = chosen
        .iter()
        .map(|&c| {
            let score = ranked
                .iter()
                .find(|(j, _)| *j == c)
                .map_or(0.0, |&(_, s)| s);
            (c, score)
        })
        .collect();
    out.extend(
        ranked
            .iter()
            .filter(|(j, _)| !chosen.contains(j))
            .take(n.saturating_sub(chosen.len())),
    );
    out
}

/// Breadth-first search over baseline lists from each content.
///
/// Depth 1 is the top-`width` ranked items of the row; each further level
/// expands the newly discovered nodes of the previous level through their own
/// top-`width` items, in discovery order. Cached items are collected in
/// discovery order (at most `N`), and the list is completed with the baseline
/// list.
pub fn cabaret(
    u: &ScoreMatrix,
    baseline: &BaselineProfile,
    cache: &CacheSet,
    width: usize,
    depth: usize,
) -> Result<RecommendationPolicy> {
    if width == 0 || depth == 0 {
        return Err(Error::Config(format!(
            "BFS width ({width}) and depth ({depth}) must be at least 1"
        )));
    }
    check_sizes(u, baseline, cache)?;
    let n = baseline.list_size();
    let width = width.min(u.size() - 1);
    let lists: Vec<Vec<usize>> = (0..u.size())
        .map(|i| {
            let mut visited = HashSet::from([i]);
            let mut found: Vec<usize> = Vec::with_capacity(n);
            let mut frontier: Vec<usize> = top_items(u, i, width)
                .into_iter()
                .map(|(j, _)| j)
                .filter(|j| visited.insert(*j))
                .collect();
            for level in 1..=depth {
                found.extend(
                    frontier
                        .iter()
                        .copied()
                        .filter(|&j| cache.contains(j))
                        .take(n - found.len()),
                );
                if found.len() == n || level == depth {
                    break;
                }
                let mut next = Vec::new();
                for &x in &frontier {
                    for (y, _) in top_items(u, x, width) {
                        if visited.insert(y) {
                            next.push(y);
                        }
                    }
                }
                frontier = next;
            }
            for &j in &baseline.lists[i] {
                if found.len() == n {
                    break;
                }
                if !found.contains(&j) {
                    found.push(j);
                }
            }
            found
        })
        .collect();
    RecommendationPolicy::from_lists(n, &lists)
}

/// Per-row quality of `policy` relative to the baseline list quality.
/// Rows whose baseline quality is zero report 1.
pub fn qor_ratio(
    policy: &RecommendationPolicy,
    u: &ScoreMatrix,
    baseline: &BaselineProfile,
) -> Vec<f64> {
    (0..policy.size())
        .map(|i| {
            let qbs = baseline.quality[i];
            if qbs <= 0.0 {
                return 1.0;
            }
            let q: f64 = policy.row(i).iter().map(|&(j, r)| r * u.get(i, j)).sum();
            q / qbs
        })
        .collect()
}

fn check_sizes(u: &ScoreMatrix, baseline: &BaselineProfile, cache: &CacheSet) -> Result<()> {
    for actual in [baseline.size(), cache.catalog_size()] {
        if actual != u.size() {
            return Err(Error::DimensionMismatch {
                expected: u.size(),
                actual,
            });
        }
    }
    Ok(())
}
