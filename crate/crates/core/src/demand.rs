//! Content demand induced by a recommendation policy.
//!
//! A user requests content `i`, then with probability `alpha` follows one of
//! the `N` items recommended after `i` (chosen uniformly), and otherwise
//! issues a direct request drawn from `p_d`. The long-run request frequencies
//! solve the linear system
//!
//! ```text
//! p - (alpha / N) p R = (1 - alpha) p_d
//! ```
//!
//! which [`stationary_demand`] solves on the sparse transposed form.
//! [`simulate_demand`] estimates the same quantity by running the walk.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{CacheSet, DemandDistribution, MAX_CATALOG_SIZE};
use crate::error::{Error, Result};

/// Tolerance on the row sums and entry range of a [`RecommendationPolicy`].
pub const POLICY_TOLERANCE: f64 = 1e-9;

/// Largest catalog for which the dense fallback solve is attempted.
const DENSE_FALLBACK_LIMIT: usize = 4000;

/// Row-wise recommendation frequencies `r_ij` with list size `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationPolicy {
    list_size: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl RecommendationPolicy {
    /// Validates sparse rows of `(column, frequency)` pairs. Zero entries are
    /// dropped and each row is sorted by column.
    pub fn new(list_size: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if list_size == 0 {
            return Err(Error::Config("list size N must be at least 1".into()));
        }
        let size = rows.len();
        let mut clean = Vec::with_capacity(size);
        for (i, row) in rows.into_iter().enumerate() {
            let mut row: Vec<(usize, f64)> = row.into_iter().filter(|&(_, r)| r != 0.0).collect();
            row.sort_by_key(|&(j, _)| j);
            let mut total = 0.0;
            for (pos, &(j, r)) in row.iter().enumerate() {
                if j >= size {
                    return Err(Error::Validation(format!(
                        "policy column {j} outside catalog of size {size}"
                    )));
                }
                if j == i {
                    return Err(Error::Validation(format!("self-recommendation at row {i}")));
                }
                if pos > 0 && row[pos - 1].0 == j {
                    return Err(Error::Validation(format!("duplicate policy entry ({i}, {j})")));
                }
                if !(r >= 0.0 && r <= 1.0 + POLICY_TOLERANCE) {
                    return Err(Error::Validation(format!(
                        "frequency r[{i}][{j}] = {r} outside [0, 1]"
                    )));
                }
                total += r;
            }
            if (total - list_size as f64).abs() > POLICY_TOLERANCE {
                return Err(Error::Validation(format!(
                    "row {i} sums to {total}, expected {list_size}"
                )));
            }
            clean.push(row);
        }
        Ok(Self {
            list_size,
            rows: clean,
        })
    }

    /// Deterministic policy from explicit recommendation lists.
    pub fn from_lists(list_size: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let rows = lists
            .iter()
            .map(|l| l.iter().map(|&j| (j, 1.0)).collect())
            .collect();
        Self::new(list_size, rows)
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        match row.binary_search_by_key(&j, |&(c, _)| c) {
            Ok(pos) => row[pos].1,
            Err(_) => 0.0,
        }
    }

    /// True when every entry is 0 or 1.
    pub fn is_deterministic(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .all(|&(_, r)| (r - 1.0).abs() <= POLICY_TOLERANCE)
    }

    /// Expected number of cached contents in a list drawn from row `i`.
    pub fn cached_mass(&self, i: usize, cache: &CacheSet) -> f64 {
        self.rows[i]
            .iter()
            .filter(|(j, _)| cache.contains(*j))
            .map(|(_, r)| r)
            .sum()
    }

    /// Sparse CSV: `K=<k>,N=<n>` header then `i,j,r_ij` rows.
    pub fn to_csv_string(&self) -> String {
        let mut out = format!("K={},N={}\n", self.size(), self.list_size);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, r) in row {
                let _ = writeln!(out, "{i},{j},{r}");
            }
        }
        out
    }
}

/// Parses the sparse policy CSV written by [`RecommendationPolicy::to_csv_string`].
pub fn parse_policy_csv(text: &str) -> Result<RecommendationPolicy> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `K=<int>,N=<int>` header"))?;
    let (k_part, n_part) = header
        .split_once(',')
        .ok_or_else(|| Error::parse(hline, "expected `K=<int>,N=<int>` header"))?;
    let size: usize = k_part
        .trim()
        .strip_prefix("K=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(hline, format!("bad catalog size `{k_part}`")))?;
    let list_size: usize = n_part
        .trim()
        .strip_prefix("N=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(hline, format!("bad list size `{n_part}`")))?;
    if size > MAX_CATALOG_SIZE {
        return Err(Error::parse(hline, format!("catalog size {size} exceeds limit")));
    }

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); size];
    for (line, content) in lines {
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::parse(line, "expected 3 fields `i,j,r_ij`"));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad row index `{}`", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad column index `{}`", fields[1])))?;
        let r: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad frequency `{}`", fields[2])))?;
        if i >= size {
            return Err(Error::parse(line, format!("row {i} outside declared K={size}")));
        }
        rows[i].push((j, r));
    }
    RecommendationPolicy::new(list_size, rows)
}

/// User behaviour: follow probability `alpha`, direct demand and list size.
#[derive(Debug, Clone, PartialEq)]
pub struct UserModel {
    alpha: f64,
    direct: DemandDistribution,
    list_size: usize,
}

impl UserModel {
    pub fn new(alpha: f64, direct: DemandDistribution, list_size: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        if !(direct.min() > 0.0) {
            return Err(Error::Config(
                "direct demand must be strictly positive everywhere".into(),
            ));
        }
        if list_size == 0 {
            return Err(Error::Config("list size N must be at least 1".into()));
        }
        Ok(Self {
            alpha,
            direct,
            list_size,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn direct(&self) -> &DemandDistribution {
        &self.direct
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn size(&self) -> usize {
        self.direct.len()
    }
}

fn check_compatible(policy: &RecommendationPolicy, user: &UserModel) -> Result<()> {
    if policy.size() != user.size() {
        return Err(Error::DimensionMismatch {
            expected: user.size(),
            actual: policy.size(),
        });
    }
    if policy.list_size() != user.list_size() {
        return Err(Error::Config(format!(
            "policy list size {} differs from user list size {}",
            policy.list_size(),
            user.list_size()
        )));
    }
    Ok(())
}

/// Largest absolute residual of the stationarity equations at `p`.
pub fn stationarity_residual(policy: &RecommendationPolicy, user: &UserModel, p: &[f64]) -> f64 {
    let scale = user.alpha / user.list_size as f64;
    let mut lhs: Vec<f64> = p
        .iter()
        .zip(user.direct.as_slice())
        .map(|(pj, dj)| pj - (1.0 - user.alpha) * dj)
        .collect();
    for (i, row) in policy.rows.iter().enumerate() {
        for &(j, r) in row {
            lhs[j] -= scale * p[i] * r;
        }
    }
    lhs.into_iter().map(f64::abs).fold(0.0, f64::max)
}

/// Stationary content demand of `policy` under `user`.
///
/// Uses the fixed-point iteration `p <- (1 - alpha) p_d + (alpha / N) p R`,
/// which contracts in L1 with rate `alpha`; when `alpha` is too close to 1
/// for the iteration budget, falls back to a dense LU solve.
pub fn stationary_demand(
    policy: &RecommendationPolicy,
    user: &UserModel,
) -> Result<DemandDistribution> {
    check_compatible(policy, user)?;
    let size = user.size();
    let alpha = user.alpha;
    let scale = alpha / user.list_size as f64;
    let base: Vec<f64> = user
        .direct
        .as_slice()
        .iter()
        .map(|d| (1.0 - alpha) * d)
        .collect();

    let budget = ((1e-17f64).ln() / alpha.ln()).ceil().max(10.0) as usize + 50;
    let mut p = if budget <= 20_000 {
        fixed_point(policy, &base, scale, budget)
    } else {
        None
    };
    if p.is_none() {
        if size > DENSE_FALLBACK_LIMIT {
            return Err(Error::Numerical(format!(
                "stationary iteration did not converge for alpha = {alpha} and K = {size}"
            )));
        }
        p = Some(dense_solve(policy, &base, scale)?);
    }
    let p = p.expect("solution present");

    let residual = stationarity_residual(policy, user, &p);
    if !(residual <= 1e-10) {
        return Err(Error::Numerical(format!(
            "stationary solve residual {residual:e} too large"
        )));
    }
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::Numerical(format!(
            "stationary demand of content {i} is {v}, expected > 0"
        )));
    }
    DemandDistribution::new(p)
}

fn fixed_point(
    policy: &RecommendationPolicy,
    base: &[f64],
    scale: f64,
    max_iter: usize,
) -> Option<Vec<f64>> {
    let mut p = base.to_vec();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    let mut next = vec![0.0; p.len()];
    // In L1 the distance to the fixed point is at most diff * alpha / (1 - alpha).
    let alpha = scale * policy.list_size as f64;
    let error_factor = alpha / (1.0 - alpha);
    for _ in 0..max_iter {
        next.copy_from_slice(base);
        for (i, row) in policy.rows.iter().enumerate() {
            let mass = scale * p[i];
            for &(j, r) in row {
                next[j] += mass * r;
            }
        }
        let diff: f64 = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut p, &mut next);
        if diff * error_factor <= 1e-14 {
            return Some(p);
        }
    }
    None
}

fn dense_solve(policy: &RecommendationPolicy, base: &[f64], scale: f64) -> Result<Vec<f64>> {
    let size = base.len();
    let mut a = DMatrix::<f64>::identity(size, size);
    for (i, row) in policy.rows.iter().enumerate() {
        for &(j, r) in row {
            a[(j, i)] -= scale * r;
        }
    }
    let b = DVector::from_column_slice(base);
    a.lu()
        .solve(&b)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::Numerical("stationarity matrix is singular".into()))
}

/// Draws `N` distinct items of a row by systematic sampling, so that item
/// `j` appears with probability `r_ij`.
fn systematic_list<R: Rng>(row: &[(usize, f64)], list_size: usize, rng: &mut R, out: &mut Vec<usize>) {
    out.clear();
    let mut target = rng.gen::<f64>();
    let mut cumulative = 0.0;
    let mut idx = 0;
    for _ in 0..list_size {
        while idx + 1 < row.len() && cumulative + row[idx].1 <= target {
            cumulative += row[idx].1;
            idx += 1;
        }
        out.push(row[idx].0);
        target += 1.0;
    }
}

/// Monte Carlo estimate of the stationary demand: the empirical request
/// frequencies of a `steps`-long user walk.
pub fn simulate_demand(
    policy: &RecommendationPolicy,
    user: &UserModel,
    steps: usize,
    seed: u64,
) -> Result<DemandDistribution> {
    check_compatible(policy, user)?;
    if steps == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direct = WeightedIndex::new(user.direct.as_slice())
        .map_err(|e| Error::Validation(format!("direct demand: {e}")))?;
    let mut counts = vec![0u64; user.size()];
    let mut list = Vec::with_capacity(user.list_size);

    let mut current = direct.sample(&mut rng);
    counts[current] += 1;
    for _ in 1..steps {
        current = if rng.gen::<f64>() < user.alpha {
            systematic_list(policy.row(current), user.list_size, &mut rng, &mut list);
            list[rng.gen_range(0..list.len())]
        } else {
            direct.sample(&mut rng)
        };
        counts[current] += 1;
    }
    DemandDistribution::from_weights(counts.into_iter().map(|c| c as f64).collect())
}

/// Cache hit ratio: demand mass on cached contents.
pub fn chr(p: &DemandDistribution, cache: &CacheSet) -> f64 {
    cache.members().iter().filter_map(|&i| p.as_slice().get(i)).sum()
}

/// Network gain `CHR(p_nf) - CHR(p_bs)`.
pub fn network_gain(p_nf: &DemandDistribution, p_bs: &DemandDistribution, cache: &CacheSet) -> f64 {
    cache
        .members()
        .iter()
        .filter_map(|&i| Some(p_nf.as_slice().get(i)? - p_bs.as_slice().get(i)?))
        .sum()
}
