//! Content catalogs: sparse recommendation-score matrices, direct-demand
//! distributions and cache sets.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest catalog accepted from external input.
pub const MAX_CATALOG_SIZE: usize = 1 << 22;

/// Absolute tolerance on the total mass of a [`DemandDistribution`].
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Sparse `K x K` matrix of recommendation scores `u_ij` in `(0, 1]`.
///
/// Each row holds `(column, score)` pairs sorted by column. Absent entries are
/// zero and the diagonal is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    size: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl ScoreMatrix {
    pub fn empty(size: usize) -> Self {
        Self {
            size,
            rows: vec![Vec::new(); size],
        }
    }

    /// Builds a matrix from `(i, j, score)` triples. Diagonal triples are
    /// dropped; duplicates and out-of-range scores are rejected.
    pub fn from_entries<I>(size: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut rows = vec![Vec::new(); size];
        for (i, j, score) in entries {
            check_entry(size, i, j, score)?;
            if i != j {
                rows[i].push((j, score));
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::Validation(format!(
                    "duplicate entry ({i}, {})",
                    w[0].0
                )));
            }
        }
        Ok(Self { size, rows })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nnz() == 0
    }

    /// Stored entries of row `i`, sorted by column.
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

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, u)| (i, j, u)))
    }

    /// Neighbours of every node in the undirected support graph.
    fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.size];
        for (i, j, _) in self.entries() {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Connected components of the undirected support graph, each sorted
    /// ascending, listed in order of their smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.undirected_adjacency();
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for start in 0..self.size {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut out = format!("K={}\n", self.size);
        for (i, j, u) in self.entries() {
            let _ = writeln!(out, "{i},{j},{u}");
        }
        out
    }

    pub fn write_edge_list<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(self.to_edge_list_string().as_bytes())
    }
}

fn check_entry(size: usize, i: usize, j: usize, score: f64) -> Result<()> {
    if i >= size || j >= size {
        return Err(Error::Validation(format!(
            "index ({i}, {j}) outside catalog of size {size}"
        )));
    }
    if !(score > 0.0 && score <= 1.0) {
        return Err(Error::Validation(format!(
            "score {score} at ({i}, {j}) outside (0, 1]"
        )));
    }
    Ok(())
}

/// A parsed edge list together with the number of self-loops that were dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedMatrix {
    pub matrix: ScoreMatrix,
    pub self_loops_dropped: usize,
}

/// Parses the edge-list format: a `K=<int>` header followed by `i,j,score`
/// rows. Blank lines and lines starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<LoadedMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `K=<int>` header"))?;
    let size = parse_header(header_line, header)?;

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); size];
    let mut self_loops = 0;
    for (line, content) in lines {
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                line,
                format!("expected 3 fields `i,j,score`, found {}", fields.len()),
            ));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad row index `{}`", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad column index `{}`", fields[1])))?;
        let score: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad score `{}`", fields[2])))?;
        if i >= size || j >= size {
            return Err(Error::parse(
                line,
                format!("index ({i}, {j}) outside declared K={size}"),
            ));
        }
        check_entry(size, i, j, score).map_err(|e| match e {
            Error::Validation(msg) => Error::Validation(format!("line {line}: {msg}")),
            other => other,
        })?;
        if i == j {
            self_loops += 1;
            continue;
        }
        rows[i].push((j, score));
    }

    for (i, row) in rows.iter_mut().enumerate() {
        row.sort_by_key(|&(j, _)| j);
        if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Validation(format!(
                "duplicate entry ({i}, {})",
                w[0].0
            )));
        }
    }
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-loop entries");
    }
    Ok(LoadedMatrix {
        matrix: ScoreMatrix { size, rows },
        self_loops_dropped: self_loops,
    })
}

fn parse_header(line: usize, header: &str) -> Result<usize> {
    let value = header
        .strip_prefix("K=")
        .ok_or_else(|| Error::parse(line, format!("expected `K=<int>` header, found `{header}`")))?;
    let size: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("bad catalog size `{value}`")))?;
    if size > MAX_CATALOG_SIZE {
        return Err(Error::parse(
            line,
            format!("catalog size {size} exceeds limit {MAX_CATALOG_SIZE}"),
        ));
    }
    Ok(size)
}

pub fn load_score_matrix(path: impl AsRef<Path>) -> Result<LoadedMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}

/// Keeps entries strictly above `threshold` and sets them to 1.
pub fn threshold_binarize(m: &ScoreMatrix, threshold: f64) -> Result<ScoreMatrix> {
    if !(0.0..1.0).contains(&threshold) {
        return Err(Error::Validation(format!(
            "threshold {threshold} outside [0, 1)"
        )));
    }
    let rows = m
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .filter(|&&(_, u)| u > threshold)
                .map(|&(j, _)| (j, 1.0))
                .collect()
        })
        .collect();
    Ok(ScoreMatrix { size: m.size, rows })
}

/// Old-to-new index mapping produced by [`largest_connected_component`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMapping {
    pub old_to_new: Vec<Option<usize>>,
    pub new_to_old: Vec<usize>,
}

impl IndexMapping {
    pub fn is_identity(&self) -> bool {
        self.old_to_new.len() == self.new_to_old.len()
            && self.new_to_old.iter().enumerate().all(|(n, &o)| n == o)
    }
}

/// Restricts `m` to the largest component of its undirected support graph.
/// Ties go to the component holding the smallest original index.
pub fn largest_connected_component(m: &ScoreMatrix) -> (ScoreMatrix, IndexMapping) {
    let mut best: Vec<usize> = Vec::new();
    for comp in m.components() {
        if comp.len() > best.len() {
            best = comp;
        }
    }
    let mut old_to_new = vec![None; m.size];
    for (new, &old) in best.iter().enumerate() {
        old_to_new[old] = Some(new);
    }
    let rows = best
        .iter()
        .map(|&old| {
            m.rows[old]
                .iter()
                .filter_map(|&(j, u)| old_to_new[j].map(|nj| (nj, u)))
                .collect()
        })
        .collect();
    (
        ScoreMatrix {
            size: best.len(),
            rows,
        },
        IndexMapping {
            old_to_new,
            new_to_old: best,
        },
    )
}

/// Random sparse catalog with `avg_out_degree` scored successors per row
/// plus a random spanning cycle that makes the support graph connected.
pub fn synthetic_catalog(size: usize, avg_out_degree: usize, seed: u64) -> Result<ScoreMatrix> {
    if avg_out_degree == 0 || avg_out_degree >= size {
        return Err(Error::Config(format!(
            "need 0 < avg_out_degree < K, got degree {avg_out_degree} with K={size}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(size);
    for i in 0..size {
        let mut row: Vec<(usize, f64)> = rand::seq::index::sample(&mut rng, size - 1, avg_out_degree)
            .into_iter()
            .map(|j| if j >= i { j + 1 } else { j })
            .map(|j| (j, 1.0 - rng.gen::<f64>()))
            .collect();
        row.sort_by_key(|&(j, _)| j);
        rows.push(row);
    }

    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(&mut rng);
    for k in 0..size {
        let (from, to) = (order[k], order[(k + 1) % size]);
        let row = &mut rows[from];
        if let Err(pos) = row.binary_search_by_key(&to, |&(j, _)| j) {
            row.insert(pos, (to, 1.0 - rng.gen::<f64>()));
        }
    }
    Ok(ScoreMatrix { size, rows })
}

/// Probability vector over the catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DemandDistribution(Vec<f64>);

impl DemandDistribution {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation("empty distribution".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::Validation(format!("entry {i} = {v} is not a probability")));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
            return Err(Error::Validation(format!(
                "distribution sums to {total}, not 1"
            )));
        }
        Ok(Self(values))
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Validation("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Validation("weights sum to zero".into()));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Self::from_weights(vec![1.0; size])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("index,probability\n");
        for (i, p) in self.0.iter().enumerate() {
            let _ = writeln!(out, "{i},{p}");
        }
        out
    }
}

impl std::ops::Index<usize> for DemandDistribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for DemandDistribution {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<DemandDistribution> for Vec<f64> {
    fn from(d: DemandDistribution) -> Self {
        d.0
    }
}

/// Parses `index,probability` rows (optional header). Every index in
/// `0..K` must appear exactly once.
pub fn parse_demand_csv(text: &str) -> Result<DemandDistribution> {
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if entries.is_empty() && content.eq_ignore_ascii_case("index,probability") {
            continue;
        }
        let (idx, prob) = content
            .split_once(',')
            .ok_or_else(|| Error::parse(line, "expected `index,probability`"))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("bad index `{}`", idx.trim())))?;
        let prob: f64 = prob
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("bad probability `{}`", prob.trim())))?;
        entries.push((idx, prob));
    }
    let size = entries.len();
    let mut values = vec![f64::NAN; size];
    for (idx, prob) in entries {
        if idx >= size {
            return Err(Error::Validation(format!(
                "index {idx} outside 0..{size}"
            )));
        }
        if !values[idx].is_nan() {
            return Err(Error::Validation(format!("duplicate index {idx}")));
        }
        values[idx] = prob;
    }
    DemandDistribution::new(values)
}

/// Zipf direct demand: `p_i ∝ (i + 1)^-s`, index 0 being the most popular.
pub fn zipf_direct_demand(size: usize, exponent: f64) -> Result<DemandDistribution> {
    if size == 0 {
        return Err(Error::Config("catalog must be non-empty".into()));
    }
    if !(exponent >= 0.0 && exponent.is_finite()) {
        return Err(Error::Config(format!("Zipf exponent {exponent} must be >= 0")));
    }
    let weights = (0..size)
        .map(|i| ((i + 1) as f64).powf(-exponent))
        .collect();
    DemandDistribution::from_weights(weights)
}

/// Set of cached contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheSet {
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl CacheSet {
    pub fn new(catalog_size: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; catalog_size];
        let mut members = Vec::new();
        for i in indices {
            if i >= catalog_size {
                return Err(Error::Validation(format!(
                    "cache index {i} outside catalog of size {catalog_size}"
                )));
            }
            if mask[i] {
                return Err(Error::Validation(format!("duplicate cache index {i}")));
            }
            mask[i] = true;
            members.push(i);
        }
        members.sort_unstable();
        Ok(Self { members, mask })
    }

    pub fn empty(catalog_size: usize) -> Self {
        Self {
            members: Vec::new(),
            mask: vec![false; catalog_size],
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn catalog_size(&self) -> usize {
        self.mask.len()
    }

    /// Cached indices in ascending order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parses_simple_edge_list() {
        let loaded = parse_edge_list("K=3\n0,1,0.8\n1,2,0.5\n").unwrap();
        assert_eq!(loaded.matrix.size(), 3);
        assert_eq!(loaded.matrix.nnz(), 2);
        assert_eq!(loaded.matrix.get(0, 1), 0.8);
        assert_eq!(loaded.matrix.get(1, 2), 0.5);
        assert_eq!(loaded.self_loops_dropped, 0);
    }

    #[test]
    fn self_loops_are_dropped_and_counted() {
        let loaded = parse_edge_list("K=2\n0,0,0.9\n0,1,0.3\n").unwrap();
        assert_eq!(loaded.matrix.nnz(), 1);
        assert_eq!(loaded.self_loops_dropped, 1);
    }

    #[test]
    fn score_out_of_range_is_a_validation_error() {
        let err = parse_edge_list("K=2\n0,1,1.3\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
        let err = parse_edge_list("K=2\n0,1,0\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        match parse_edge_list("K=3\n0,1,0.5\n\n1;2;0.4\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other}"),
        }
        match parse_edge_list("K=3\n0,7,0.5\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
        assert!(matches!(
            parse_edge_list("0,1,0.5\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(parse_edge_list("").is_err());
    }

    #[test]
    fn duplicate_rows_are_rejected() {
        assert!(matches!(
            parse_edge_list("K=3\n0,1,0.5\n0,1,0.6\n").unwrap_err(),
            Error::Validation(_)
        ));
    }

    #[test]
    fn edge_list_round_trips() {
        let m = synthetic_catalog(12, 3, 1).unwrap();
        let back = parse_edge_list(&m.to_edge_list_string()).unwrap().matrix;
        assert_eq!(back, m);
    }

    #[test]
    fn threshold_is_strictly_above() {
        let m = ScoreMatrix::from_entries(4, [(0, 1, 0.05), (0, 2, 0.1), (0, 3, 0.2)]).unwrap();
        let b = threshold_binarize(&m, 0.1).unwrap();
        assert_eq!(b.row(0), &[(3, 1.0)]);

        let all = threshold_binarize(&m, 0.0).unwrap();
        assert_eq!(all.nnz(), 3);
        assert!(all.entries().all(|(_, _, u)| u == 1.0));

        let empty = threshold_binarize(&ScoreMatrix::empty(5), 0.3).unwrap();
        assert!(empty.is_empty());
        assert!(threshold_binarize(&m, 1.0).is_err());
        assert!(threshold_binarize(&m, -0.1).is_err());
    }

    fn clique(offset: usize, n: usize) -> Vec<(usize, usize, f64)> {
        let mut e = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    e.push((offset + a, offset + b, 0.5));
                }
            }
        }
        e
    }

    #[test]
    fn lcc_keeps_the_larger_clique() {
        let mut entries = clique(0, 3);
        entries.extend(clique(3, 5));
        let m = ScoreMatrix::from_entries(8, entries).unwrap();
        let (sub, map) = largest_connected_component(&m);
        assert_eq!(sub.size(), 5);
        assert_eq!(sub.nnz(), 20);
        assert_eq!(map.new_to_old, vec![3, 4, 5, 6, 7]);
        assert_eq!(map.old_to_new[0], None);
        assert_eq!(map.old_to_new[5], Some(2));
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let m = synthetic_catalog(20, 2, 9).unwrap();
        let (sub, map) = largest_connected_component(&m);
        assert!(map.is_identity());
        assert_eq!(sub, m);
    }

    #[test]
    fn lcc_tie_goes_to_smallest_index() {
        // Two 4-node paths interleaved: {1,3,5,7} and {0,2,4,6}.
        let m = ScoreMatrix::from_entries(
            8,
            [
                (1, 3, 1.0),
                (3, 5, 1.0),
                (5, 7, 1.0),
                (2, 0, 1.0),
                (4, 2, 1.0),
                (6, 4, 1.0),
            ],
        )
        .unwrap();
        let comps = m.components();
        assert_eq!(comps, vec![vec![0, 2, 4, 6], vec![1, 3, 5, 7]]);
        let (_, map) = largest_connected_component(&m);
        assert_eq!(map.new_to_old, vec![0, 2, 4, 6]);
    }

    #[test]
    fn zipf_examples() {
        let u = zipf_direct_demand(3, 0.0).unwrap();
        for p in u.as_slice() {
            assert_abs_diff_eq!(*p, 1.0 / 3.0, epsilon = 1e-15);
        }
        let z = zipf_direct_demand(3, 1.0).unwrap();
        let expected = [6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0];
        for (p, e) in z.as_slice().iter().zip(expected) {
            assert_abs_diff_eq!(*p, e, epsilon = 1e-15);
        }
        assert_eq!(zipf_direct_demand(1, 2.5).unwrap().as_slice(), &[1.0]);
        assert!(zipf_direct_demand(0, 1.0).is_err());
        assert!(zipf_direct_demand(3, -1.0).is_err());
    }

    #[test]
    fn synthetic_catalog_is_deterministic_and_connected() {
        let a = synthetic_catalog(10, 3, 7).unwrap();
        let b = synthetic_catalog(10, 3, 7).unwrap();
        let c = synthetic_catalog(10, 3, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.is_connected());
        assert!(a.entries().all(|(i, j, u)| i != j && u > 0.0 && u <= 1.0));
        assert!(synthetic_catalog(5, 5, 0).is_err());
        assert!(synthetic_catalog(5, 0, 0).is_err());
    }

    #[test]
    fn demand_distribution_validation() {
        assert!(DemandDistribution::new(vec![0.5, 0.5]).is_ok());
        assert!(DemandDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(DemandDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(DemandDistribution::new(vec![]).is_err());
        assert!(DemandDistribution::from_weights(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn demand_csv_round_trip_and_errors() {
        let d = zipf_direct_demand(5, 1.0).unwrap();
        let back = parse_demand_csv(&d.to_csv_string()).unwrap();
        assert_eq!(back, d);
        assert!(parse_demand_csv("0,0.5\n0,0.5\n").is_err());
        assert!(parse_demand_csv("0,0.5\n2,0.5\n").is_err());
        assert!(matches!(
            parse_demand_csv("0,0.5\nfoo\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
    }

    #[test]
    fn cache_set_validation() {
        let c = CacheSet::new(5, [3, 1]).unwrap();
        assert_eq!(c.members(), &[1, 3]);
        assert!(c.contains(3) && !c.contains(0) && !c.contains(99));
        assert!(CacheSet::new(5, [1, 1]).is_err());
        assert!(CacheSet::new(5, [5]).is_err());
    }
}
