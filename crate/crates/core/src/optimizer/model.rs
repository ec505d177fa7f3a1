use serde::{Deserialize, Serialize};

use crate::catalog::{CacheSet, ScoreMatrix};
use crate::demand::{stationary_demand, UserModel};
use crate::error::{Error, Result};
use crate::recsys::{top_items, BaselineProfile};

use super::cuts::{tangent_cuts, DEFAULT_CUT_COUNT, DEFAULT_CUT_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// What a variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    /// `w_ij = p_i * r_ij`.
    Flow { from: usize, to: usize },
    /// `p_i`, the demand of content `i`.
    Demand(usize),
    /// Auxiliary `z_i` of the fairness block.
    Aux(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub role: VarRole,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Stationarity,
    Quality,
    Budget,
    NoSelf,
    BoxUpper,
    Fairness,
    TangentCut,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub coeffs: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, c)| c * x[v.0]).sum()
    }

    /// Amount by which `x` violates the constraint (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let a = self.activity(x);
        match self.relation {
            Relation::Le => (a - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - a).max(0.0),
            Relation::Eq => (a - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FairnessMetric {
    #[serde(rename = "f_max")]
    Max,
    #[serde(rename = "f_tv")]
    Tv,
    #[serde(rename = "f_kl")]
    Kl,
}

impl FairnessMetric {
    pub fn name(self) -> &'static str {
        match self {
            FairnessMetric::Max => "f_max",
            FairnessMetric::Tv => "f_tv",
            FairnessMetric::Kl => "f_kl",
        }
    }
}

impl std::str::FromStr for FairnessMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f_max" | "max" | "fmax" => Ok(FairnessMetric::Max),
            "f_tv" | "tv" | "ftv" => Ok(FairnessMetric::Tv),
            "f_kl" | "kl" | "fkl" => Ok(FairnessMetric::Kl),
            other => Err(Error::Config(format!("unknown fairness metric `{other}`"))),
        }
    }
}

/// Fairness constraint `F(p_bs, p_nf) <= budget`. KL budgets are in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessConstraintSpec {
    pub metric: FairnessMetric,
    pub budget: f64,
    #[serde(default = "default_cut_count")]
    pub cut_count: usize,
    #[serde(default = "default_cut_step")]
    pub cut_step: f64,
    /// Continue each content's cut family, with the same step, down to its
    /// demand floor `(1 - alpha) p_d(i)` when that lies below the deepest
    /// default tangent point.
    #[serde(default = "default_extend")]
    pub extend_to_floor: bool,
}

fn default_extend() -> bool {
    true
}

fn default_cut_count() -> usize {
    DEFAULT_CUT_COUNT
}

fn default_cut_step() -> f64 {
    DEFAULT_CUT_STEP
}

impl FairnessConstraintSpec {
    pub fn new(metric: FairnessMetric, budget: f64) -> Self {
        Self {
            metric,
            budget,
            cut_count: DEFAULT_CUT_COUNT,
            cut_step: DEFAULT_CUT_STEP,
            extend_to_floor: true,
        }
    }

    /// Number of cuts for a content whose demand cannot drop below `floor`.
    pub fn cuts_for_floor(&self, floor: f64) -> usize {
        if !self.extend_to_floor || !(floor > 0.0) {
            return self.cut_count;
        }
        let needed = ((1.0 / floor).ln() / self.cut_step).ceil() as usize + 1;
        self.cut_count.max(needed)
    }
}

/// Which flow variables `w_ij` a row gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateMode {
    /// Scored items, cached items and the baseline list.
    #[default]
    Sparse,
    /// Every other content.
    Full,
}

/// Columns that receive a flow variable in each row, ascending.
///
/// A row's candidates are its positively scored items and the cached items,
/// plus its baseline list (which pads rows with fewer than `N` scored items
/// with the lowest-index zero-score contents).
pub fn candidate_set(u: &ScoreMatrix, cache: &CacheSet, list_size: usize) -> Vec<Vec<usize>> {
    (0..u.size())
        .map(|i| {
            let mut cands: Vec<usize> = u.row(i).iter().map(|&(j, _)| j).collect();
            cands.extend(cache.members().iter().copied().filter(|&j| j != i));
            cands.extend(top_items(u, i, list_size).into_iter().map(|(j, _)| j));
            cands.sort_unstable();
            cands.dedup();
            cands
        })
        .collect()
}

/// The fair network-friendly recommendation linear program.
///
/// Maximizes the cached demand subject to stationarity, quality, budget,
/// box constraints and, optionally, a fairness block.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub variables: Vec<Variable>,
    /// Objective coefficients, maximized.
    pub objective: Vec<(VarId, f64)>,
    pub constraints: Vec<Constraint>,
    /// Per row `i`, the `(j, w_ij)` flow variables in ascending `j`, including `w_ii`.
    pub flows: Vec<Vec<(usize, VarId)>>,
    pub demand: Vec<VarId>,
    pub aux: Option<Vec<VarId>>,
    pub list_size: usize,
}

impl LpModel {
    fn add_var(&mut self, role: VarRole, lower: f64, upper: f64) -> VarId {
        self.variables.push(Variable { role, lower, upper });
        VarId(self.variables.len() - 1)
    }

    fn add(&mut self, kind: ConstraintKind, coeffs: Vec<(VarId, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            kind,
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn size(&self) -> usize {
        self.demand.len()
    }

    pub fn count(&self, kind: ConstraintKind) -> usize {
        self.constraints.iter().filter(|c| c.kind == kind).count()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * x[v.0]).sum()
    }

    /// Largest violation of any constraint or variable bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|c| c.violation(x))
            .fold(0.0, f64::max);
        let bounds = self
            .variables
            .iter()
            .zip(x)
            .map(|(v, &val)| (v.lower - val).max(val - v.upper).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    /// Assembles the point `(w, p, z)` from a per-row flow table.
    pub fn point_from(&self, flows: &[Vec<(usize, f64)>], demand: &[f64], aux: Option<&[f64]>) -> Vec<f64> {
        let mut x = vec![0.0; self.variables.len()];
        for (i, row) in flows.iter().enumerate() {
            for &(j, w) in row {
                if let Ok(pos) = self.flows[i].binary_search_by_key(&j, |&(c, _)| c) {
                    x[self.flows[i][pos].1 .0] = w;
                }
            }
        }
        for (v, &p) in self.demand.iter().zip(demand) {
            x[v.0] = p;
        }
        if let (Some(vars), Some(vals)) = (&self.aux, aux) {
            for (v, &z) in vars.iter().zip(vals) {
                x[v.0] = z;
            }
        }
        x
    }
}

/// Builds the LP with sparse candidate sets.
pub fn build_fair_nfr_lp(
    u: &ScoreMatrix,
    baseline: &BaselineProfile,
    cache: &CacheSet,
    user: &UserModel,
    q: f64,
    spec: Option<&FairnessConstraintSpec>,
) -> Result<LpModel> {
    build_fair_nfr_lp_with(u, baseline, cache, user, q, spec, CandidateMode::Sparse)
}

pub fn build_fair_nfr_lp_with(
    u: &ScoreMatrix,
    baseline: &BaselineProfile,
    cache: &CacheSet,
    user: &UserModel,
    q: f64,
    spec: Option<&FairnessConstraintSpec>,
    mode: CandidateMode,
) -> Result<LpModel> {
    let k = u.size();
    for actual in [baseline.size(), cache.catalog_size(), user.size()] {
        if actual != k {
            return Err(Error::DimensionMismatch { expected: k, actual });
        }
    }
    let n = baseline.list_size();
    if user.list_size() != n {
        return Err(Error::Config(format!(
            "user list size {} differs from baseline list size {n}",
            user.list_size()
        )));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Config(format!("quality factor q = {q} outside [0, 1]")));
    }
    if let Some(spec) = spec {
        if !spec.budget.is_finite() {
            return Err(Error::Config(format!("fairness budget {} is not finite", spec.budget)));
        }
    }

    let candidates = match mode {
        CandidateMode::Sparse => candidate_set(u, cache, n),
        CandidateMode::Full => (0..k).map(|i| (0..k).filter(|&j| j != i).collect()).collect(),
    };

    let mut model = LpModel {
        variables: Vec::new(),
        objective: Vec::new(),
        constraints: Vec::new(),
        flows: Vec::with_capacity(k),
        demand: Vec::with_capacity(k),
        aux: None,
        list_size: n,
    };
    for i in 0..k {
        let mut cols = candidates[i].clone();
        let pos = cols.binary_search(&i).unwrap_err();
        cols.insert(pos, i);
        let row = cols
            .into_iter()
            .map(|j| (j, model.add_var(VarRole::Flow { from: i, to: j }, 0.0, f64::INFINITY)))
            .collect();
        model.flows.push(row);
    }
    for i in 0..k {
        let v = model.add_var(VarRole::Demand(i), 0.0, f64::INFINITY);
        model.demand.push(v);
    }
    model.objective = cache.members().iter().map(|&i| (model.demand[i], 1.0)).collect();

    // Stationarity: p_j - (alpha/N) sum_i w_ij = (1 - alpha) p_d(j).
    let alpha = user.alpha();
    let scale = alpha / n as f64;
    let mut inflow: Vec<Vec<(VarId, f64)>> = (0..k).map(|j| vec![(model.demand[j], 1.0)]).collect();
    for row in &model.flows {
        for &(j, v) in row {
            inflow[j].push((v, -scale));
        }
    }
    for (j, coeffs) in inflow.into_iter().enumerate() {
        let rhs = (1.0 - alpha) * user.direct()[j];
        model.add(ConstraintKind::Stationarity, coeffs, Relation::Eq, rhs);
    }

    // Quality: sum_j u_ij w_ij - q q_i^BS p_i >= 0.
    for i in 0..k {
        let mut coeffs: Vec<(VarId, f64)> = model.flows[i]
            .iter()
            .filter(|&&(j, _)| j != i)
            .filter_map(|&(j, v)| {
                let s = u.get(i, j);
                (s > 0.0).then_some((v, s))
            })
            .collect();
        let required = q * baseline.quality[i];
        if required != 0.0 {
            coeffs.push((model.demand[i], -required));
        }
        model.add(ConstraintKind::Quality, coeffs, Relation::Ge, 0.0);
    }

    // Budget and no self-recommendation.
    for i in 0..k {
        let mut coeffs: Vec<(VarId, f64)> = model.flows[i].iter().map(|&(_, v)| (v, 1.0)).collect();
        coeffs.push((model.demand[i], -(n as f64)));
        model.add(ConstraintKind::Budget, coeffs, Relation::Eq, 0.0);
    }
    for i in 0..k {
        let diag = model.flows[i]
            .iter()
            .find(|&&(j, _)| j == i)
            .map(|&(_, v)| v)
            .expect("diagonal flow variable");
        model.add(ConstraintKind::NoSelf, vec![(diag, 1.0)], Relation::Eq, 0.0);
    }

    // Box: w_ij <= p_i.
    for i in 0..k {
        let p = model.demand[i];
        let rows: Vec<VarId> = model.flows[i].iter().map(|&(_, v)| v).collect();
        for v in rows {
            model.add(ConstraintKind::BoxUpper, vec![(v, 1.0), (p, -1.0)], Relation::Le, 0.0);
        }
    }

    if let Some(spec) = spec {
        let p_bs = stationary_demand(&baseline.policy, user)?;
        let floors: Vec<f64> = user.direct().as_slice().iter().map(|&d| (1.0 - alpha) * d).collect();
        add_fairness_block(&mut model, spec, p_bs.as_slice(), &floors)?;
    }
    Ok(model)
}

fn add_fairness_block(
    model: &mut LpModel,
    spec: &FairnessConstraintSpec,
    p_bs: &[f64],
    floors: &[f64],
) -> Result<()> {
    let k = model.size();
    let c = spec.budget;
    match spec.metric {
        FairnessMetric::Max => {
            for i in 0..k {
                let p = model.demand[i];
                model.add(ConstraintKind::Fairness, vec![(p, 1.0)], Relation::Le, p_bs[i] + c);
                model.add(ConstraintKind::Fairness, vec![(p, -1.0)], Relation::Le, c - p_bs[i]);
            }
        }
        FairnessMetric::Tv => {
            let z: Vec<VarId> = (0..k)
                .map(|i| model.add_var(VarRole::Aux(i), f64::NEG_INFINITY, f64::INFINITY))
                .collect();
            // Total variation is half the L1 distance.
            model.add(
                ConstraintKind::Fairness,
                z.iter().map(|&v| (v, 1.0)).collect(),
                Relation::Le,
                2.0 * c,
            );
            for i in 0..k {
                let p = model.demand[i];
                model.add(ConstraintKind::Fairness, vec![(p, 1.0), (z[i], -1.0)], Relation::Le, p_bs[i]);
                model.add(ConstraintKind::Fairness, vec![(p, -1.0), (z[i], -1.0)], Relation::Le, -p_bs[i]);
            }
            model.aux = Some(z);
        }
        FairnessMetric::Kl => {
            let counts: Vec<usize> = floors.iter().map(|&f| spec.cuts_for_floor(f)).collect();
            let cuts = tangent_cuts(counts.iter().copied().max().unwrap_or(spec.cut_count), spec.cut_step)?;
            let z: Vec<VarId> = (0..k)
                .map(|i| model.add_var(VarRole::Aux(i), f64::NEG_INFINITY, f64::INFINITY))
                .collect();
            let neg_entropy: f64 = p_bs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum();
            model.add(
                ConstraintKind::Fairness,
                z.iter().zip(p_bs).map(|(&v, &p)| (v, p)).collect(),
                Relation::Ge,
                neg_entropy - c,
            );
            for i in 0..k {
                let p = model.demand[i];
                for cut in &cuts.cuts()[..counts[i]] {
                    model.add(
                        ConstraintKind::TangentCut,
                        vec![(z[i], 1.0), (p, -cut.slope)],
                        Relation::Le,
                        cut.intercept,
                    );
                }
            }
            model.aux = Some(z);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::DemandDistribution;
    use crate::recsys::baseline_policy;

    fn dense3() -> ScoreMatrix {
        ScoreMatrix::from_entries(
            3,
            [(0, 1, 0.9), (0, 2, 0.4), (1, 0, 0.3), (1, 2, 0.8), (2, 0, 0.6), (2, 1, 0.5)],
        )
        .unwrap()
    }

    fn setup(u: &ScoreMatrix, n: usize, cache: &[usize]) -> (BaselineProfile, CacheSet, UserModel) {
        let k = u.size();
        let b = baseline_policy(u, n).unwrap();
        let c = CacheSet::new(k, cache.iter().copied()).unwrap();
        let user = UserModel::new(0.8, DemandDistribution::uniform(k).unwrap(), n).unwrap();
        (b, c, user)
    }

    #[test]
    fn candidates_of_dense_matrix_are_all_others() {
        let u = dense3();
        let c = CacheSet::new(3, [0]).unwrap();
        assert_eq!(candidate_set(&u, &c, 1), vec![vec![1, 2], vec![0, 2], vec![0, 1]]);
    }

    #[test]
    fn empty_row_gets_cache_and_padding() {
        let u = ScoreMatrix::from_entries(5, [(1, 3, 1.0), (2, 4, 1.0)]).unwrap();
        let c = CacheSet::new(5, [1, 2]).unwrap();
        assert_eq!(candidate_set(&u, &c, 2)[0], vec![1, 2]);
        // Row 3 has no scores; padding brings in 0 and 1, cache adds 2.
        assert_eq!(candidate_set(&u, &c, 2)[3], vec![0, 1, 2]);
    }

    #[test]
    fn binary_matrix_candidate_counts() {
        // Row i: positives, then cached items other than i; padding only when short.
        let u = ScoreMatrix::from_entries(
            6,
            [(0, 1, 1.0), (0, 2, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 0, 1.0)],
        )
        .unwrap();
        let c = CacheSet::new(6, [2, 5]).unwrap();
        let counts: Vec<usize> = candidate_set(&u, &c, 1).iter().map(Vec::len).collect();
        // 0: {1,2,5}; 1: {0,2,5}; 2: {3,5}; 3: {4,2,5}; 4: {5,2}; 5: {0,2}
        assert_eq!(counts, vec![3, 3, 2, 3, 2, 2]);
    }

    #[test]
    fn fmax_constraint_counts() {
        let u = dense3();
        let (b, c, user) = setup(&u, 1, &[0]);
        let spec = FairnessConstraintSpec::new(FairnessMetric::Max, 0.1);
        let m = build_fair_nfr_lp(&u, &b, &c, &user, 0.5, Some(&spec)).unwrap();
        assert_eq!(m.count(ConstraintKind::Stationarity), 3);
        assert_eq!(m.count(ConstraintKind::Quality), 3);
        assert_eq!(m.count(ConstraintKind::Budget), 3);
        assert_eq!(m.count(ConstraintKind::NoSelf), 3);
        assert_eq!(m.count(ConstraintKind::BoxUpper), 9);
        assert_eq!(m.count(ConstraintKind::Fairness), 6);
        assert_eq!(m.constraints.len(), 27);
        assert!(m.aux.is_none());
        assert_eq!(m.objective, vec![(m.demand[0], 1.0)]);
    }

    #[test]
    fn unconstrained_model_has_no_aux_variables() {
        let u = dense3();
        let (b, c, user) = setup(&u, 1, &[0]);
        let m = build_fair_nfr_lp(&u, &b, &c, &user, 0.5, None).unwrap();
        assert!(m.aux.is_none());
        assert!(m.variables.iter().all(|v| !matches!(v.role, VarRole::Aux(_))));
        assert_eq!(m.count(ConstraintKind::Fairness), 0);
    }

    #[test]
    fn kl_block_emits_one_cut_per_content_and_tangent() {
        let u = dense3();
        let (b, c, user) = setup(&u, 1, &[0]);
        // Floors (1 - 0.8) / 3 lie above exp(-7.95): no extension.
        let spec = FairnessConstraintSpec::new(FairnessMetric::Kl, 0.05);
        let m = build_fair_nfr_lp(&u, &b, &c, &user, 0.5, Some(&spec)).unwrap();
        assert_eq!(m.count(ConstraintKind::TangentCut), 160 * 3);
        assert_eq!(m.count(ConstraintKind::Fairness), 1);
        assert_eq!(m.aux.as_ref().unwrap().len(), 3);

        let tv = FairnessConstraintSpec::new(FairnessMetric::Tv, 0.05);
        let m = build_fair_nfr_lp(&u, &b, &c, &user, 0.5, Some(&tv)).unwrap();
        assert_eq!(m.count(ConstraintKind::Fairness), 7);
    }

    #[test]
    fn baseline_point_is_feasible() {
        let u = crate::catalog::synthetic_catalog(30, 3, 4).unwrap();
        let (b, c, user) = setup(&u, 2, &[0, 7, 9]);
        let p_bs = stationary_demand(&b.policy, &user).unwrap();
        let flows: Vec<Vec<(usize, f64)>> = b
            .lists
            .iter()
            .enumerate()
            .map(|(i, l)| l.iter().map(|&j| (j, p_bs[i])).collect())
            .collect();
        for spec in [
            FairnessConstraintSpec::new(FairnessMetric::Max, 0.0),
            FairnessConstraintSpec::new(FairnessMetric::Tv, 0.0),
        ] {
            let m = build_fair_nfr_lp(&u, &b, &c, &user, 1.0, Some(&spec)).unwrap();
            let aux = vec![0.0; 30];
            let x = m.point_from(&flows, p_bs.as_slice(), Some(&aux));
            assert!(m.max_violation(&x) < 1e-12, "{:?}", spec.metric);
        }
    }

    #[test]
    fn cut_family_extends_to_demand_floor() {
        let spec = FairnessConstraintSpec::new(FairnessMetric::Kl, 0.05);
        assert_eq!(spec.cuts_for_floor(0.01), 160);
        // ln(1e5) / 0.05 = 230.26 -> 231 steps plus the cut at 1.
        assert_eq!(spec.cuts_for_floor(1e-5), 232);
        let fixed = FairnessConstraintSpec {
            extend_to_floor: false,
            ..spec.clone()
        };
        assert_eq!(fixed.cuts_for_floor(1e-5), 160);

        let u = dense3();
        let b = baseline_policy(&u, 1).unwrap();
        let c = CacheSet::new(3, [0]).unwrap();
        let user = UserModel::new(0.9999, DemandDistribution::uniform(3).unwrap(), 1).unwrap();
        let m = build_fair_nfr_lp(&u, &b, &c, &user, 0.5, Some(&spec)).unwrap();
        let per_item = spec.cuts_for_floor(1e-4 / 3.0);
        assert!(per_item > 160);
        assert_eq!(m.count(ConstraintKind::TangentCut), 3 * per_item);
        let m = build_fair_nfr_lp(&u, &b, &c, &user, 0.5, Some(&fixed)).unwrap();
        assert_eq!(m.count(ConstraintKind::TangentCut), 3 * 160);
    }

    #[test]
    fn rejects_bad_configuration() {
        let u = dense3();
        let (b, c, user) = setup(&u, 1, &[0]);
        assert!(build_fair_nfr_lp(&u, &b, &c, &user, 1.5, None).is_err());
        let spec = FairnessConstraintSpec::new(FairnessMetric::Max, f64::NAN);
        assert!(build_fair_nfr_lp(&u, &b, &c, &user, 0.5, Some(&spec)).is_err());
        let small = CacheSet::new(2, [0]).unwrap();
        assert!(build_fair_nfr_lp(&u, &b, &small, &user, 0.5, None).is_err());
    }

    #[test]
    fn metric_names_parse() {
        for m in [FairnessMetric::Max, FairnessMetric::Tv, FairnessMetric::Kl] {
            assert_eq!(m.name().parse::<FairnessMetric>().unwrap(), m);
        }
        assert!("f_l2".parse::<FairnessMetric>().is_err());
    }
}
