use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::catalog::{CacheSet, DemandDistribution, ScoreMatrix};
use crate::demand::{stationary_demand, RecommendationPolicy, UserModel};
use crate::error::{Error, Result};
use crate::fairness::FairnessReport;
use crate::optimizer::{build_fair_nfr_lp_with, solve, FairnessConstraintSpec};
use crate::recsys::{baseline_policy, cabaret, greedy_nfr, qor_ratio, BaselineProfile};

use super::config::{Algorithm, ScenarioConfig};

/// The `count` contents with the highest demand, ties by ascending index.
pub fn popularity_cache(p_bs: &DemandDistribution, count: usize) -> Result<CacheSet> {
    let k = p_bs.len();
    if count > k {
        return Err(Error::Config(format!("cache size C = {count} exceeds catalog size {k}")));
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| p_bs[b].total_cmp(&p_bs[a]).then(a.cmp(&b)));
    CacheSet::new(k, order.into_iter().take(count))
}

/// LP solve figures attached to optimizer-backed scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSummary {
    pub objective: f64,
    pub max_violation: f64,
    pub tolerance: f64,
    pub variables: usize,
    pub constraints: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub catalog_size: usize,
    pub cache: Vec<usize>,
    pub p_bs: DemandDistribution,
    pub p_nf: DemandDistribution,
    pub report: FairnessReport,
    pub qor_min: f64,
    pub qor_mean: f64,
    pub lp: Option<LpSummary>,
    pub duration_secs: f64,
}

/// Baseline side of a scenario, shared by every algorithm run on it.
#[derive(Debug, Clone)]
pub struct PreparedScenario<'a> {
    pub matrix: &'a ScoreMatrix,
    pub baseline: BaselineProfile,
    pub user: UserModel,
    pub p_bs: DemandDistribution,
    pub cache: CacheSet,
}

impl<'a> PreparedScenario<'a> {
    /// Baseline policy, its stationary demand and the popularity cache.
    pub fn new(cfg: &ScenarioConfig, matrix: &'a ScoreMatrix) -> Result<Self> {
        cfg.validate()?;
        let k = matrix.size();
        if cfg.list_size >= k {
            return Err(Error::Config(format!("list size N = {} must be below K = {k}", cfg.list_size)));
        }
        let baseline = baseline_policy(matrix, cfg.list_size)?;
        let user = UserModel::new(cfg.alpha, cfg.direct.build(k)?, cfg.list_size)?;
        let p_bs = stationary_demand(&baseline.policy, &user)?;
        let cache = popularity_cache(&p_bs, cfg.cache_size)?;
        Ok(Self {
            matrix,
            baseline,
            user,
            p_bs,
            cache,
        })
    }

    /// Solves the LP, with the fairness block when `spec` is given.
    pub fn optimize(
        &self,
        cfg: &ScenarioConfig,
        spec: Option<&FairnessConstraintSpec>,
    ) -> Result<(RecommendationPolicy, LpSummary)> {
        let model = build_fair_nfr_lp_with(
            self.matrix,
            &self.baseline,
            &self.cache,
            &self.user,
            cfg.quality,
            spec,
            cfg.candidates,
        )?;
        let res = solve(&model, cfg.solver_tolerance)?.require_optimal()?;
        let summary = LpSummary {
            objective: res.objective,
            max_violation: res.max_violation,
            tolerance: res.tolerance,
            variables: model.variables.len(),
            constraints: model.constraints.len(),
        };
        let policy = res.policy.ok_or_else(|| Error::Invariant("optimal solve without policy".into()))?;
        Ok((policy, summary))
    }

    pub fn policy_for(&self, cfg: &ScenarioConfig) -> Result<(RecommendationPolicy, Option<LpSummary>)> {
        match &cfg.algorithm {
            Algorithm::Baseline => Ok((self.baseline.policy.clone(), None)),
            Algorithm::Greedy => Ok((greedy_nfr(self.matrix, &self.baseline, &self.cache, cfg.quality)?, None)),
            Algorithm::Cabaret { width, depth } => Ok((
                cabaret(self.matrix, &self.baseline, &self.cache, *width, *depth)?,
                None,
            )),
            Algorithm::Multistep => self.optimize(cfg, None).map(|(p, s)| (p, Some(s))),
            Algorithm::FairNfr { fairness } => self.optimize(cfg, Some(fairness)).map(|(p, s)| (p, Some(s))),
        }
    }

    /// Runs the configured algorithm and evaluates it against the baseline.
    pub fn run(&self, cfg: &ScenarioConfig) -> Result<ScenarioResult> {
        let start = Instant::now();
        let (policy, lp) = self.policy_for(cfg)?;
        let p_nf = stationary_demand(&policy, &self.user)?;
        let report = FairnessReport::compute(&self.p_bs, &p_nf, &self.cache, cfg.smoothing)?;
        let qor = qor_ratio(&policy, self.matrix, &self.baseline);
        let qor_min = qor.iter().copied().fold(f64::INFINITY, f64::min);
        let qor_mean = qor.iter().sum::<f64>() / qor.len() as f64;
        Ok(ScenarioResult {
            config: cfg.clone(),
            catalog_size: self.matrix.size(),
            cache: self.cache.members().to_vec(),
            p_bs: self.p_bs.clone(),
            p_nf,
            report,
            qor_min,
            qor_mean,
            lp,
            duration_secs: start.elapsed().as_secs_f64(),
        })
    }
}

/// Runs one scenario on an already loaded catalog.
pub fn run_scenario_on(cfg: &ScenarioConfig, matrix: &ScoreMatrix) -> Result<ScenarioResult> {
    let start = Instant::now();
    let prepared = PreparedScenario::new(cfg, matrix)?;
    let mut result = prepared.run(cfg)?;
    result.duration_secs = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Loads the dataset and runs one scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let matrix = cfg.dataset.load(cfg.seed)?;
    run_scenario_on(cfg, &matrix)
}
