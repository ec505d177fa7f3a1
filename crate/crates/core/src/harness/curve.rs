use serde::{Deserialize, Serialize};

use crate::demand::{chr, stationary_demand, RecommendationPolicy};
use crate::error::{Error, Result};
use crate::fairness::FairnessReport;
use crate::optimizer::{FairnessConstraintSpec, FairnessMetric};

use super::config::ScenarioConfig;
use super::scenario::PreparedScenario;

/// An operating point: achieved unfairness and cache hit ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Budget of the fair solve; absent for the endpoints.
    pub budget: Option<f64>,
    /// Achieved value of the curve's metric. KL is unsmoothed, in nats.
    pub fairness: f64,
    pub chr: f64,
}

/// Price-of-fairness curve of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessCurve {
    pub metric: FairnessMetric,
    /// The baseline recommender, at zero unfairness.
    pub baseline: CurvePoint,
    /// The unconstrained LP optimum.
    pub multistep: CurvePoint,
    /// One point per budget, in budget order.
    pub points: Vec<CurvePoint>,
}

/// Metric value as constrained by the LP: `F_max`, `F_tv` or raw KL.
pub fn metric_value(report: &FairnessReport, metric: FairnessMetric) -> f64 {
    match metric {
        FairnessMetric::Max => report.f_max,
        FairnessMetric::Tv => report.f_tv,
        FairnessMetric::Kl => report.kl_for_bound(),
    }
}

/// Solves the fair LP of `cfg` for each budget.
///
/// `cfg.algorithm` is ignored; KL budgets are in nats. Budgets must be
/// sorted ascending.
pub fn price_of_fairness_curve(
    cfg: &ScenarioConfig,
    metric: FairnessMetric,
    budgets: &[f64],
) -> Result<FairnessCurve> {
    if budgets.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Config("budgets must be sorted ascending".into()));
    }
    if budgets.iter().any(|b| !b.is_finite()) {
        return Err(Error::Config("budgets must be finite".into()));
    }
    let matrix = cfg.dataset.load(cfg.seed)?;
    let prepared = PreparedScenario::new(cfg, &matrix)?;
    let point = |policy: &RecommendationPolicy, budget: Option<f64>| -> Result<CurvePoint> {
        let p_nf = stationary_demand(policy, &prepared.user)?;
        let report = FairnessReport::compute(&prepared.p_bs, &p_nf, &prepared.cache, cfg.smoothing)?;
        Ok(CurvePoint {
            budget,
            fairness: metric_value(&report, metric),
            chr: chr(&p_nf, &prepared.cache),
        })
    };

    let baseline = point(&prepared.baseline.policy, None)?;
    let (free, _) = prepared.optimize(cfg, None)?;
    let multistep = point(&free, None)?;
    let points = budgets
        .iter()
        .map(|&b| {
            let spec = FairnessConstraintSpec::new(metric, b);
            let (policy, _) = prepared.optimize(cfg, Some(&spec))?;
            point(&policy, Some(b))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FairnessCurve {
        metric,
        baseline,
        multistep,
        points,
    })
}
