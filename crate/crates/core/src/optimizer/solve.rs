use highs::{Col, HighsModelStatus, RowProblem, Sense};
use serde::{Deserialize, Serialize};

use crate::catalog::DemandDistribution;
use crate::demand::RecommendationPolicy;
use crate::error::{Error, Result};

use super::model::{LpModel, Relation};

/// Default primal and dual feasibility tolerance handed to the solver.
pub const DEFAULT_SOLVER_TOLERANCE: f64 = 1e-8;
/// Largest per-entry or per-row drift repaired when recovering a policy.
pub const RECOVERY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Cached demand at the solution (CHR^NF). NaN unless optimal.
    pub objective: f64,
    /// Raw solver point, indexed like `LpModel::variables`.
    pub values: Vec<f64>,
    /// Per row `i`, `(j, w_ij)` with `j != i`.
    pub flows: Vec<Vec<(usize, f64)>>,
    pub demand: Vec<f64>,
    pub aux: Option<Vec<f64>>,
    pub list_size: usize,
    /// Tolerance the solver was configured with.
    pub tolerance: f64,
    /// Largest constraint or bound violation at the returned point.
    pub max_violation: f64,
    /// Recovered recommendation policy, present when optimal.
    pub policy: Option<RecommendationPolicy>,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Turns a non-optimal status into an error.
    pub fn require_optimal(self) -> Result<Self> {
        match self.status {
            SolveStatus::Optimal => Ok(self),
            SolveStatus::Infeasible => Err(Error::Infeasible),
            SolveStatus::NumericalFailure => Err(Error::Numerical("LP solver did not reach optimality".into())),
        }
    }

    /// `p^NF` as a distribution, after clipping solver noise.
    pub fn demand_distribution(&self) -> Result<DemandDistribution> {
        if !self.is_optimal() {
            return Err(Error::Invariant("demand requested from a non-optimal solve".into()));
        }
        let total: f64 = self.demand.iter().sum();
        if (total - 1.0).abs() > RECOVERY_TOLERANCE {
            return Err(Error::Invariant(format!("solver demand sums to {total}")));
        }
        DemandDistribution::from_weights(self.demand.iter().map(|&p| p.max(0.0)).collect())
    }

    pub fn policy(&self) -> Result<&RecommendationPolicy> {
        self.policy
            .as_ref()
            .ok_or_else(|| Error::Invariant("no policy on a non-optimal solve".into()))
    }
}

/// Solves the model with HiGHS dual simplex, single-threaded and deterministic.
pub fn solve(model: &LpModel, tolerance: f64) -> Result<SolveResult> {
    if !(tolerance > 0.0 && tolerance < 1e-2) {
        return Err(Error::Config(format!("solver tolerance {tolerance} outside (0, 0.01)")));
    }
    let mut pb = RowProblem::default();
    let mut objective = vec![0.0; model.variables.len()];
    for &(v, c) in &model.objective {
        objective[v.0] += c;
    }
    let cols: Vec<Col> = model
        .variables
        .iter()
        .zip(&objective)
        .map(|(var, &c)| pb.add_column(c, var.lower..=var.upper))
        .collect();
    for con in &model.constraints {
        let row = con.coeffs.iter().map(|&(v, c)| (cols[v.0], c));
        match con.relation {
            Relation::Le => pb.add_row(..=con.rhs, row),
            Relation::Ge => pb.add_row(con.rhs.., row),
            Relation::Eq => pb.add_row(con.rhs..=con.rhs, row),
        }
    }

    let mut highs = pb.optimise(Sense::Maximise);
    highs.make_quiet();
    highs.set_option("solver", "simplex");
    highs.set_option("presolve", "on");
    highs.set_option("parallel", "off");
    highs.set_option("threads", 1);
    highs.set_option("random_seed", 0);
    highs.set_option("primal_feasibility_tolerance", tolerance);
    highs.set_option("dual_feasibility_tolerance", tolerance);

    let failed = |status| SolveResult {
        status,
        objective: f64::NAN,
        values: Vec::new(),
        flows: Vec::new(),
        demand: Vec::new(),
        aux: None,
        list_size: model.list_size,
        tolerance,
        max_violation: f64::NAN,
        policy: None,
    };
    let solved = match highs.try_solve() {
        Ok(s) => s,
        Err(status) => {
            log::warn!("HiGHS failed: {status:?}");
            return Ok(failed(SolveStatus::NumericalFailure));
        }
    };
    match solved.status() {
        HighsModelStatus::Optimal => {}
        HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => {
            return Ok(failed(SolveStatus::Infeasible));
        }
        other => {
            log::warn!("HiGHS stopped with status {other:?}");
            return Ok(failed(SolveStatus::NumericalFailure));
        }
    }

    let values = solved.get_solution().columns().to_vec();
    let flows = model
        .flows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .filter(|&&(j, _)| j != i)
                .map(|&(j, v)| (j, values[v.0]))
                .collect()
        })
        .collect();
    let demand = model.demand.iter().map(|v| values[v.0]).collect();
    let aux = model.aux.as_ref().map(|z| z.iter().map(|v| values[v.0]).collect());
    let max_violation = model.max_violation(&values);
    if max_violation > 100.0 * tolerance {
        log::warn!("LP solution violates constraints by {max_violation:e}");
    }
    let mut result = SolveResult {
        status: SolveStatus::Optimal,
        objective: model.objective_value(&values),
        values,
        flows,
        demand,
        aux,
        list_size: model.list_size,
        tolerance,
        max_violation,
        policy: None,
    };
    result.policy = Some(recover_policy(&result)?);
    Ok(result)
}

/// Recovers `r_ij = w_ij / p_i`.
///
/// Entries are clipped to `[0, 1]` and each row is then brought to sum
/// exactly `N`: a deficit is spread over entries in proportion to their
/// headroom `1 - r_ij`, an excess is removed in proportion to `r_ij`. Drift
/// larger than [`RECOVERY_TOLERANCE`] is reported as an invariant violation.
pub fn recover_policy(result: &SolveResult) -> Result<RecommendationPolicy> {
    if !result.is_optimal() {
        return Err(Error::Invariant("cannot recover a policy from a non-optimal solve".into()));
    }
    let n = result.list_size as f64;
    let mut rows = Vec::with_capacity(result.demand.len());
    for (i, (row, &p)) in result.flows.iter().zip(&result.demand).enumerate() {
        if !(p > 0.0) {
            return Err(Error::Invariant(format!("solver demand p[{i}] = {p} is not positive")));
        }
        let mut r: Vec<(usize, f64)> = Vec::with_capacity(row.len());
        for &(j, w) in row {
            let x = w / p;
            if x < -RECOVERY_TOLERANCE || x > 1.0 + RECOVERY_TOLERANCE {
                return Err(Error::Invariant(format!("r[{i}][{j}] = {x} outside [0, 1]")));
            }
            r.push((j, x.clamp(0.0, 1.0)));
        }
        let total: f64 = r.iter().map(|e| e.1).sum();
        if (total - n).abs() > RECOVERY_TOLERANCE * n.max(1.0) {
            return Err(Error::Invariant(format!("row {i} of recovered policy sums to {total}")));
        }
        if total < n {
            let headroom: f64 = r.iter().map(|e| 1.0 - e.1).sum();
            let scale = (n - total) / headroom;
            for e in &mut r {
                e.1 += (1.0 - e.1) * scale;
            }
        } else if total > n {
            let scale = n / total;
            for e in &mut r {
                e.1 *= scale;
            }
        }
        rows.push(r);
    }
    RecommendationPolicy::new(result.list_size, rows)
}
