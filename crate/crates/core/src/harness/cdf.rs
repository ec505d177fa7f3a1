use serde::{Deserialize, Serialize};

use crate::optimizer::FairnessMetric;

use super::scenario::ScenarioResult;

/// Empirical CDF of relative distances from a fairness bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceCdf {
    pub metric: FairnessMetric,
    /// `(distance, fraction of scenarios at or below it)`, ascending.
    pub points: Vec<(f64, f64)>,
    pub median: Option<f64>,
    /// Number of scenarios in the CDF.
    pub count: usize,
    /// Scenarios without a positive gain, left out of the CDF.
    pub excluded_zero_gain: usize,
}

impl DistanceCdf {
    /// Fraction of included scenarios with distance `<= x`.
    pub fn at(&self, x: f64) -> f64 {
        self.points
            .iter()
            .take_while(|&&(d, _)| d <= x)
            .last()
            .map_or(0.0, |&(_, f)| f)
    }
}

fn distance(result: &ScenarioResult, metric: FairnessMetric) -> Option<f64> {
    let r = &result.report;
    match metric {
        FairnessMetric::Max => r.rel_fmax,
        FairnessMetric::Tv => r.rel_ftv,
        FairnessMetric::Kl => r.rel_fkl,
    }
}

pub fn distance_cdf<'a>(
    results: impl IntoIterator<Item = &'a ScenarioResult>,
    metric: FairnessMetric,
) -> DistanceCdf {
    let mut values = Vec::new();
    let mut excluded = 0;
    for r in results {
        match distance(r, metric) {
            Some(d) if r.report.gain > 0.0 => values.push(d),
            _ => excluded += 1,
        }
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let median = match n {
        0 => None,
        _ if n % 2 == 1 => Some(values[n / 2]),
        _ => Some((values[n / 2 - 1] + values[n / 2]) / 2.0),
    };
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(n);
    for (k, &d) in values.iter().enumerate() {
        let f = (k + 1) as f64 / n as f64;
        match points.last_mut() {
            Some(last) if last.0 == d => last.1 = f,
            _ => points.push((d, f)),
        }
    }
    DistanceCdf {
        metric,
        points,
        median,
        count: n,
        excluded_zero_gain: excluded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::DemandDistribution;
    use crate::fairness::FairnessReport;
    use crate::harness::config::{Algorithm, DatasetSpec, DirectDemand, ScenarioConfig};
    use crate::optimizer::CandidateMode;

    fn result(gain: f64, rel: Option<f64>) -> ScenarioResult {
        let p = DemandDistribution::uniform(2).unwrap();
        ScenarioResult {
            config: ScenarioConfig {
                dataset: DatasetSpec::Synthetic {
                    size: 2,
                    avg_out_degree: 1,
                    binary: false,
                },
                alpha: 0.5,
                list_size: 1,
                cache_size: 1,
                quality: 0.5,
                direct: DirectDemand::Uniform,
                algorithm: Algorithm::Greedy,
                seed: 0,
                smoothing: 0.01,
                solver_tolerance: 1e-8,
                candidates: CandidateMode::Sparse,
            },
            catalog_size: 2,
            cache: vec![0],
            p_bs: p.clone(),
            p_nf: p,
            report: FairnessReport {
                f_max: 0.0,
                f_tv: 0.0,
                f_kl_raw: 0.0,
                f_kl_norm: 0.0,
                kl_exact: Some(0.0),
                chr_bs: 0.5,
                chr_nf: 0.5 + gain,
                gain,
                bound_fmax: 0.0,
                bound_ftv: 0.0,
                bound_fkl: None,
                rel_fmax: rel,
                rel_ftv: rel,
                rel_fkl: rel,
            },
            qor_min: 1.0,
            qor_mean: 1.0,
            lp: None,
            duration_secs: 0.0,
        }
    }

    #[test]
    fn three_point_fixture() {
        let rs = [result(0.1, Some(0.5)), result(0.1, Some(0.1)), result(0.1, Some(0.3))];
        let cdf = distance_cdf(&rs, FairnessMetric::Max);
        assert_eq!(cdf.points.len(), 3);
        assert!((cdf.at(0.3) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(cdf.at(0.05), 0.0);
        assert_eq!(cdf.at(0.5), 1.0);
        assert_eq!(cdf.median, Some(0.3));
    }

    #[test]
    fn points_on_bound_give_step_at_zero() {
        let rs = [result(0.1, Some(0.0)), result(0.2, Some(0.0))];
        let cdf = distance_cdf(&rs, FairnessMetric::Tv);
        assert_eq!(cdf.points, vec![(0.0, 1.0)]);
    }

    #[test]
    fn zero_gain_scenarios_are_counted_apart() {
        let rs = [result(0.0, None), result(0.1, Some(0.2)), result(0.1, Some(0.4))];
        let cdf = distance_cdf(&rs, FairnessMetric::Kl);
        assert_eq!(cdf.excluded_zero_gain, 1);
        assert_eq!(cdf.points.len(), 2);
        assert!((cdf.median.unwrap() - 0.3).abs() < 1e-15);
        assert!(distance_cdf(&[], FairnessMetric::Kl).median.is_none());
    }
}
