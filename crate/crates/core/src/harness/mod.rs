//! Scenario configuration, sweeps, price-of-fairness curves, bound distance
//! CDFs and result export.

mod cdf;
mod config;
mod curve;
mod export;
mod scenario;
mod sweep;

pub use cdf::{distance_cdf, DistanceCdf};
pub use config::{Algorithm, DatasetSpec, DirectDemand, ScenarioConfig};
pub use curve::{metric_value, price_of_fairness_curve, CurvePoint, FairnessCurve};
pub use export::{export, read_json, to_csv_string, write_csv, ExportFormat, CSV_COLUMNS};
pub use scenario::{
    popularity_cache, run_scenario, run_scenario_on, LpSummary, PreparedScenario, ScenarioResult,
};
pub use sweep::{sweep, sweep_configs, workers_from_env, GridAlgorithm, GridSpec, SweepRow, WORKERS_ENV};
