use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::ScoreMatrix;
use crate::error::{Error, Result};
use crate::fairness::DEFAULT_SMOOTHING;
use crate::optimizer::{CandidateMode, FairnessConstraintSpec, DEFAULT_SOLVER_TOLERANCE};

use super::config::{Algorithm, DatasetSpec, DirectDemand, ScenarioConfig};
use super::scenario::{run_scenario_on, ScenarioResult};

/// Environment variable holding the sweep worker count.
pub const WORKERS_ENV: &str = "FAIRNFR_WORKERS";

/// Algorithm axis of a grid. BFS widths are multiples of the list size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum GridAlgorithm {
    Baseline,
    Greedy,
    Cabaret {
        width_factors: Vec<usize>,
        depths: Vec<usize>,
    },
    Multistep,
    FairNfr {
        fairness: Vec<FairnessConstraintSpec>,
    },
}

impl GridAlgorithm {
    fn expand(&self, list_size: usize) -> Vec<Algorithm> {
        match self {
            GridAlgorithm::Baseline => vec![Algorithm::Baseline],
            GridAlgorithm::Greedy => vec![Algorithm::Greedy],
            GridAlgorithm::Multistep => vec![Algorithm::Multistep],
            GridAlgorithm::Cabaret { width_factors, depths } => width_factors
                .iter()
                .flat_map(|&f| {
                    depths.iter().map(move |&depth| Algorithm::Cabaret {
                        width: f * list_size,
                        depth,
                    })
                })
                .collect(),
            GridAlgorithm::FairNfr { fairness } => fairness
                .iter()
                .map(|f| Algorithm::FairNfr { fairness: f.clone() })
                .collect(),
        }
    }
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_smoothing() -> f64 {
    DEFAULT_SMOOTHING
}

fn default_tolerance() -> f64 {
    DEFAULT_SOLVER_TOLERANCE
}

/// Cross product of scenario parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub datasets: Vec<DatasetSpec>,
    pub alphas: Vec<f64>,
    pub list_sizes: Vec<usize>,
    pub cache_sizes: Vec<usize>,
    pub qualities: Vec<f64>,
    pub directs: Vec<DirectDemand>,
    pub algorithms: Vec<GridAlgorithm>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_smoothing")]
    pub smoothing: f64,
    #[serde(default = "default_tolerance")]
    pub solver_tolerance: f64,
    #[serde(default)]
    pub candidates: CandidateMode,
}

impl GridSpec {
    /// The full simulation grid over two datasets: three values each of
    /// alpha, N, C and q, two direct-demand models and the four BFS settings
    /// `W in {N, 2N}`, `D in {1, 2}`.
    pub fn full_factorial(datasets: Vec<DatasetSpec>) -> Self {
        Self {
            datasets,
            alphas: vec![0.5, 0.8, 0.99],
            list_sizes: vec![2, 5, 10],
            cache_sizes: vec![5, 10, 20],
            qualities: vec![0.5, 0.8, 0.9],
            directs: vec![DirectDemand::Zipf { exponent: 1.0 }, DirectDemand::Uniform],
            algorithms: vec![GridAlgorithm::Cabaret {
                width_factors: vec![1, 2],
                depths: vec![1, 2],
            }],
            seeds: default_seeds(),
            smoothing: DEFAULT_SMOOTHING,
            solver_tolerance: DEFAULT_SOLVER_TOLERANCE,
            candidates: CandidateMode::Sparse,
        }
    }

    /// All cells in a fixed nesting order: dataset, seed, direct demand,
    /// alpha, N, C, q, algorithm.
    pub fn expand(&self) -> Vec<ScenarioConfig> {
        let mut out = Vec::new();
        for dataset in &self.datasets {
            for &seed in &self.seeds {
                for &direct in &self.directs {
                    for &alpha in &self.alphas {
                        for &list_size in &self.list_sizes {
                            for &cache_size in &self.cache_sizes {
                                for &quality in &self.qualities {
                                    for algorithm in self.algorithms.iter().flat_map(|a| a.expand(list_size)) {
                                        out.push(ScenarioConfig {
                                            dataset: dataset.clone(),
                                            alpha,
                                            list_size,
                                            cache_size,
                                            quality,
                                            direct,
                                            algorithm,
                                            seed,
                                            smoothing: self.smoothing,
                                            solver_tolerance: self.solver_tolerance,
                                            candidates: self.candidates,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// One sweep row: the cell's configuration and either its result or the
/// error that stopped it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub config: ScenarioConfig,
    pub result: Option<ScenarioResult>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.result.is_some()
    }
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs every cell of `grid`, in parallel, keeping grid order.
///
/// Datasets are loaded once per `(dataset, seed)` pair. A failing cell is
/// reported in its row and does not affect the others. `workers` defaults to
/// [`workers_from_env`] and then to the number of available cores.
pub fn sweep(grid: &GridSpec, workers: Option<usize>) -> Result<Vec<SweepRow>> {
    sweep_configs(grid.expand(), workers)
}

pub fn sweep_configs(cells: Vec<ScenarioConfig>, workers: Option<usize>) -> Result<Vec<SweepRow>> {
    if cells.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    let mut datasets: HashMap<String, std::result::Result<Arc<ScoreMatrix>, String>> = HashMap::new();
    for cfg in &cells {
        let key = dataset_key(cfg)?;
        datasets.entry(key).or_insert_with(|| {
            cfg.dataset
                .load(cfg.seed)
                .map(Arc::new)
                .map_err(|e| e.to_string())
        });
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers.or_else(workers_from_env) {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let rows = pool.install(|| {
        cells
            .into_par_iter()
            .enumerate()
            .map(|(index, config)| {
                let outcome = dataset_key(&config)
                    .map_err(|e| e.to_string())
                    .and_then(|key| datasets[&key].clone())
                    .and_then(|m| run_scenario_on(&config, &m).map_err(|e| e.to_string()));
                if let Err(e) = &outcome {
                    log::warn!("scenario {index} failed: {e}");
                }
                let (result, error) = match outcome {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e)),
                };
                SweepRow {
                    index,
                    config,
                    result,
                    error,
                }
            })
            .collect()
    });
    Ok(rows)
}

fn dataset_key(cfg: &ScenarioConfig) -> Result<String> {
    let seed = if cfg.dataset.is_seeded() { cfg.seed } else { 0 };
    Ok(format!("{}#{seed}", serde_json::to_string(&cfg.dataset)?))
}
