use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::catalog::{
    largest_connected_component, load_score_matrix, synthetic_catalog, threshold_binarize, zipf_direct_demand,
    DemandDistribution, ScoreMatrix,
};
use crate::error::{Error, Result};
use crate::fairness::DEFAULT_SMOOTHING;
use crate::optimizer::{CandidateMode, FairnessConstraintSpec, DEFAULT_SOLVER_TOLERANCE};

/// Where a score matrix comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    /// Random catalog seeded by the scenario seed.
    Synthetic {
        size: usize,
        avg_out_degree: usize,
        /// Set every score to 1.
        #[serde(default)]
        binary: bool,
    },
    /// An edge-list file, optionally thresholded and restricted to its
    /// largest connected component.
    EdgeList {
        path: PathBuf,
        #[serde(default)]
        threshold: Option<f64>,
        #[serde(default)]
        largest_component: bool,
    },
}

impl DatasetSpec {
    /// Short label used in exported tables.
    pub fn label(&self) -> String {
        match self {
            DatasetSpec::Synthetic {
                size,
                avg_out_degree,
                binary,
            } => {
                let b = if *binary { "-bin" } else { "" };
                format!("synthetic-k{size}-d{avg_out_degree}{b}")
            }
            DatasetSpec::EdgeList { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
        }
    }

    pub fn load(&self, seed: u64) -> Result<ScoreMatrix> {
        match self {
            DatasetSpec::Synthetic {
                size,
                avg_out_degree,
                binary,
            } => {
                let m = synthetic_catalog(*size, *avg_out_degree, seed)?;
                if *binary {
                    threshold_binarize(&m, 0.0)
                } else {
                    Ok(m)
                }
            }
            DatasetSpec::EdgeList {
                path,
                threshold,
                largest_component,
            } => {
                let mut m = load_score_matrix(path)?.matrix;
                if let Some(t) = threshold {
                    m = threshold_binarize(&m, *t)?;
                }
                if *largest_component {
                    m = largest_connected_component(&m).0;
                }
                Ok(m)
            }
        }
    }

    /// Whether the loaded matrix depends on the seed.
    pub fn is_seeded(&self) -> bool {
        matches!(self, DatasetSpec::Synthetic { .. })
    }
}

/// Distribution of requests made without following a recommendation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DirectDemand {
    Zipf { exponent: f64 },
    Uniform,
}

impl DirectDemand {
    pub fn build(&self, size: usize) -> Result<DemandDistribution> {
        match self {
            DirectDemand::Zipf { exponent } => zipf_direct_demand(size, *exponent),
            DirectDemand::Uniform => DemandDistribution::uniform(size),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DirectDemand::Zipf { exponent } => format!("zipf-{exponent}"),
            DirectDemand::Uniform => "uniform".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Algorithm {
    Baseline,
    Greedy,
    Cabaret { width: usize, depth: usize },
    Multistep,
    FairNfr { fairness: FairnessConstraintSpec },
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Baseline => "baseline",
            Algorithm::Greedy => "greedy",
            Algorithm::Cabaret { .. } => "cabaret",
            Algorithm::Multistep => "multistep",
            Algorithm::FairNfr { .. } => "fair-nfr",
        }
    }
}

fn default_smoothing() -> f64 {
    DEFAULT_SMOOTHING
}

fn default_tolerance() -> f64 {
    DEFAULT_SOLVER_TOLERANCE
}

/// One point of the experiment space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub dataset: DatasetSpec,
    pub alpha: f64,
    pub list_size: usize,
    pub cache_size: usize,
    pub quality: f64,
    pub direct: DirectDemand,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub seed: u64,
    /// Smoothing weight of the reported KL metric.
    #[serde(default = "default_smoothing")]
    pub smoothing: f64,
    #[serde(default = "default_tolerance")]
    pub solver_tolerance: f64,
    #[serde(default)]
    pub candidates: CandidateMode,
}

impl ScenarioConfig {
    /// Checks parameter domains that do not depend on the catalog.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha = {} outside (0, 1)", self.alpha)));
        }
        if self.list_size == 0 {
            return Err(Error::Config("list size N must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.quality) {
            return Err(Error::Config(format!("q = {} outside [0, 1]", self.quality)));
        }
        if !(self.smoothing > 0.0 && self.smoothing < 1.0) {
            return Err(Error::Config(format!("smoothing {} outside (0, 1)", self.smoothing)));
        }
        match &self.algorithm {
            Algorithm::Cabaret { width, depth } if *width == 0 || *depth == 0 => Err(Error::Config(
                format!("BFS width ({width}) and depth ({depth}) must be at least 1"),
            )),
            Algorithm::FairNfr { fairness } if !fairness.budget.is_finite() => {
                Err(Error::Config(format!("fairness budget {} is not finite", fairness.budget)))
            }
            _ => Ok(()),
        }
    }
}
