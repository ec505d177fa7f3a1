//! Fairness-aware network-friendly recommendations.
//!
//! A recommender that nudges users toward cached contents raises the cache
//! hit ratio but shifts demand away from what a baseline recommender would
//! produce. This crate models that demand shift, measures it with three
//! fairness metrics, and computes recommendation policies that maximize the
//! cache hit ratio under quality and fairness constraints.
//!
//! - [`catalog`]: score matrices, direct demand, cache sets.
//! - [`demand`]: recommendation policies, the user model and stationary demand.
//! - [`recsys`]: baseline, greedy and BFS-based recommenders.
//! - [`fairness`]: fairness metrics and their lower bounds.
//! - [`optimizer`]: the linear program and its solution.
//! - [`harness`]: scenarios, sweeps, curves and export.

pub mod catalog;
pub mod demand;
pub mod error;
pub mod fairness;
pub mod harness;
pub mod optimizer;
pub mod recsys;

pub use error::{Error, Result};
