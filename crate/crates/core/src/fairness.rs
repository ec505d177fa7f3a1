//! Fairness metrics between the baseline demand `p_bs` and a network-friendly
//! demand `p_nf`, and the lower bounds that any gain `G` imposes on them.
//!
//! All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::catalog::{CacheSet, DemandDistribution};
use crate::demand::{chr, network_gain};
use crate::error::{Error, Result};

/// Smoothing weight used for the reported KL divergence.
pub const DEFAULT_SMOOTHING: f64 = 0.01;

fn check_lengths(p_bs: &DemandDistribution, p_nf: &DemandDistribution) -> Result<()> {
    if p_bs.len() != p_nf.len() {
        return Err(Error::DimensionMismatch {
            expected: p_bs.len(),
            actual: p_nf.len(),
        });
    }
    Ok(())
}

/// Largest per-content demand change.
pub fn f_max(p_bs: &DemandDistribution, p_nf: &DemandDistribution) -> Result<f64> {
    check_lengths(p_bs, p_nf)?;
    Ok(p_bs
        .as_slice()
        .iter()
        .zip(p_nf.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Total variation distance.
pub fn f_tv(p_bs: &DemandDistribution, p_nf: &DemandDistribution) -> Result<f64> {
    check_lengths(p_bs, p_nf)?;
    let l1: f64 = p_bs
        .as_slice()
        .iter()
        .zip(p_nf.as_slice())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(0.5 * l1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlDivergence {
    /// Smoothed divergence in nats.
    pub raw: f64,
    /// `raw / ln(1/w)`, in `[0, 1]`.
    pub normalized: f64,
}

/// Smoothed KL divergence `KL(p_bs || (1-w) p_nf + w p_bs)` and its
/// normalization by `ln(1/w)`.
pub fn f_kl(p_bs: &DemandDistribution, p_nf: &DemandDistribution, w: f64) -> Result<KlDivergence> {
    check_lengths(p_bs, p_nf)?;
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::Domain {
            function: "f_kl",
            message: format!("smoothing weight {w} outside (0, 1)"),
        });
    }
    let raw: f64 = p_bs
        .as_slice()
        .iter()
        .zip(p_nf.as_slice())
        .filter(|(a, _)| **a > 0.0)
        .map(|(&a, &b)| a * (a / (b + w * (a - b))).ln())
        .sum();
    let raw = raw.max(0.0);
    Ok(KlDivergence {
        raw,
        normalized: (raw / (1.0 / w).ln()).min(1.0),
    })
}

/// Unsmoothed `KL(p_bs || p_nf)` in nats; `None` when it is infinite.
pub fn kl_divergence(p_bs: &DemandDistribution, p_nf: &DemandDistribution) -> Result<Option<f64>> {
    check_lengths(p_bs, p_nf)?;
    let mut total = 0.0;
    for (&a, &b) in p_bs.as_slice().iter().zip(p_nf.as_slice()) {
        if a > 0.0 {
            if b <= 0.0 {
                return Ok(None);
            }
            total += a * (a / b).ln();
        }
    }
    Ok(Some(total.max(0.0)))
}

/// `F_max >= G / C`.
pub fn bound_f_max(gain: f64, cache_size: usize) -> Result<f64> {
    if cache_size == 0 {
        return Err(Error::Domain {
            function: "bound_f_max",
            message: "cache size must be at least 1".into(),
        });
    }
    Ok(gain / cache_size as f64)
}

/// `F_tv >= G`.
pub fn bound_f_tv(gain: f64) -> f64 {
    gain
}

/// `F_kl >= -H ln(1 + G/H) - (1 - H) ln(1 - G/(1 - H))` with `H = CHR^BS`.
///
/// This is the divergence between the two-cell distributions
/// `(H, 1 - H)` and `(H + G, 1 - H - G)`, so it also holds for negative gains.
pub fn bound_f_kl(gain: f64, baseline_chr: f64) -> Result<f64> {
    let h = baseline_chr;
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain {
            function: "bound_f_kl",
            message: format!("H = {h} outside (0, 1)"),
        });
    }
    if !(gain < 1.0 - h && gain > -h) {
        return Err(Error::Domain {
            function: "bound_f_kl",
            message: format!("G = {gain} outside (-H, 1 - H) for H = {h}"),
        });
    }
    let value = -h * (gain / h).ln_1p() - (1.0 - h) * (-gain / (1.0 - h)).ln_1p();
    Ok(value.max(0.0))
}

/// `(F - bound) / bound`; `None` when the bound is not positive.
pub fn rel_distance_from_bound(value: f64, bound: f64) -> Option<f64> {
    (bound > 0.0).then(|| (value - bound) / bound)
}

/// Fairness, cache and bound figures of one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub f_max: f64,
    pub f_tv: f64,
    /// Smoothed KL in nats.
    pub f_kl_raw: f64,
    pub f_kl_norm: f64,
    /// Unsmoothed KL in nats, when finite.
    pub kl_exact: Option<f64>,
    pub chr_bs: f64,
    pub chr_nf: f64,
    pub gain: f64,
    pub bound_fmax: f64,
    pub bound_ftv: f64,
    pub bound_fkl: Option<f64>,
    pub rel_fmax: Option<f64>,
    pub rel_ftv: Option<f64>,
    pub rel_fkl: Option<f64>,
}

impl FairnessReport {
    pub fn compute(
        p_bs: &DemandDistribution,
        p_nf: &DemandDistribution,
        cache: &CacheSet,
        smoothing: f64,
    ) -> Result<Self> {
        let f_max = f_max(p_bs, p_nf)?;
        let f_tv = f_tv(p_bs, p_nf)?;
        let kl = f_kl(p_bs, p_nf, smoothing)?;
        let kl_exact = kl_divergence(p_bs, p_nf)?;
        let chr_bs = chr(p_bs, cache);
        let chr_nf = chr(p_nf, cache);
        let gain = network_gain(p_nf, p_bs, cache);

        let bound_fmax = if cache.is_empty() {
            0.0
        } else {
            bound_f_max(gain, cache.len())?
        };
        let bound_ftv = bound_f_tv(gain);
        let bound_fkl = bound_f_kl(gain, chr_bs).ok();
        let kl_for_bound = kl_exact.unwrap_or(kl.raw);
        let positive = gain > 0.0;
        Ok(Self {
            f_max,
            f_tv,
            f_kl_raw: kl.raw,
            f_kl_norm: kl.normalized,
            kl_exact,
            chr_bs,
            chr_nf,
            gain,
            bound_fmax,
            bound_ftv,
            bound_fkl,
            rel_fmax: positive
                .then(|| rel_distance_from_bound(f_max, bound_fmax))
                .flatten(),
            rel_ftv: positive
                .then(|| rel_distance_from_bound(f_tv, bound_ftv))
                .flatten(),
            rel_fkl: positive
                .then(|| bound_fkl.and_then(|b| rel_distance_from_bound(kl_for_bound, b)))
                .flatten(),
        })
    }

    /// The KL value compared against the bound: exact when finite, smoothed otherwise.
    pub fn kl_for_bound(&self) -> f64 {
        self.kl_exact.unwrap_or(self.f_kl_raw)
    }

    /// Bound violations beyond `tol`, as human-readable messages.
    pub fn bound_violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.f_max < self.bound_fmax - tol {
            out.push(format!("F_max {} < G/C {}", self.f_max, self.bound_fmax));
        }
        if self.f_tv < self.bound_ftv - tol {
            out.push(format!("F_tv {} < G {}", self.f_tv, self.bound_ftv));
        }
        if let Some(b) = self.bound_fkl {
            if self.gain >= 0.0 && self.kl_for_bound() < b - tol {
                out.push(format!("KL {} < bound {}", self.kl_for_bound(), b));
            }
        }
        out
    }
}
