use crate::error::{Error, Result};

/// Default number of tangent cuts.
pub const DEFAULT_CUT_COUNT: usize = 160;
/// Default log-spacing between tangent points.
pub const DEFAULT_CUT_STEP: f64 = 0.05;

/// A line `slope * p + intercept` tangent to `ln p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentCut {
    pub slope: f64,
    pub intercept: f64,
}

impl TangentCut {
    pub fn eval(&self, p: f64) -> f64 {
        self.slope * p + self.intercept
    }
}

/// Tangents to `ln` at `p_m = exp(-(m-1) s)`, `m = 1..=M`.
///
/// The tangent at `p_m` has slope `exp((m-1) s)` and intercept
/// `-(m-1) s - 1`. Since `ln` is concave, the lower envelope of the family lies
/// on or above `ln` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentCutFamily {
    step: f64,
    cuts: Vec<TangentCut>,
}

pub fn tangent_cuts(count: usize, step: f64) -> Result<TangentCutFamily> {
    if count == 0 {
        return Err(Error::Config("tangent cut count must be at least 1".into()));
    }
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::Config(format!("tangent cut step {step} outside (0, 1)")));
    }
    let cuts = (0..count)
        .map(|m| {
            let depth = m as f64 * step;
            TangentCut {
                slope: depth.exp(),
                intercept: -depth - 1.0,
            }
        })
        .collect();
    Ok(TangentCutFamily { step, cuts })
}

impl TangentCutFamily {
    pub fn cuts(&self) -> &[TangentCut] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Tangent point of the `m`-th cut (zero-based).
    pub fn tangent_point(&self, m: usize) -> f64 {
        (-(m as f64) * self.step).exp()
    }

    /// Smallest tangent point, below which the envelope stops tracking `ln`.
    pub fn deepest_point(&self) -> f64 {
        self.tangent_point(self.cuts.len() - 1)
    }

    /// Lower envelope `min_m cut_m(p)`.
    pub fn envelope(&self, p: f64) -> f64 {
        self.cuts
            .iter()
            .map(|c| c.eval(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `envelope(p) - ln p` over `points` evenly spaced points of
    /// `[deepest_point, 1]`.
    pub fn max_gap(&self, points: usize) -> f64 {
        let lo = self.deepest_point();
        let span = 1.0 - lo;
        (0..points)
            .map(|k| {
                let p = if points == 1 {
                    lo
                } else {
                    lo + span * k as f64 / (points - 1) as f64
                };
                self.envelope(p) - p.ln()
            })
            .fold(0.0, f64::max)
    }
}
