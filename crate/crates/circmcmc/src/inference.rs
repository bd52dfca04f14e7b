//! Posterior summaries: highest density intervals, mode estimates, circular
//! credible intervals, and the per-trace summary used by the simulation
//! harness.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::samplers::Trace;
use crate::stats::sufficient_stats;

/// An interval on the real line together with the posterior mass it was
/// asked to contain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSummary {
    pub lower: f64,
    pub upper: f64,
    pub mass: f64,
}

impl IntervalSummary {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// A credible interval on the circle; `lower` and `upper` may straddle zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularInterval {
    pub lower: Angle,
    pub upper: Angle,
}

impl CircularInterval {
    /// Membership respecting wrap-around.
    pub fn contains(&self, x: Angle) -> bool {
        let (lo, hi, x) = (self.lower.radians(), self.upper.radians(), x.radians());
        if lo <= hi {
            lo <= x && x <= hi
        } else {
            x >= lo || x <= hi
        }
    }

    /// Arc length from lower to upper going counter-clockwise.
    pub fn width(&self) -> f64 {
        let d = self.upper.radians() - self.lower.radians();
        if d >= 0.0 {
            d
        } else {
            d + std::f64::consts::TAU
        }
    }
}

/// Shortest interval containing a fraction `mass` of the draws.
///
/// Sorts a copy and slides a window of ⌈mass·Q⌉ consecutive order
/// statistics; ties go to the lowest lower endpoint.
pub fn hdi(draws: &[f64], mass: f64) -> Result<IntervalSummary> {
    if draws.is_empty() {
        return Err(Error::Domain("hdi of an empty sample".into()));
    }
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::Domain(format!("hdi mass must be in (0,1), got {mass}")));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = sorted.len();
    let window = ((mass * q as f64).ceil() as usize).clamp(1, q);
    let mut best = (0usize, f64::INFINITY);
    for i in 0..=(q - window) {
        let width = sorted[i + window - 1] - sorted[i];
        if width < best.1 {
            best = (i, width);
        }
    }
    Ok(IntervalSummary {
        lower: sorted[best.0],
        upper: sorted[best.0 + window - 1],
        mass,
    })
}

/// Mode estimate: the midpoint of the 10% highest density interval. Skewed
/// posteriors (κ is one) bias the mean and median; the narrow-HDI midpoint
/// tracks the peak instead.
pub fn mode_from_hdi(draws: &[f64]) -> Result<f64> {
    let h = hdi(draws, 0.10)?;
    Ok(0.5 * (h.lower + h.upper))
}

/// Central credible interval for angular draws.
///
/// The draws are rotated so their mean direction sits at π, the linear
/// (1−mass)/2 and 1−(1−mass)/2 quantiles are taken, and the endpoints are
/// rotated back.
pub fn circular_cci(draws: &[Angle], mass: f64) -> Result<CircularInterval> {
    if draws.is_empty() {
        return Err(Error::Domain("credible interval of an empty sample".into()));
    }
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::Domain(format!("interval mass must be in (0,1), got {mass}")));
    }
    let st = sufficient_stats(draws);
    let mean = st.theta_bar.ok_or(Error::UndefinedDirection)?;
    let shift = PI - mean.radians();
    let mut rotated: Vec<f64> = draws.iter().map(|a| a.rotate(shift).radians()).collect();
    rotated.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tail = 0.5 * (1.0 - mass);
    let lo = linear_quantile(&rotated, tail);
    let hi = linear_quantile(&rotated, 1.0 - tail);
    Ok(CircularInterval {
        lower: Angle::from_radians(lo)?.rotate(-shift),
        upper: Angle::from_radians(hi)?.rotate(-shift),
    })
}

/// Linearly interpolated quantile of a sorted sample.
fn linear_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Bias relative to the true value: (estimate − truth) / truth.
pub fn relative_bias(estimate: f64, truth: f64) -> Result<f64> {
    if truth == 0.0 {
        return Err(Error::Domain("relative bias is undefined for a zero truth".into()));
    }
    Ok((estimate - truth) / truth)
}

/// Point estimates and intervals extracted from one trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosteriorSummary {
    /// Circular mean of the μ draws, per group.
    pub mu_mean: Vec<Angle>,
    /// 95% central credible interval of μ, per group.
    pub mu_cci: Vec<CircularInterval>,
    /// κ mode via the 10% HDI midpoint.
    pub kappa_mode: f64,
    /// 95% highest density interval of κ.
    pub kappa_hdi95: IntervalSummary,
    /// Acceptance rate under the method's convention.
    pub acceptance: f64,
    pub wall_seconds: f64,
}

/// Summarises a trace: per-group circular means and 95% CCIs, the κ mode
/// and 95% HDI, the method's acceptance rate, and the recorded wall time.
pub fn summarize(trace: &Trace) -> PosteriorSummary {
    let mu_mean = trace
        .mu
        .iter()
        .map(|col| {
            sufficient_stats(col)
                .theta_bar
                .expect("mu draws of a chain cannot have zero resultant")
        })
        .collect();
    let mu_cci = trace
        .mu
        .iter()
        .map(|col| circular_cci(col, 0.95).expect("chain mu draws are non-empty"))
        .collect();
    PosteriorSummary {
        mu_mean,
        mu_cci,
        kappa_mode: mode_from_hdi(&trace.kappa).expect("chain kappa draws are non-empty"),
        kappa_hdi95: hdi(&trace.kappa, 0.95).expect("chain kappa draws are non-empty"),
        acceptance: trace.acceptance_rate(),
        wall_seconds: trace.wall_seconds,
    }
}
