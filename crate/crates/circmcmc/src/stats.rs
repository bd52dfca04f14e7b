//! Sufficient statistics of an angular sample.

use crate::angle::{wrap, Angle};

/// Cosine/sine sums, resultant length and mean direction of a sample.
///
/// `theta_bar` is `None` when the resultant length is (numerically) zero:
/// the direction of a zero vector is undefined and must not default to an
/// arbitrary angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStats {
    /// Σ cos θᵢ
    pub c: f64,
    /// Σ sin θᵢ
    pub s: f64,
    /// Resultant length √(C² + S²).
    pub r: f64,
    /// Mean direction, undefined when `r` vanishes.
    pub theta_bar: Option<Angle>,
    /// Sample size.
    pub n: usize,
    /// Mean resultant length R/n, zero for an empty sample.
    pub r_bar: f64,
}

/// Relative resultant length below which a direction is treated as
/// undefined. Scaled by the sample size so roundoff in large cancelling sums
/// does not manufacture a direction.
const DIRECTION_EPS: f64 = 1e-12;

/// Mean direction of the vector (C, S), or `None` when the vector is
/// numerically zero.
pub(crate) fn direction(c: f64, s: f64, scale: f64) -> Option<Angle> {
    let r = c.hypot(s);
    if r <= DIRECTION_EPS * scale.max(1.0) {
        None
    } else {
        // atan2 covers every quadrant of the branch-split arctangent form.
        Some(Angle::from_radians(wrap(s.atan2(c))).expect("atan2 output is finite"))
    }
}

/// Computes the sufficient statistics of a sample of angles.
///
/// An empty sample yields R = 0 and an undefined mean direction.
pub fn sufficient_stats(angles: &[Angle]) -> SufficientStats {
    let c: f64 = angles.iter().map(|a| a.cos()).sum();
    let s: f64 = angles.iter().map(|a| a.sin()).sum();
    let r = c.hypot(s);
    let n = angles.len();
    SufficientStats {
        c,
        s,
        r,
        theta_bar: direction(c, s, n as f64),
        n,
        r_bar: if n > 0 { r / n as f64 } else { 0.0 },
    }
}

/// Circular mean of a sample, if defined.
pub fn circular_mean(angles: &[Angle]) -> Option<Angle> {
    sufficient_stats(angles).theta_bar
}
