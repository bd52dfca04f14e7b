//! Angles on the unit circle and grouped angular observations.
//!
//! All angles are stored in radians in `[0, 2π)`. Degrees exist only at the
//! I/O boundary (see [`crate::cli`]).

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// An angle in radians, always in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Angle(f64);

// Deserialization goes through the wrapping constructor so the range
// invariant survives arbitrary input.
impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Angle, D::Error> {
        let x = f64::deserialize(deserializer)?;
        Angle::from_radians(x).map_err(serde::de::Error::custom)
    }
}

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps an arbitrary finite radian value into `[0, 2π)`.
    pub fn from_radians(x: f64) -> Result<Angle> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("non-finite angle: {x}")));
        }
        Ok(Angle(wrap(x)))
    }

    /// Wraps degrees into `[0, 2π)` radians.
    pub fn from_degrees(deg: f64) -> Result<Angle> {
        Angle::from_radians(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    /// Geodesic circular distance, symmetric and at most π.
    pub fn distance(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }

    /// Rotates by `delta` radians, wrapping the result.
    pub fn rotate(self, delta: f64) -> Angle {
        Angle(wrap(self.0 + delta))
    }

    /// Signed deviation of `self` from `center`, in `(-π, π]`.
    pub fn signed_from(self, center: Angle) -> f64 {
        let mut d = self.0 - center.0;
        if d > PI {
            d -= TAU;
        } else if d <= -PI {
            d += TAU;
        }
        d
    }
}

/// Reduces any finite radian value to `[0, 2π)`.
pub(crate) fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can return TAU when x is a tiny negative number.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wraps a finite radian value into `[0, 2π)`.
///
/// Errors on non-finite input.
pub fn wrap_angle(x: f64) -> Result<Angle> {
    Angle::from_radians(x)
}

/// One or more ordered groups of angular observations.
///
/// Group order is stable; group `j` of the posterior always refers to the
/// `j`-th vector given at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedAngles {
    groups: Vec<Vec<Angle>>,
}

impl GroupedAngles {
    /// Builds the container. At least one group is required; empty groups
    /// are allowed (the prior then carries that group alone).
    pub fn new(groups: Vec<Vec<Angle>>) -> Result<GroupedAngles> {
        if groups.is_empty() {
            return Err(Error::Config("at least one group is required".into()));
        }
        Ok(GroupedAngles { groups })
    }

    /// Convenience for a single group.
    pub fn single(angles: Vec<Angle>) -> GroupedAngles {
        GroupedAngles { groups: vec![angles] }
    }

    /// Number of groups J.
    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    /// Observation count of group `j`.
    pub fn group_size(&self, j: usize) -> usize {
        self.groups[j].len()
    }

    pub fn groups(&self) -> &[Vec<Angle>] {
        &self.groups
    }

    /// Total observation count across groups.
    pub fn total_size(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Returns a copy with every observation rotated by `delta`.
    pub fn rotated(&self, delta: f64) -> GroupedAngles {
        GroupedAngles {
            groups: self
                .groups
                .iter()
                .map(|g| g.iter().map(|a| a.rotate(delta)).collect())
                .collect(),
        }
    }
}
