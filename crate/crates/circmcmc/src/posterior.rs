//! Conjugate prior and prior-to-posterior updating.
//!
//! The prior for one group is parameterised as `c` pseudo-observations with
//! resultant length `R₀` at direction `μ₀`. Combining it with the data's
//! cosine/sine sums yields per-group posterior parameters `(μₙ, Rₙ, m)`;
//! the totals over groups are all the samplers ever need.

use serde::{Deserialize, Serialize};

use crate::angle::{Angle, GroupedAngles};
use crate::error::{Error, Result};
use crate::stats::{direction, sufficient_stats};

/// Conjugate prior for one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugatePrior {
    /// Prior mean direction μ₀.
    pub mu0: Angle,
    /// Prior resultant length R₀ ≥ 0.
    pub r0: f64,
    /// Prior observation count c ≥ 0 (real-valued).
    pub c: f64,
}

impl ConjugatePrior {
    /// Non-informative prior: μ₀ = 0, R₀ = 0, c = 0.
    pub fn flat() -> ConjugatePrior {
        ConjugatePrior { mu0: Angle::ZERO, r0: 0.0, c: 0.0 }
    }

    pub fn new(mu0: Angle, r0: f64, c: f64) -> Result<ConjugatePrior> {
        if !r0.is_finite() || !c.is_finite() || r0 < 0.0 || c < 0.0 {
            return Err(Error::Config(format!(
                "prior needs finite r0 >= 0 and c >= 0, got r0 = {r0}, c = {c}"
            )));
        }
        // A resultant of c unit vectors cannot exceed c.
        if c > 0.0 && r0 > c {
            return Err(Error::Config(format!(
                "prior resultant length r0 = {r0} exceeds its observation count c = {c}"
            )));
        }
        if c == 0.0 && r0 > 0.0 {
            return Err(Error::Config(format!(
                "prior resultant length r0 = {r0} requires a positive observation count"
            )));
        }
        Ok(ConjugatePrior { mu0, r0, c })
    }
}

/// Posterior parameters of one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupPosterior {
    /// Posterior mean direction μₙ, undefined when Rₙ vanishes.
    pub mu_n: Option<Angle>,
    /// Posterior resultant length Rₙ ≥ 0.
    pub r_n: f64,
    /// Posterior observation count m = n + c.
    pub m: f64,
}

impl GroupPosterior {
    /// Rₙ cos(μ − μₙ); zero when the direction is undefined (Rₙ = 0).
    pub(crate) fn alignment(&self, mu: Angle) -> f64 {
        match self.mu_n {
            Some(mu_n) => self.r_n * (mu.radians() - mu_n.radians()).cos(),
            None => 0.0,
        }
    }
}

/// Per-group posterior parameters plus their totals.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorParams {
    groups: Vec<GroupPosterior>,
    r_t: f64,
    m_t: f64,
}

impl PosteriorParams {
    pub fn groups(&self) -> &[GroupPosterior] {
        &self.groups
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    /// R_t = Σⱼ Rₙⱼ.
    pub fn r_t(&self) -> f64 {
        self.r_t
    }

    /// m_t = Σⱼ mⱼ.
    pub fn m_t(&self) -> f64 {
        self.m_t
    }

    /// Unnormalised log posterior of (μ₁…μ_J, κ):
    /// −m_t ln I₀(κ) + κ Σⱼ Rₙⱼ cos(μⱼ − μₙⱼ).
    pub fn log_posterior(&self, mu: &[Angle], kappa: f64) -> f64 {
        debug_assert_eq!(mu.len(), self.groups.len());
        let align: f64 =
            self.groups.iter().zip(mu).map(|(g, &m)| g.alignment(m)).sum();
        -self.m_t * crate::bessel::log_i0(kappa) + kappa * align
    }

    /// Σⱼ Rₙⱼ cos(μⱼ − μₙⱼ) for the current group means.
    pub(crate) fn total_alignment(&self, mu: &[Angle]) -> f64 {
        self.groups.iter().zip(mu).map(|(g, &m)| g.alignment(m)).sum()
    }
}

/// Combines data and per-group priors into posterior parameters.
///
/// Per group: Cₙ = R₀ cos μ₀ + Σ cos θᵢ, Sₙ = R₀ sin μ₀ + Σ sin θᵢ,
/// Rₙ = √(Cₙ² + Sₙ²), μₙ = direction of (Cₙ, Sₙ), m = n + c.
pub fn posterior_params(
    data: &GroupedAngles,
    prior: &[ConjugatePrior],
) -> Result<PosteriorParams> {
    if data.n_groups() != prior.len() {
        return Err(Error::Config(format!(
            "{} data groups but {} priors",
            data.n_groups(),
            prior.len()
        )));
    }
    let mut groups = Vec::with_capacity(data.n_groups());
    let mut r_t = 0.0;
    let mut m_t = 0.0;
    for (angles, p) in data.groups().iter().zip(prior) {
        let st = sufficient_stats(angles);
        let c_n = p.r0 * p.mu0.cos() + st.c;
        let s_n = p.r0 * p.mu0.sin() + st.s;
        let m = st.n as f64 + p.c;
        let mu_n = direction(c_n, s_n, m);
        // A resultant below cancellation noise is a resultant of zero; the
        // pair (mu_n, r_n) stays consistent either way.
        let r_n = if mu_n.is_some() { c_n.hypot(s_n) } else { 0.0 };
        let g = GroupPosterior { mu_n, r_n, m };
        r_t += g.r_n;
        m_t += g.m;
        groups.push(g);
    }
    Ok(PosteriorParams { groups, r_t, m_t })
}
