//! MCMC kernels for the joint posterior of (μ₁…μ_J, κ) and the chain driver.
//!
//! Three kernels target the same distribution: a latent-variable Gibbs
//! sampler built from uniform and truncated-exponential draws, a
//! Metropolis-Hastings step with a χ² proposal for κ, and an independence
//! rejection step that draws κ exactly from its conditional. The μ update is
//! shared: each group mean has a von Mises conditional.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::angle::{Angle, GroupedAngles};
use crate::error::{Error, Result};
use crate::posterior::{posterior_params, ConjugatePrior, PosteriorParams};
use crate::vonmises::sample_von_mises;

pub mod gibbs;
pub mod mh;
pub mod rejection;

pub use gibbs::gibbs_iteration;
pub use mh::{chi2_logpdf, mh_iteration};
pub use rejection::rejection_kappa;

/// Sampling method selector.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gibbs,
    Mh,
    Rejection,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Gibbs => "gibbs",
            Method::Mh => "mh",
            Method::Rejection => "rejection",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        match s {
            "gibbs" => Ok(Method::Gibbs),
            "mh" => Ok(Method::Mh),
            "rejection" => Ok(Method::Rejection),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected gibbs, mh or rejection)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Extra options consumed only by the Gibbs kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsConfig {
    /// Starting group means; a single value is broadcast to all groups.
    pub mu_start: Vec<Angle>,
    /// Starting value of the latent scale w.
    pub w_start: f64,
    /// Number of candidate upper bounds drawn per κ update.
    pub z: usize,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig { mu_start: vec![Angle::ZERO], w_start: 4.0, z: 25 }
    }
}

/// Chain driver configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Retained draw count Q.
    pub retained: usize,
    /// Keep every `lag`-th iteration after burn-in.
    pub lag: usize,
    /// Discarded initial iterations; `None` means 500·lag.
    pub burn_in: Option<usize>,
    /// Starting value of κ.
    pub kappa_start: f64,
    #[serde(default)]
    pub gibbs: GibbsConfig,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            retained: 10_000,
            lag: 1,
            burn_in: None,
            kappa_start: 2.0,
            gibbs: GibbsConfig::default(),
        }
    }
}

impl SamplerConfig {
    pub fn effective_burn_in(&self) -> usize {
        self.burn_in.unwrap_or(500 * self.lag)
    }

    fn validate(&self, method: Method, n_groups: usize) -> Result<()> {
        if self.retained == 0 || self.lag == 0 {
            return Err(Error::Config(
                "retained iterations and lag must both be at least 1".into(),
            ));
        }
        if !(self.kappa_start.is_finite() && self.kappa_start > 0.0) {
            return Err(Error::Config(format!(
                "kappa_start must be positive, got {}",
                self.kappa_start
            )));
        }
        if method == Method::Gibbs {
            if self.gibbs.z == 0 {
                return Err(Error::Config("gibbs requires z >= 1".into()));
            }
            if !(self.gibbs.w_start.is_finite() && self.gibbs.w_start > 0.0) {
                return Err(Error::Config(format!(
                    "gibbs requires w_start > 0, got {}",
                    self.gibbs.w_start
                )));
            }
            if self.gibbs.mu_start.len() != 1 && self.gibbs.mu_start.len() != n_groups {
                return Err(Error::Config(format!(
                    "gibbs mu_start has {} entries for {} groups",
                    self.gibbs.mu_start.len(),
                    n_groups
                )));
            }
        }
        Ok(())
    }
}

/// Current state of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    /// Group means μ₁…μ_J.
    pub mu: Vec<Angle>,
    /// Common concentration, strictly positive.
    pub kappa: f64,
    /// Latent scale of the Gibbs sampler; unused by the other kernels.
    pub w: f64,
}

/// Retained draws and bookkeeping of one chain run.
#[derive(Debug, Clone)]
pub struct Trace {
    /// μ draws, indexed `[group][draw]`.
    pub mu: Vec<Vec<Angle>>,
    /// κ draws.
    pub kappa: Vec<f64>,
    /// MH only: retained iterations whose proposal was accepted.
    pub accepted: u64,
    /// Rejection only: envelope candidates consumed by retained iterations.
    pub candidates: u64,
    /// Retained μ updates that fell back to a uniform draw because the
    /// group's posterior resultant length was zero.
    pub uniform_mu_fallbacks: u64,
    /// Wall-clock time of the whole run, seconds.
    pub wall_seconds: f64,
    pub method: Method,
}

impl Trace {
    pub fn retained(&self) -> usize {
        self.kappa.len()
    }

    pub fn n_groups(&self) -> usize {
        self.mu.len()
    }

    /// Acceptance rate under each method's own convention: Gibbs draws are
    /// always accepted, MH reports Q_acc/Q, rejection reports Q/Q_can.
    pub fn acceptance_rate(&self) -> f64 {
        match self.method {
            Method::Gibbs => 1.0,
            Method::Mh => self.accepted as f64 / self.retained() as f64,
            Method::Rejection => self.retained() as f64 / self.candidates as f64,
        }
    }
}

/// Inverse-CDF draw from the density ∝ e^{−rate·x} on (lower, upper).
///
/// `upper` may be infinite. The result is strictly inside the interval.
pub fn sample_truncated_exp<R: Rng + ?Sized>(
    rate: f64,
    lower: f64,
    upper: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::Domain(format!("truncated exponential needs rate > 0, got {rate}")));
    }
    if lower.is_nan() || upper.is_nan() || lower >= upper {
        return Err(Error::DegenerateInterval { lower, upper });
    }
    // q = 1 - e^{-rate (upper-lower)}, the CDF mass of the interval.
    let q = -(-rate * (upper - lower)).exp_m1();
    for _ in 0..64 {
        let u: f64 = rng.gen();
        let x = lower - (-u * q).ln_1p() / rate;
        if x > lower && x < upper {
            return Ok(x);
        }
    }
    // Only reachable when the interval is a handful of ulps wide and every
    // representable draw rounds onto an endpoint; the midpoint is then
    // exact to working precision.
    Ok(0.5 * (lower + upper))
}

/// Draw from the density ∝ e^{slope·x} on (lower, upper); slope of either
/// sign, upper may be infinite when slope < 0. Used by the rejection
/// envelope pieces.
pub(crate) fn sample_exp_tilt<R: Rng + ?Sized>(
    slope: f64,
    lower: f64,
    upper: f64,
    rng: &mut R,
) -> f64 {
    debug_assert!(lower < upper);
    if slope == 0.0 {
        return lower + rng.gen::<f64>() * (upper - lower);
    }
    for _ in 0..64 {
        let u: f64 = rng.gen();
        let x = lower + (u * (slope * (upper - lower)).exp_m1()).ln_1p() / slope;
        if x >= lower && x < upper {
            return x;
        }
    }
    lower
}

/// Draws μⱼ from its conditional VM(μₙⱼ, Rₙⱼ·κ); a zero resultant length
/// degenerates to the circular uniform. Returns the draw and whether the
/// uniform fallback fired.
pub fn sample_mu_conditional<R: Rng + ?Sized>(
    post: &PosteriorParams,
    group: usize,
    kappa: f64,
    rng: &mut R,
) -> Result<(Angle, bool)> {
    let g = &post.groups()[group];
    match g.mu_n {
        Some(mu_n) if g.r_n > 0.0 => {
            Ok((sample_von_mises(mu_n, g.r_n * kappa, rng)?, false))
        }
        _ => Ok((sample_von_mises(Angle::ZERO, 0.0, rng)?, true)),
    }
}

/// Runs one chain: `burn_in` discarded iterations followed by
/// `retained · lag` iterations of which every `lag`-th is kept.
///
/// The same seed state and configuration produce an identical sequence of
/// draws; wall time is the only field that varies between runs.
pub fn run_chain<R: Rng + ?Sized>(
    method: Method,
    data: &GroupedAngles,
    prior: &[ConjugatePrior],
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<Trace> {
    let started = Instant::now();
    config.validate(method, data.n_groups())?;
    let post = posterior_params(data, prior)?;
    if method == Method::Gibbs && post.r_t() <= 0.0 {
        return Err(Error::Config(
            "gibbs requires a positive total resultant length".into(),
        ));
    }

    let j = data.n_groups();
    let mu_start = if config.gibbs.mu_start.len() == j {
        config.gibbs.mu_start.clone()
    } else {
        vec![config.gibbs.mu_start[0]; j]
    };
    let mut state = ChainState {
        mu: mu_start,
        kappa: config.kappa_start,
        w: config.gibbs.w_start,
    };

    let q = config.retained;
    let lag = config.lag;
    let burn_in = config.effective_burn_in();
    let mut trace = Trace {
        mu: vec![Vec::with_capacity(q); j],
        kappa: Vec::with_capacity(q),
        accepted: 0,
        candidates: 0,
        uniform_mu_fallbacks: 0,
        wall_seconds: 0.0,
        method,
    };

    let total = burn_in + q * lag;
    for it in 0..total {
        let keep = it >= burn_in && (it - burn_in + 1).is_multiple_of(lag);
        let mut accepted = false;
        let mut cands = 0u64;
        let mut fallbacks = 0u64;
        match method {
            Method::Gibbs => {
                gibbs::gibbs_iteration(&mut state, &post, config.gibbs.z, rng)?;
            }
            Method::Mh => {
                accepted = mh::mh_iteration(&mut state, &post, rng, &mut fallbacks)?;
            }
            Method::Rejection => {
                cands = rejection::rejection_iteration(&mut state, &post, rng, &mut fallbacks)?;
            }
        }
        if keep {
            for (col, &m) in trace.mu.iter_mut().zip(&state.mu) {
                col.push(m);
            }
            trace.kappa.push(state.kappa);
            if accepted {
                trace.accepted += 1;
            }
            trace.candidates += cands;
            trace.uniform_mu_fallbacks += fallbacks;
        }
    }
    trace.wall_seconds = started.elapsed().as_secs_f64();
    Ok(trace)
}
