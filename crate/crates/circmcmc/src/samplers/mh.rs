//! Metropolis-Hastings kernel for κ with a χ² proposal.
//!
//! The group means are refreshed exactly from their von Mises conditionals;
//! κ then takes an MH step with proposal χ²(κ_can | df = κ_cur), evaluated
//! in log space throughout.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::posterior::PosteriorParams;
use crate::samplers::{sample_mu_conditional, ChainState};

/// Log density of the χ² distribution with real-valued degrees of freedom.
pub fn chi2_logpdf(x: f64, df: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("chi-square density needs x > 0, got {x}")));
    }
    if !(df > 0.0 && df.is_finite()) {
        return Err(Error::Domain(format!("chi-square density needs df > 0, got {df}")));
    }
    let h = 0.5 * df;
    Ok((h - 1.0) * x.ln() - 0.5 * x - ln_gamma(h) - h * std::f64::consts::LN_2)
}

/// Log of the MH ratio for moving κ from `from` to `to` given the current
/// means: ln f(to) + ln χ²(from | to) − ln f(from) − ln χ²(to | from).
pub(crate) fn log_mh_ratio(
    post: &PosteriorParams,
    mu: &[crate::angle::Angle],
    from: f64,
    to: f64,
) -> Result<f64> {
    Ok(post.log_posterior(mu, to) + chi2_logpdf(from, to)?
        - post.log_posterior(mu, from)
        - chi2_logpdf(to, from)?)
}

/// One MH sweep: refresh every μⱼ, then propose a new κ. Returns whether the
/// κ proposal was accepted. `fallbacks` counts degenerate uniform μ draws.
pub fn mh_iteration<R: Rng + ?Sized>(
    state: &mut ChainState,
    post: &PosteriorParams,
    rng: &mut R,
    fallbacks: &mut u64,
) -> Result<bool> {
    for j in 0..state.mu.len() {
        let (mu_j, fell_back) = sample_mu_conditional(post, j, state.kappa, rng)?;
        state.mu[j] = mu_j;
        if fell_back {
            *fallbacks += 1;
        }
    }

    let proposal = ChiSquared::new(state.kappa)
        .map_err(|e| Error::Domain(format!("chi-square proposal: {e}")))?;
    let candidate = proposal.sample(rng);
    // A candidate that underflows to zero has no density to evaluate.
    if !(candidate > 0.0 && candidate.is_finite()) {
        return Ok(false);
    }
    let a = log_mh_ratio(post, &state.mu, state.kappa, candidate)?;
    let u: f64 = rng.gen();
    if a > u.ln() {
        state.kappa = candidate;
        Ok(true)
    } else {
        Ok(false)
    }
}
