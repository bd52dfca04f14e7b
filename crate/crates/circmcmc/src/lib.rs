//! Bayesian inference for grouped circular data under a von Mises model
//! with a common concentration.
//!
//! The model: J groups of angles, each group following VM(μⱼ, κ) with its
//! own mean direction but a shared κ. A conjugate prior (`c` pseudo-
//! observations with resultant length `R₀` at direction `μ₀`, per group)
//! keeps the posterior in closed form up to the Bessel normaliser, and
//! three exact MCMC samplers draw from it:
//!
//! * [`Method::Gibbs`] — a latent-variable scheme built entirely from
//!   uniform and truncated-exponential draws; mixes slowly for
//!   concentrated data and is refused above κ ≈ 7,
//! * [`Method::Mh`] — Metropolis-Hastings on κ with a χ² proposal,
//! * [`Method::Rejection`] — independence rejection from a certified
//!   envelope; κ draws are exact and nearly uncorrelated.
//!
//! [`run_chain`] drives any of the kernels and returns a [`Trace`];
//! [`inference::summarize`] turns a trace into point estimates and
//! intervals; [`simulation`] replicates whole designs in parallel; and
//! [`cli`] holds the file formats behind the `circmcmc` binary.
//!
//! ```
//! use circmcmc::{
//!     run_chain, Angle, ConjugatePrior, GroupedAngles, Method, SamplerConfig,
//! };
//! use rand::SeedableRng;
//!
//! let degrees = [44.0, 12.0, 354.0, 30.0, 22.0, 9.0];
//! let data = GroupedAngles::single(
//!     degrees.iter().map(|&d| Angle::from_degrees(d).unwrap()).collect(),
//! );
//! let config = SamplerConfig { retained: 2000, ..SamplerConfig::default() };
//! let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
//! let trace = run_chain(
//!     Method::Rejection,
//!     &data,
//!     &[ConjugatePrior::flat()],
//!     &config,
//!     &mut rng,
//! )
//! .unwrap();
//! let summary = circmcmc::inference::summarize(&trace);
//! println!("kappa mode {:.2}", summary.kappa_mode);
//! ```

pub mod angle;
pub mod bessel;
pub mod cli;
pub mod error;
pub mod inference;
pub mod posterior;
pub mod samplers;
pub mod simulation;
pub mod stats;
pub mod vonmises;

pub use angle::{wrap_angle, Angle, GroupedAngles};
pub use bessel::log_bessel_i0;
pub use error::{Error, Result};
pub use posterior::{posterior_params, ConjugatePrior, GroupPosterior, PosteriorParams};
pub use samplers::{
    chi2_logpdf, gibbs_iteration, mh_iteration, rejection_kappa, run_chain,
    sample_mu_conditional, sample_truncated_exp, ChainState, GibbsConfig, Method,
    SamplerConfig, Trace,
};
pub use stats::{circular_mean, sufficient_stats, SufficientStats};
pub use vonmises::{sample_von_mises, vm_log_density};
