//! Latent-variable Gibbs kernel.
//!
//! The joint posterior is augmented with a slice level for the exponential
//! factor, a scale `w` absorbing the Bessel normaliser, and an infinite
//! family of uniform latents that only ever enter through the bounds they
//! impose. None of the latents is materialised: each sweep works with their
//! analytic residues.
//!
//! One sweep, in fixed order:
//! 1. draw τ ~ U(0,1); the slice level is v = τ · exp{κ Σⱼ Rₙⱼ(1 + cos(μⱼ − μₙⱼ))};
//! 2. for each group j in turn, draw μⱼ uniformly on the arc
//!    cos(μⱼ − μₙⱼ) > g, with g the exact bound the slice level implies
//!    given the other groups' current means;
//! 3. M = w̃ + E with E ~ Exp(I₀(κ) − 1);
//! 4. w ~ e^{−w} truncated to (w̃ r^{1/(m_t−1)}, M), r ~ U(0,1);
//! 5. N = min over k = 1…Z of κ(1 + F_k)^{1/(2k)}, F_k ~ Exp(w̃ (k!)⁻² (κ/2)^{2k});
//! 6. κ ~ e^{−R_t κ} truncated to (max{0, vₙ}, N), with
//!    vₙ = ln τ'/Σⱼ Rₙⱼ(1 + cos(μⱼ − μₙⱼ)) + κ for a fresh τ'.
//!
//! Steps 3–5 refresh the infinite latent family twice (once bounding w, once
//! bounding κ); the fresh τ' in step 6 refreshes the slice level after the
//! means have moved, which is what makes its formula the exact conditional
//! bound.

use std::f64::consts::TAU;

use rand::Rng;

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::posterior::PosteriorParams;
use crate::samplers::{sample_truncated_exp, ChainState};

/// Rates involving I₀(κ) − 1 and (κ/2)^{2k} vanish at κ = 0; the state is
/// clamped here before rate computation.
const KAPPA_FLOOR: f64 = 1e-8;

/// One full Gibbs sweep. Returns the 1-based index k whose candidate bound
/// N_k was the smallest, which drives the study of how large Z must be.
pub fn gibbs_iteration<R: Rng + ?Sized>(
    state: &mut ChainState,
    post: &PosteriorParams,
    z: usize,
    rng: &mut R,
) -> Result<usize> {
    if z == 0 {
        return Err(Error::Config("gibbs needs z >= 1".into()));
    }
    let r_t = post.r_t();
    if r_t <= 0.0 {
        return Err(Error::Config(
            "gibbs requires a positive total resultant length".into(),
        ));
    }
    state.kappa = state.kappa.max(KAPPA_FLOOR);
    let kappa = state.kappa;
    let m_t = post.m_t();

    // Slice level for the exponential factor, kept in log space:
    // ln v = ln tau + kappa * sum_j R_nj (1 + cos(mu_j - mu_nj)).
    let tau = positive_uniform(rng);
    let log_v = tau.ln() + kappa * shifted_alignment(post, &state.mu);

    // Group means: uniform on the arc the slice admits, conditioning on the
    // other groups' current (possibly already updated) values. For a single
    // group the bound reduces to ln tau / (R_n kappa) + cos(mu_cur - mu_n).
    for j in 0..state.mu.len() {
        let g = &post.groups()[j];
        let (mu_nj, r_nj) = match g.mu_n {
            Some(m) if g.r_n > 0.0 => (m, g.r_n),
            _ => {
                state.mu[j] = Angle::from_radians(positive_uniform(rng) * TAU)?;
                continue;
            }
        };
        let others = shifted_alignment(post, &state.mu)
            - r_nj * (1.0 + (state.mu[j].radians() - mu_nj.radians()).cos());
        let bound = ((log_v / kappa - others) / r_nj - 1.0).clamp(-1.0, 1.0);
        let half_arc = bound.acos();
        let u: f64 = rng.gen();
        state.mu[j] = mu_nj.rotate((2.0 * u - 1.0) * half_arc);
    }

    // Latent scale w: upper bound M = w + E collapses the whole latent
    // family into one exponential with rate I0(kappa) - 1; the lower bound
    // is the residue of the w^{m_t - 1} factor.
    let w_cur = state.w;
    let upper = w_cur + standard_exp(rng) / crate::bessel::i0_minus_1(kappa);
    let lower = if m_t > 1.0 {
        w_cur * positive_uniform(rng).powf(1.0 / (m_t - 1.0))
    } else {
        0.0
    };
    state.w = sample_truncated_exp(1.0, lower, upper, rng)?;

    // Upper bound for kappa: N_k = kappa (1 + F_k)^{1/(2k)} with F_k
    // exponential of rate w (k!)^{-2} (kappa/2)^{2k}, computed in log space.
    let log_w = state.w.ln();
    let log_half_kappa_sq = 2.0 * (0.5 * kappa).ln();
    let mut log_rate = log_w;
    let mut best_log_n = f64::INFINITY;
    let mut best_k = 1usize;
    for k in 1..=z {
        log_rate += log_half_kappa_sq - 2.0 * (k as f64).ln();
        let f_k = (standard_exp(rng).ln() - log_rate).exp();
        let log_n_k = kappa.ln() + f_k.ln_1p() / (2.0 * k as f64);
        if log_n_k < best_log_n {
            best_log_n = log_n_k;
            best_k = k;
        }
    }
    let n = best_log_n.exp();

    // Kappa: truncated exponential between the refreshed slice residue and N.
    let denom = shifted_alignment(post, &state.mu);
    let v_n = if denom > 0.0 {
        positive_uniform(rng).ln() / denom + kappa
    } else {
        f64::NEG_INFINITY
    };
    state.kappa = sample_truncated_exp(r_t, v_n.max(0.0), n, rng)?;

    Ok(best_k)
}

/// Σⱼ Rₙⱼ (1 + cos(μⱼ − μₙⱼ)).
fn shifted_alignment(post: &PosteriorParams, mu: &[Angle]) -> f64 {
    post.groups()
        .iter()
        .zip(mu)
        .map(|(g, &m)| match g.mu_n {
            Some(mu_n) => g.r_n * (1.0 + (m.radians() - mu_n.radians()).cos()),
            None => 0.0,
        })
        .sum()
}

fn positive_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

fn standard_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -positive_uniform(rng).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    use crate::angle::GroupedAngles;
    use crate::posterior::{posterior_params, ConjugatePrior};

    fn deg(d: f64) -> Angle {
        Angle::from_degrees(d).unwrap()
    }

    fn toy_post(j: usize) -> PosteriorParams {
        let group = vec![deg(10.0), deg(40.0), deg(350.0), deg(25.0), deg(80.0)];
        let data = GroupedAngles::new(vec![group; j]).unwrap();
        posterior_params(&data, &vec![ConjugatePrior::flat(); j]).unwrap()
    }

    #[test]
    fn full_circle_arc_when_slice_is_loose() {
        // With kappa at the floor the slice bound collapses to -1 and the
        // arc is the whole circle; the sweep must still complete.
        let post = toy_post(1);
        let mut state = ChainState { mu: vec![deg(0.0)], kappa: 1e-300, w: 4.0 };
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        gibbs_iteration(&mut state, &post, 25, &mut rng).unwrap();
        assert!(state.kappa > 0.0);
        assert_eq!(state.kappa.max(KAPPA_FLOOR), state.kappa);
    }

    #[test]
    fn state_stays_positive_and_finite() {
        let post = toy_post(2);
        let mut state = ChainState { mu: vec![deg(0.0); 2], kappa: 2.0, w: 4.0 };
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20_000 {
            gibbs_iteration(&mut state, &post, 25, &mut rng).unwrap();
            assert!(state.kappa.is_finite() && state.kappa > 0.0);
            assert!(state.w.is_finite() && state.w > 0.0);
            for m in &state.mu {
                assert!((0.0..TAU).contains(&m.radians()));
            }
        }
    }

    #[test]
    fn selected_index_is_within_z() {
        let post = toy_post(1);
        let mut state = ChainState { mu: vec![deg(0.0)], kappa: 2.0, w: 4.0 };
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let k = gibbs_iteration(&mut state, &post, 7, &mut rng).unwrap();
            assert!((1..=7).contains(&k));
        }
    }

    #[test]
    fn zero_resultant_is_rejected() {
        let data = GroupedAngles::single(vec![deg(0.0), deg(180.0)]);
        let post = posterior_params(&data, &[ConjugatePrior::flat()]).unwrap();
        let mut state = ChainState { mu: vec![deg(0.0)], kappa: 2.0, w: 4.0 };
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        assert!(gibbs_iteration(&mut state, &post, 25, &mut rng).is_err());
    }
}
