//! Shared test support: a brute-force grid posterior evaluated purely with
//! exp/cos sums (independent of the library's Bessel code), KS statistics,
//! and batch-means Monte Carlo standard errors.

#![allow(dead_code)]

use std::f64::consts::TAU;

use circmcmc::{Angle, GroupedAngles};

/// Joint posterior of (μ₁…μ_J, κ) under a flat prior, tabulated on a dense
/// grid and normalised by the trapezoid rule. Everything is computed from
/// first principles: the Bessel normaliser itself is a quadrature.
pub struct GridPosterior {
    pub kappa: Vec<f64>,
    /// Normalised trapezoid masses of the κ marginal.
    pub weights: Vec<f64>,
    /// Circular mean of each group's μ marginal.
    pub mu_mean: Vec<Angle>,
    /// Raw per-group cosine/sine sums of the data.
    sums: Vec<(f64, f64)>,
    n_mu: usize,
    total_n: f64,
    /// ln I₀(κ_i) by quadrature, for conditional draws.
    log_i0: Vec<f64>,
}

impl GridPosterior {
    pub fn new(data: &GroupedAngles, n_mu: usize, n_kappa: usize, kappa_hi: f64) -> Self {
        let sums: Vec<(f64, f64)> = data
            .groups()
            .iter()
            .map(|g| {
                (
                    g.iter().map(|a| a.cos()).sum::<f64>(),
                    g.iter().map(|a| a.sin()).sum::<f64>(),
                )
            })
            .collect();
        let total_n = data.total_size() as f64;
        // n_kappa points on (0, kappa_hi], plus the kappa = 0 node that
        // closes the trapezoid rule on the open end; the density there is
        // finite and, for diffuse posteriors, far from negligible.
        let kappa: Vec<f64> =
            (0..=n_kappa).map(|i| kappa_hi * i as f64 / n_kappa as f64).collect();

        // Quadrature ln I0 and per-group mu-integrals, in log space with the
        // peak factored out (integrands are smooth and periodic, so the
        // uniform trapezoid rule is effectively exact).
        let cos_grid: Vec<f64> =
            (0..n_mu).map(|l| (TAU * l as f64 / n_mu as f64).cos()).collect();
        let sin_grid: Vec<f64> =
            (0..n_mu).map(|l| (TAU * l as f64 / n_mu as f64).sin()).collect();
        let log_i0: Vec<f64> = kappa
            .iter()
            .map(|&k| {
                let mean = cos_grid.iter().map(|&c| (k * (c - 1.0)).exp()).sum::<f64>()
                    / n_mu as f64;
                k + mean.ln()
            })
            .collect();
        let mut log_marginal = vec![0.0f64; kappa.len()];
        for (ki, &k) in kappa.iter().enumerate() {
            let mut lm = -total_n * log_i0[ki];
            for &(c, s) in &sums {
                let r = c.hypot(s);
                let mean = (0..n_mu)
                    .map(|l| (k * (c * cos_grid[l] + s * sin_grid[l] - r)).exp())
                    .sum::<f64>()
                    / n_mu as f64;
                lm += k * r + mean.ln() + TAU.ln();
            }
            log_marginal[ki] = lm;
        }
        let top = log_marginal.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // Trapezoid masses on the uniform kappa grid.
        let mut weights: Vec<f64> =
            log_marginal.iter().map(|&lm| (lm - top).exp()).collect();
        weights[0] *= 0.5;
        weights[n_kappa] *= 0.5;
        let z: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= z;
        }

        // Circular mean of each group's mu marginal:
        // p_j(mu) ∝ Σ_k m(k) e^{k(C cos + S sin − R)} / L_j(k).
        let mu_mean = sums
            .iter()
            .map(|&(c, s)| {
                let r = c.hypot(s);
                let mut sin_acc = 0.0;
                let mut cos_acc = 0.0;
                for (ki, &k) in kappa.iter().enumerate() {
                    let row: Vec<f64> = (0..n_mu)
                        .map(|l| (k * (c * cos_grid[l] + s * sin_grid[l] - r)).exp())
                        .collect();
                    let row_sum: f64 = row.iter().sum();
                    for l in 0..n_mu {
                        let p = weights[ki] * row[l] / row_sum;
                        cos_acc += p * cos_grid[l];
                        sin_acc += p * sin_grid[l];
                    }
                }
                Angle::from_radians(sin_acc.atan2(cos_acc)).unwrap()
            })
            .collect();

        GridPosterior { kappa, weights, mu_mean, sums, n_mu, total_n, log_i0 }
    }

    pub fn kappa_mean(&self) -> f64 {
        self.kappa.iter().zip(&self.weights).map(|(k, w)| k * w).sum()
    }

    pub fn kappa_sd(&self) -> f64 {
        let mean = self.kappa_mean();
        let var: f64 = self
            .kappa
            .iter()
            .zip(&self.weights)
            .map(|(k, w)| w * (k - mean) * (k - mean))
            .sum();
        var.sqrt()
    }

    /// Draws (μ, κ) exactly from the tabulated grid distribution, plus the
    /// latent scale w from its Gamma conditional. Used to start chains in
    /// stationarity checks.
    pub fn sample_state<R: rand::Rng>(&self, rng: &mut R) -> (Vec<Angle>, f64, f64) {
        let ki = sample_index(&self.weights, rng);
        let k = self.kappa[ki];
        let mu = self
            .sums
            .iter()
            .map(|&(c, s)| {
                let r = c.hypot(s);
                let row: Vec<f64> = (0..self.n_mu)
                    .map(|l| {
                        let th = TAU * l as f64 / self.n_mu as f64;
                        (k * (c * th.cos() + s * th.sin() - r)).exp()
                    })
                    .collect();
                let total: f64 = row.iter().sum();
                let probs: Vec<f64> = row.iter().map(|x| x / total).collect();
                let l = sample_index(&probs, rng);
                Angle::from_radians(TAU * l as f64 / self.n_mu as f64).unwrap()
            })
            .collect();
        let i0 = self.log_i0[ki].exp();
        let w = rand_distr::Distribution::sample(
            &rand_distr::Gamma::new(self.total_n, 1.0 / i0).unwrap(),
            rng,
        );
        (mu, k, w)
    }

    /// Index of the grid κ quantile, for equal-mass binning.
    pub fn kappa_quantile(&self, p: f64) -> f64 {
        let mut acc = 0.0;
        for (k, w) in self.kappa.iter().zip(&self.weights) {
            acc += w;
            if acc >= p {
                return *k;
            }
        }
        *self.kappa.last().unwrap()
    }
}

fn sample_index<R: rand::Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u <= acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Mean and its batch-means Monte Carlo standard error; robust to chain
/// autocorrelation when batches are much longer than the mixing time.
pub fn mean_with_mcse(xs: &[f64]) -> (f64, f64) {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let b = 50.min(xs.len());
    let size = xs.len() / b;
    let batch_means: Vec<f64> = (0..b)
        .map(|i| xs[i * size..(i + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let bm = batch_means.iter().sum::<f64>() / b as f64;
    let var =
        batch_means.iter().map(|m| (m - bm) * (m - bm)).sum::<f64>() / (b as f64 - 1.0);
    (mean, (var / b as f64).sqrt())
}

/// Standard deviation and its batch-means MCSE.
pub fn sd_with_mcse(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    let b = 50.min(xs.len());
    let size = xs.len() / b;
    let batch_vars: Vec<f64> = (0..b)
        .map(|i| {
            let chunk = &xs[i * size..(i + 1) * size];
            let m = chunk.iter().sum::<f64>() / size as f64;
            chunk.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / size as f64
        })
        .collect();
    let bv = batch_vars.iter().sum::<f64>() / b as f64;
    let var_of_var =
        batch_vars.iter().map(|v| (v - bv) * (v - bv)).sum::<f64>() / (b as f64 - 1.0);
    let mcse_var = (var_of_var / b as f64).sqrt();
    (sd, mcse_var / (2.0 * sd))
}

/// One-sample Kolmogorov-Smirnov statistic against a tabulated CDF given as
/// (points, cumulative) with `cumulative` non-decreasing to 1.
pub fn ks_statistic_vs_grid(draws: &[f64], points: &[f64], cumulative: &[f64]) -> f64 {
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let idx = points.partition_point(|p| p <= x);
        let cdf = if idx == 0 { 0.0 } else { cumulative[idx - 1] };
        d = d.max((i as f64 / n - cdf).abs()).max(((i + 1) as f64 / n - cdf).abs());
    }
    d
}

/// Critical KS value at significance 0.01 for sample size n.
pub fn ks_critical_001(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Circular standard deviation in radians from a set of angles.
pub fn circular_sd(angles: &[Angle]) -> f64 {
    let st = circmcmc::sufficient_stats(angles);
    (-2.0 * st.r_bar.ln()).sqrt()
}

/// Fixed toy datasets for oracle comparisons: small enough for a dense
/// grid, diffuse enough that κ mass above the grid ceiling is negligible.
pub fn toy_one_group() -> GroupedAngles {
    let deg = [44.0, 12.0, 354.0, 30.0, 102.0, 325.0];
    GroupedAngles::single(deg.iter().map(|&d| Angle::from_degrees(d).unwrap()).collect())
}

pub fn toy_two_groups() -> GroupedAngles {
    let g1 = [15.0, 37.0, 330.0, 63.0];
    let g2 = [220.0, 255.0, 200.0, 240.0];
    GroupedAngles::new(vec![
        g1.iter().map(|&d| Angle::from_degrees(d).unwrap()).collect(),
        g2.iter().map(|&d| Angle::from_degrees(d).unwrap()).collect(),
    ])
    .unwrap()
}
