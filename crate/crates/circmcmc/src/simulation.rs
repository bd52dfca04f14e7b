//! Replication machinery: dataset generation, whole-cell runs with
//! per-replication summaries, the Z-selection study, and the lag schedule.
//!
//! Replications are independent work units. Each derives its RNG streams
//! from (cell seed, replication index), so results do not depend on worker
//! count or scheduling; aggregation reduces in replication order.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{Angle, GroupedAngles};
use crate::error::{Error, Result};
use crate::inference::{summarize, PosteriorSummary};
use crate::posterior::{posterior_params, ConjugatePrior};
use crate::samplers::{gibbs_iteration, run_chain, ChainState, GibbsConfig, Method, SamplerConfig};
use crate::stats::sufficient_stats;
use crate::vonmises::sample_von_mises;

/// Gibbs autocorrelation explodes somewhere above this concentration; the
/// harness refuses to schedule it there.
pub const GIBBS_KAPPA_LIMIT: f64 = 7.0;

/// Published lag anchors: (κ_true · total n, lag).
const LAG_ANCHOR_LOW: (f64, f64) = (1.0, 2.0);
const LAG_ANCHOR_HIGH: (f64, f64) = (1200.0, 250.0);

/// One cell of a simulation design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellDesign {
    /// Number of groups J.
    pub groups: usize,
    /// Observations per group.
    pub n_per_group: usize,
    /// Data-generating concentration.
    pub kappa_true: f64,
    /// Data-generating mean directions, degrees, one per group.
    pub true_means_deg: Vec<f64>,
    pub replications: usize,
    pub methods: Vec<Method>,
    /// Lag overrides; methods without an entry use [`lag_schedule`].
    #[serde(default)]
    pub lags: std::collections::BTreeMap<Method, usize>,
    pub seed: u64,
    /// Retained draws per chain.
    #[serde(default = "default_retained")]
    pub retained: usize,
}

fn default_retained() -> usize {
    10_000
}

impl CellDesign {
    /// A cell with the comparative-study conventions: true means at 20°
    /// (and 40°, 60° for more groups), flat prior, 10⁴ retained draws.
    pub fn study_cell(
        groups: usize,
        n_per_group: usize,
        kappa_true: f64,
        methods: Vec<Method>,
        replications: usize,
        seed: u64,
    ) -> CellDesign {
        CellDesign {
            groups,
            n_per_group,
            kappa_true,
            true_means_deg: (0..groups).map(|j| 20.0 + 20.0 * j as f64).collect(),
            replications,
            methods,
            lags: Default::default(),
            seed,
            retained: default_retained(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.groups == 0 || self.replications == 0 || self.retained == 0 {
            return Err(Error::Config(
                "groups, replications and retained must all be at least 1".into(),
            ));
        }
        if self.true_means_deg.len() != self.groups {
            return Err(Error::Config(format!(
                "{} true means for {} groups",
                self.true_means_deg.len(),
                self.groups
            )));
        }
        if !(self.kappa_true >= 0.0 && self.kappa_true.is_finite()) {
            return Err(Error::Config(format!("bad kappa_true {}", self.kappa_true)));
        }
        for &m in &self.methods {
            if m == Method::Gibbs && self.kappa_true > GIBBS_KAPPA_LIMIT {
                return Err(Error::GibbsInfeasible { kappa: self.kappa_true });
            }
        }
        Ok(())
    }

    pub fn total_n(&self) -> usize {
        self.groups * self.n_per_group
    }

    /// The lag to use for `method`: an explicit override if present,
    /// otherwise the schedule.
    pub fn lag_for(&self, method: Method) -> Result<usize> {
        match self.lags.get(&method) {
            Some(&lag) if lag >= 1 => Ok(lag),
            Some(&lag) => Err(Error::Config(format!("lag {lag} for {method} must be >= 1"))),
            None => lag_schedule(self, method),
        }
    }
}

/// Thinning schedule per method.
///
/// MH and rejection mix fast and use lag 1. The Gibbs lag is anchored at
/// the two published operating points — lag 2 at (κ = 0.1, n = 10) and
/// lag 250 at (κ = 4, total n = 300) — and interpolated geometrically in
/// κ·n between them, clamped to [2, 250]. The full published schedule is
/// not available, so treat scheduled Gibbs lags as estimates.
pub fn lag_schedule(design: &CellDesign, method: Method) -> Result<usize> {
    match method {
        Method::Mh | Method::Rejection => Ok(1),
        Method::Gibbs => {
            if design.kappa_true > GIBBS_KAPPA_LIMIT {
                return Err(Error::GibbsInfeasible { kappa: design.kappa_true });
            }
            let x = design.kappa_true * design.total_n() as f64;
            let (x0, l0) = LAG_ANCHOR_LOW;
            let (x1, l1) = LAG_ANCHOR_HIGH;
            let gamma = (l1 / l0).ln() / (x1 / x0).ln();
            let lag = l0 * (x.max(x0) / x0).powf(gamma);
            Ok(lag.round().clamp(LAG_ANCHOR_LOW.1, LAG_ANCHOR_HIGH.1) as usize)
        }
    }
}

const STREAMS_PER_REP: u64 = 8;

/// RNG stream that generates replication `rep`'s dataset.
pub fn dataset_rng(seed: u64, rep: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64 * STREAMS_PER_REP);
    rng
}

/// RNG stream that drives the chain of method `method_index` (its position
/// in the design's method list) on replication `rep`.
pub fn chain_rng(seed: u64, rep: usize, method_index: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64 * STREAMS_PER_REP + 1 + method_index as u64);
    rng
}

/// Draws one replication's dataset: `n_per_group` draws from
/// VM(true_mean_j, κ_true) per group, deterministic in (seed, rep).
pub fn generate_dataset(design: &CellDesign, rep: usize) -> Result<GroupedAngles> {
    let mut rng = dataset_rng(design.seed, rep);
    let groups = design
        .true_means_deg
        .iter()
        .map(|&mean_deg| {
            let mu = Angle::from_degrees(mean_deg)?;
            (0..design.n_per_group)
                .map(|_| sample_von_mises(mu, design.kappa_true, &mut rng))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    GroupedAngles::new(groups)
}

/// One replication's outcome for one method.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Replication {
    pub summary: PosteriorSummary,
    /// Groups whose 95% CCI contained the true mean.
    pub mu_covered: usize,
    /// Whether the 95% HDI contained κ_true.
    pub kappa_covered: bool,
}

/// Aggregated statistics of one (cell, method) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodCellResult {
    pub method: Method,
    pub lag: usize,
    /// Lag came from the interpolated schedule, not an explicit override.
    pub lag_interpolated: bool,
    /// Circular average of per-replication posterior mean directions,
    /// degrees, per group.
    pub mu_mean_deg: Vec<f64>,
    /// Fraction of (replication, group) pairs whose CCI covered the truth.
    pub mu_coverage: f64,
    /// Arithmetic average of per-replication κ modes.
    pub kappa_mode: f64,
    pub kappa_coverage: f64,
    pub acceptance: f64,
    /// Mean computation time of one replication, seconds.
    pub mean_seconds: f64,
}

/// Everything a cell run produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellResult {
    pub design: CellDesign,
    pub methods: Vec<MethodCellResult>,
}

/// Runs every replication of a cell with every requested method and
/// aggregates. Replications run in parallel; any failure aborts the cell
/// with the failing (seed, replication) identified.
pub fn run_cell(design: &CellDesign) -> Result<CellResult> {
    design.validate()?;
    let truth: Vec<Angle> = design
        .true_means_deg
        .iter()
        .map(|&d| Angle::from_degrees(d))
        .collect::<Result<_>>()?;
    let prior = vec![ConjugatePrior::flat(); design.groups];

    let mut methods = Vec::with_capacity(design.methods.len());
    for (mi, &method) in design.methods.iter().enumerate() {
        let lag = design.lag_for(method)?;
        let config = SamplerConfig {
            retained: design.retained,
            lag,
            burn_in: None,
            kappa_start: 2.0,
            gibbs: GibbsConfig {
                mu_start: vec![Angle::ZERO],
                w_start: 4.0,
                z: 25,
            },
        };

        let reps: Vec<Replication> = (0..design.replications)
            .into_par_iter()
            .map(|rep| -> Result<Replication> {
                let data = generate_dataset(design, rep)?;
                let mut rng = chain_rng(design.seed, rep, mi);
                let trace = run_chain(method, &data, &prior, &config, &mut rng).map_err(
                    |e| {
                        Error::Config(format!(
                            "replication {rep} of cell seed {} failed: {e}",
                            design.seed
                        ))
                    },
                )?;
                let summary = summarize(&trace);
                let mu_covered = summary
                    .mu_cci
                    .iter()
                    .zip(&truth)
                    .filter(|(cci, &t)| cci.contains(t))
                    .count();
                let kappa_covered = summary.kappa_hdi95.contains(design.kappa_true);
                Ok(Replication { summary, mu_covered, kappa_covered })
            })
            .collect::<Result<_>>()?;

        methods.push(aggregate(design, method, lag, &reps));
    }
    Ok(CellResult { design: design.clone(), methods })
}

fn aggregate(
    design: &CellDesign,
    method: Method,
    lag: usize,
    reps: &[Replication],
) -> MethodCellResult {
    let r = reps.len() as f64;
    let mu_mean_deg = (0..design.groups)
        .map(|j| {
            let means: Vec<Angle> = reps.iter().map(|rep| rep.summary.mu_mean[j]).collect();
            sufficient_stats(&means)
                .theta_bar
                .map(Angle::degrees)
                .unwrap_or(f64::NAN)
        })
        .collect();
    let mu_coverage = reps.iter().map(|rep| rep.mu_covered).sum::<usize>() as f64
        / (r * design.groups as f64);
    let kappa_coverage =
        reps.iter().filter(|rep| rep.kappa_covered).count() as f64 / r;
    MethodCellResult {
        method,
        lag,
        lag_interpolated: !design.lags.contains_key(&method),
        mu_mean_deg,
        mu_coverage,
        kappa_mode: reps.iter().map(|rep| rep.summary.kappa_mode).sum::<f64>() / r,
        kappa_coverage,
        acceptance: reps.iter().map(|rep| rep.summary.acceptance).sum::<f64>() / r,
        mean_seconds: reps.iter().map(|rep| rep.summary.wall_seconds).sum::<f64>() / r,
    }
}

/// Grid of the Z-selection study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZSelectionGrid {
    pub sample_sizes: Vec<usize>,
    pub kappas: Vec<f64>,
    pub groups: Vec<usize>,
}

/// One grid point's outcome: the largest index ever selected as the
/// smallest candidate bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZSelectionRow {
    pub groups: usize,
    pub n_per_group: usize,
    pub kappa_true: f64,
    pub max_selected_k: usize,
}

/// Runs the Gibbs kernel over a grid of (n, κ, J) points, recording at each
/// iteration which candidate index produced the binding upper bound for κ,
/// and reports the maximum over `datasets` datasets × `iterations`
/// iterations per grid point. A cap large enough that the recorded maxima
/// sit well below it validates smaller working choices of Z.
///
/// The kernel runs regardless of κ_true here: mixing quality is irrelevant
/// to which index binds.
pub fn z_selection_study(
    grid: &ZSelectionGrid,
    datasets: usize,
    iterations: usize,
    z_cap: usize,
    seed: u64,
) -> Result<Vec<ZSelectionRow>> {
    if z_cap == 0 || datasets == 0 || iterations == 0 {
        return Err(Error::Config("z-cap, datasets and iterations must be >= 1".into()));
    }
    let mut rows = Vec::new();
    for &groups in &grid.groups {
        for &n in &grid.sample_sizes {
            for &kappa_true in &grid.kappas {
                let design = CellDesign {
                    groups,
                    n_per_group: n,
                    kappa_true,
                    true_means_deg: (0..groups).map(|j| 20.0 + 20.0 * j as f64).collect(),
                    replications: datasets,
                    methods: vec![],
                    lags: Default::default(),
                    seed: seed ^ (groups as u64) << 32 ^ (n as u64) << 16
                        ^ kappa_true.to_bits().rotate_left(17),
                    retained: iterations,
                };
                let max_k = (0..datasets)
                    .into_par_iter()
                    .map(|rep| -> Result<usize> {
                        let data = generate_dataset(&design, rep)?;
                        let post = posterior_params(
                            &data,
                            &vec![ConjugatePrior::flat(); groups],
                        )?;
                        let mut rng = chain_rng(design.seed, rep, 0);
                        let mut state = ChainState {
                            mu: vec![Angle::ZERO; groups],
                            kappa: 2.0,
                            w: 4.0,
                        };
                        for _ in 0..500 {
                            gibbs_iteration(&mut state, &post, z_cap, &mut rng)?;
                        }
                        let mut max_k = 1;
                        for _ in 0..iterations {
                            let k = gibbs_iteration(&mut state, &post, z_cap, &mut rng)?;
                            max_k = max_k.max(k);
                        }
                        Ok(max_k)
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .max()
                    .unwrap_or(1);
                rows.push(ZSelectionRow {
                    groups,
                    n_per_group: n,
                    kappa_true,
                    max_selected_k: max_k,
                });
            }
        }
    }
    Ok(rows)
}
