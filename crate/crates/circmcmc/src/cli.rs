//! File formats and command implementations behind the `circmcmc` binary.
//!
//! Datasets are two-column CSV (`angle,group`); angles are degrees by
//! default and radians on request, groups are labels mapped to j = 1…J in
//! first-appearance order. Fits write a trace CSV
//! (`iter,mu_1,…,mu_J,kappa`, angles in degrees with six decimals) and a
//! summary JSON that echoes the full configuration including the seed, so
//! every output can be regenerated exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::angle::{Angle, GroupedAngles};
use crate::error::{Error, Result};
use crate::inference::{summarize, PosteriorSummary};
use crate::posterior::ConjugatePrior;
use crate::samplers::{run_chain, GibbsConfig, Method, SamplerConfig, Trace};
use crate::simulation::{run_cell, z_selection_study, CellDesign, CellResult, ZSelectionGrid};

/// External angle unit. Internally everything is radians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Degrees,
    Radians,
}

impl AngleUnit {
    fn to_angle(self, value: f64) -> Result<Angle> {
        match self {
            AngleUnit::Degrees => Angle::from_degrees(value),
            AngleUnit::Radians => Angle::from_radians(value),
        }
    }

    fn value_of(self, a: Angle) -> f64 {
        match self {
            AngleUnit::Degrees => a.degrees(),
            AngleUnit::Radians => a.radians(),
        }
    }
}

/// A parsed dataset: the grouped angles plus the group labels in j-order.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub angles: GroupedAngles,
    pub labels: Vec<String>,
}

/// Parses an `angle,group` CSV. Angles are wrapped into [0, 2π); group
/// labels become indices in first-appearance order.
pub fn parse_dataset(path: &Path, unit: AngleUnit) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    parse_dataset_str(&text, unit)
}

pub fn parse_dataset_str(text: &str, unit: AngleUnit) -> Result<Dataset> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let header = header.trim_start_matches('\u{feff}').trim();
    if !header.eq_ignore_ascii_case("angle,group") {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header 'angle,group', found '{header}'"),
        });
    }
    let mut labels: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut groups: Vec<Vec<Angle>> = Vec::new();
    let mut rows = 0usize;
    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (angle_str, label) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected 'angle,group', found '{line}'"),
        })?;
        let value: f64 = angle_str.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("'{}' is not a number", angle_str.trim()),
        })?;
        let angle = unit.to_angle(value).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let label = label.trim();
        let j = *index.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[j].push(angle);
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "no data rows".into(),
        });
    }
    Ok(Dataset { angles: GroupedAngles::new(groups)?, labels })
}

/// Writes a dataset back to `angle,group` CSV at full float precision.
pub fn write_dataset(path: &Path, data: &Dataset, unit: AngleUnit) -> Result<()> {
    let mut out = String::from("angle,group\n");
    for (angles, label) in data.angles.groups().iter().zip(&data.labels) {
        for &a in angles {
            writeln!(out, "{},{label}", unit.value_of(a)).expect("string write");
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Per-group prior settings in external units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriorSpec {
    pub mu0_deg: f64,
    pub r0: f64,
    pub c: f64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec { mu0_deg: 0.0, r0: 0.0, c: 0.0 }
    }
}

impl PriorSpec {
    fn build(&self) -> Result<ConjugatePrior> {
        ConjugatePrior::new(Angle::from_degrees(self.mu0_deg)?, self.r0, self.c)
    }
}

/// Full configuration of a `fit` run; echoed verbatim into the summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    pub input: PathBuf,
    pub method: Method,
    pub iterations: usize,
    pub lag: usize,
    /// `None` resolves to 500·lag.
    pub burn_in: Option<usize>,
    pub seed: u64,
    pub unit: AngleUnit,
    /// One per group, or a single entry broadcast, or empty for flat.
    pub prior: Vec<PriorSpec>,
    pub kappa_start: f64,
    pub w_start: f64,
    pub z: usize,
    pub trace_out: PathBuf,
    pub summary_out: PathBuf,
}

#[derive(Debug, Serialize)]
struct GroupSummaryJson {
    label: String,
    n: usize,
    mean_direction_deg: f64,
    cci95_deg: [f64; 2],
}

#[derive(Debug, Serialize)]
struct KappaSummaryJson {
    mode: f64,
    hdi95: [f64; 2],
}

#[derive(Debug, Serialize)]
struct FitSummaryJson<'a> {
    config: &'a FitConfig,
    resolved_burn_in: usize,
    groups: Vec<GroupSummaryJson>,
    kappa: KappaSummaryJson,
    acceptance_rate: f64,
    wall_seconds: f64,
}

/// Removes the listed files when dropped unless disarmed; keeps failed runs
/// from leaving partial outputs behind.
struct Cleanup<'a> {
    paths: Vec<&'a Path>,
    armed: bool,
}

impl Drop for Cleanup<'_> {
    fn drop(&mut self) {
        if self.armed {
            for p in &self.paths {
                let _ = fs::remove_file(p);
            }
        }
    }
}

/// Runs one fit end to end: parse, sample, summarise, write trace CSV and
/// summary JSON.
pub fn fit_command(config: &FitConfig) -> Result<PosteriorSummary> {
    let dataset = parse_dataset(&config.input, config.unit)?;
    let j = dataset.angles.n_groups();
    let prior = resolve_priors(&config.prior, j)?;

    let sampler = SamplerConfig {
        retained: config.iterations,
        lag: config.lag,
        burn_in: config.burn_in,
        kappa_start: config.kappa_start,
        gibbs: GibbsConfig {
            mu_start: vec![Angle::ZERO],
            w_start: config.w_start,
            z: config.z,
        },
    };
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let trace = run_chain(config.method, &dataset.angles, &prior, &sampler, &mut rng)?;
    let summary = summarize(&trace);

    let mut cleanup = Cleanup {
        paths: vec![&config.trace_out, &config.summary_out],
        armed: true,
    };
    write_trace_csv(&config.trace_out, &trace)?;
    let groups = dataset
        .labels
        .iter()
        .enumerate()
        .map(|(gi, label)| GroupSummaryJson {
            label: label.clone(),
            n: dataset.angles.group_size(gi),
            mean_direction_deg: summary.mu_mean[gi].degrees(),
            cci95_deg: [summary.mu_cci[gi].lower.degrees(), summary.mu_cci[gi].upper.degrees()],
        })
        .collect();
    let json = FitSummaryJson {
        config,
        resolved_burn_in: sampler.effective_burn_in(),
        groups,
        kappa: KappaSummaryJson {
            mode: summary.kappa_mode,
            hdi95: [summary.kappa_hdi95.lower, summary.kappa_hdi95.upper],
        },
        acceptance_rate: summary.acceptance,
        wall_seconds: summary.wall_seconds,
    };
    fs::write(&config.summary_out, serde_json::to_string_pretty(&json)?)?;
    cleanup.armed = false;
    Ok(summary)
}

fn resolve_priors(spec: &[PriorSpec], j: usize) -> Result<Vec<ConjugatePrior>> {
    match spec.len() {
        0 => Ok(vec![ConjugatePrior::flat(); j]),
        1 => Ok(vec![spec[0].build()?; j]),
        n if n == j => spec.iter().map(PriorSpec::build).collect(),
        n => Err(Error::Config(format!("{n} prior entries for {j} groups"))),
    }
}

/// Trace CSV: `iter,mu_1,…,mu_J,kappa`, angles in degrees with six
/// decimals, one row per retained draw.
pub fn write_trace_csv(path: &Path, trace: &Trace) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    let j = trace.n_groups();
    let mut header = String::from("iter");
    for g in 1..=j {
        write!(header, ",mu_{g}").expect("string write");
    }
    header.push_str(",kappa");
    writeln!(w, "{header}")?;
    for i in 0..trace.retained() {
        write!(w, "{}", i + 1)?;
        for col in &trace.mu {
            write!(w, ",{:.6}", col[i].degrees())?;
        }
        writeln!(w, ",{:.6}", trace.kappa[i])?;
    }
    w.flush()?;
    Ok(())
}

/// A simulation design file: one or more cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DesignFile {
    Cells { cells: Vec<CellDesign> },
    Bare(Vec<CellDesign>),
}

impl DesignFile {
    pub fn cells(self) -> Vec<CellDesign> {
        match self {
            DesignFile::Cells { cells } => cells,
            DesignFile::Bare(cells) => cells,
        }
    }
}

#[derive(Debug, Serialize)]
struct SimulateOutputJson {
    design_file: PathBuf,
    workers: usize,
    cells: Vec<CellResult>,
}

/// Runs every cell of a design file and writes `results.csv` plus
/// `results.json` into the output directory.
pub fn simulate_command(
    design_path: &Path,
    output_dir: &Path,
    workers: Option<usize>,
) -> Result<Vec<CellResult>> {
    let designs: DesignFile = serde_json::from_str(&fs::read_to_string(design_path)?)?;
    let cells = designs.cells();
    if cells.is_empty() {
        return Err(Error::Config("design file lists no cells".into()));
    }
    for c in &cells {
        c.validate()?;
    }
    let threads = workers.unwrap_or_else(num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let results: Vec<CellResult> =
        pool.install(|| cells.iter().map(run_cell).collect::<Result<_>>())?;

    fs::create_dir_all(output_dir)?;
    fs::write(
        output_dir.join("results.csv"),
        cell_results_csv(&results),
    )?;
    let json = SimulateOutputJson {
        design_file: design_path.to_path_buf(),
        workers: threads,
        cells: results.clone(),
    };
    fs::write(
        output_dir.join("results.json"),
        serde_json::to_string_pretty(&json)?,
    )?;
    Ok(results)
}

fn num_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Long-format table: one row per (cell, method), mean-direction columns up
/// to the widest cell.
pub fn cell_results_csv(results: &[CellResult]) -> String {
    let max_j = results.iter().map(|r| r.design.groups).max().unwrap_or(1);
    let mut out = String::from("cell,groups,n_per_group,kappa_true,replications,retained,seed,method,lag,lag_interpolated");
    for g in 1..=max_j {
        write!(out, ",mu_mean_{g}_deg").expect("string write");
    }
    out.push_str(",mu_coverage,kappa_mode,kappa_coverage,acceptance,mct_seconds\n");
    for (ci, cell) in results.iter().enumerate() {
        for m in &cell.methods {
            write!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                ci,
                cell.design.groups,
                cell.design.n_per_group,
                cell.design.kappa_true,
                cell.design.replications,
                cell.design.retained,
                cell.design.seed,
                m.method,
                m.lag,
                m.lag_interpolated
            )
            .expect("string write");
            for g in 0..max_j {
                match m.mu_mean_deg.get(g) {
                    Some(v) => write!(out, ",{v:.4}").expect("string write"),
                    None => out.push(','),
                }
            }
            writeln!(
                out,
                ",{:.4},{:.4},{:.4},{:.4},{:.6}",
                m.mu_coverage, m.kappa_mode, m.kappa_coverage, m.acceptance, m.mean_seconds
            )
            .expect("string write");
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct ZSelectOutputJson {
    grid_file: PathBuf,
    z_cap: usize,
    datasets: usize,
    iterations: usize,
    seed: u64,
    rows: Vec<crate::simulation::ZSelectionRow>,
}

/// Runs the Z-selection study from a grid file; writes CSV (and a JSON
/// sidecar) to `output`, or prints the CSV when no path is given.
pub fn zselect_command(
    grid_path: &Path,
    z_cap: usize,
    datasets: usize,
    iterations: usize,
    seed: u64,
    output: Option<&Path>,
) -> Result<()> {
    let grid: ZSelectionGrid = serde_json::from_str(&fs::read_to_string(grid_path)?)?;
    let rows = z_selection_study(&grid, datasets, iterations, z_cap, seed)?;
    let mut csv = String::from("groups,n_per_group,kappa_true,max_selected_k\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{}", r.groups, r.n_per_group, r.kappa_true, r.max_selected_k)
            .expect("string write");
    }
    match output {
        Some(path) => {
            fs::write(path, &csv)?;
            let sidecar = ZSelectOutputJson {
                grid_file: grid_path.to_path_buf(),
                z_cap,
                datasets,
                iterations,
                seed,
                rows,
            };
            fs::write(
                path.with_extension("json"),
                serde_json::to_string_pretty(&sidecar)?,
            )?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}
