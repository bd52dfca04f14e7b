//! Command-line front end: `fit` a dataset, `simulate` a design file, or
//! run the `zselect` study. All heavy lifting lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use circmcmc::cli::{
    fit_command, simulate_command, zselect_command, AngleUnit, FitConfig, PriorSpec,
};
use circmcmc::Method;

#[derive(Parser)]
#[command(name = "circmcmc", version, about = "Bayesian von Mises inference for grouped circular data")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gibbs,
    Mh,
    Rejection,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Gibbs => Method::Gibbs,
            MethodArg::Mh => Method::Mh,
            MethodArg::Rejection => Method::Rejection,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Degrees,
    Radians,
}

impl From<UnitArg> for AngleUnit {
    fn from(u: UnitArg) -> AngleUnit {
        match u {
            UnitArg::Degrees => AngleUnit::Degrees,
            UnitArg::Radians => AngleUnit::Radians,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit the model to a CSV dataset and write a trace and a summary.
    Fit {
        /// Input CSV with header `angle,group`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Retained draws Q.
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
        /// Keep every lag-th iteration.
        #[arg(long, default_value_t = 1)]
        lag: usize,
        /// Discarded iterations; defaults to 500·lag.
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Unit of the input angles.
        #[arg(long, value_enum, default_value = "degrees")]
        unit: UnitArg,
        /// Prior mean directions in degrees, one per group (repeat the flag).
        #[arg(long = "prior-mu0", value_name = "DEG")]
        prior_mu0: Vec<f64>,
        /// Prior resultant lengths, one per group.
        #[arg(long = "prior-r0", value_name = "R0")]
        prior_r0: Vec<f64>,
        /// Prior observation counts, one per group.
        #[arg(long = "prior-c", value_name = "C")]
        prior_c: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        kappa_start: f64,
        /// Gibbs starting value for the latent scale w.
        #[arg(long, default_value_t = 4.0)]
        w_start: f64,
        /// Gibbs candidate-bound count Z.
        #[arg(long, default_value_t = 25)]
        z: usize,
        /// Trace CSV path.
        #[arg(long, default_value = "trace.csv")]
        trace_out: PathBuf,
        /// Summary JSON path.
        #[arg(long, default_value = "summary.json")]
        summary_out: PathBuf,
    },
    /// Run every cell of a simulation design file.
    Simulate {
        /// JSON design: a list of cells or {"cells": [...]}.
        #[arg(long)]
        design: PathBuf,
        /// Output directory for results.csv and results.json.
        #[arg(long)]
        output: PathBuf,
        /// Worker threads; defaults to available parallelism.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Record which candidate index binds the Gibbs κ update over a grid.
    Zselect {
        /// JSON grid: {"sample_sizes": [...], "kappas": [...], "groups": [...]}.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 40)]
        z_cap: usize,
        #[arg(long, default_value_t = 100)]
        datasets: usize,
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// CSV output path; prints to stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn run(args: Args) -> circmcmc::Result<()> {
    match args.command {
        Command::Fit {
            input,
            method,
            iterations,
            lag,
            burn_in,
            seed,
            unit,
            prior_mu0,
            prior_r0,
            prior_c,
            kappa_start,
            w_start,
            z,
            trace_out,
            summary_out,
        } => {
            let prior = build_priors(&prior_mu0, &prior_r0, &prior_c)?;
            let config = FitConfig {
                input,
                method: method.into(),
                iterations,
                lag,
                burn_in,
                seed,
                unit: unit.into(),
                prior,
                kappa_start,
                w_start,
                z,
                trace_out,
                summary_out,
            };
            let summary = fit_command(&config)?;
            eprintln!(
                "kappa mode {:.4}, hdi95 [{:.4}, {:.4}], acceptance {:.3}, {:.2}s",
                summary.kappa_mode,
                summary.kappa_hdi95.lower,
                summary.kappa_hdi95.upper,
                summary.acceptance,
                summary.wall_seconds
            );
            Ok(())
        }
        Command::Simulate { design, output, workers } => {
            let results = simulate_command(&design, &output, workers)?;
            eprintln!("{} cells written to {}", results.len(), output.display());
            Ok(())
        }
        Command::Zselect { grid, z_cap, datasets, iterations, seed, output } => {
            zselect_command(&grid, z_cap, datasets, iterations, seed, output.as_deref())
        }
    }
}

fn build_priors(mu0: &[f64], r0: &[f64], c: &[f64]) -> circmcmc::Result<Vec<PriorSpec>> {
    let n = mu0.len().max(r0.len()).max(c.len());
    if n == 0 {
        return Ok(Vec::new());
    }
    if (!mu0.is_empty() && mu0.len() != n)
        || (!r0.is_empty() && r0.len() != n)
        || (!c.is_empty() && c.len() != n)
    {
        return Err(circmcmc::Error::Config(
            "prior flags must be repeated the same number of times".into(),
        ));
    }
    Ok((0..n)
        .map(|i| PriorSpec {
            mu0_deg: mu0.get(i).copied().unwrap_or(0.0),
            r0: r0.get(i).copied().unwrap_or(0.0),
            c: c.get(i).copied().unwrap_or(0.0),
        })
        .collect())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
