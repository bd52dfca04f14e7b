//! Run one cell of the comparative study at reduced scale: 100 replications
//! of (J = 1, n = 100, κ = 4), analysed with MH and rejection.
//!
//! Columns follow the study layout: average posterior mean direction,
//! coverage of the 95% CCI, average κ mode, coverage of the 95% HDI,
//! acceptance rate, and mean computation time per replication.
//!
//! Run with: cargo run --release --example simulation_cell

use circmcmc::simulation::{run_cell, CellDesign};
use circmcmc::Method;

fn main() -> circmcmc::Result<()> {
    let design = CellDesign::study_cell(
        1,
        100,
        4.0,
        vec![Method::Mh, Method::Rejection],
        100,
        2026,
    );
    let cell = run_cell(&design)?;

    println!(
        "cell: J={}, n={}, kappa_true={}, {} replications",
        design.groups, design.n_per_group, design.kappa_true, design.replications
    );
    println!(
        "{:<10} {:>8} {:>9} {:>8} {:>9} {:>6} {:>8}",
        "method", "mu mean", "mu cover", "k mode", "k cover", "acc", "mct (s)"
    );
    for m in &cell.methods {
        println!(
            "{:<10} {:>8.2} {:>9.3} {:>8.2} {:>9.3} {:>6.2} {:>8.4}",
            m.method.name(),
            m.mu_mean_deg[0],
            m.mu_coverage,
            m.kappa_mode,
            m.kappa_coverage,
            m.acceptance,
            m.mean_seconds
        );
    }
    Ok(())
}
