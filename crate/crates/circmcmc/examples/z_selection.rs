//! How large must Z be? The Gibbs κ update draws Z candidate upper bounds
//! and keeps the smallest; a Z below the largest index that ever wins would
//! bias the sampler. This study runs the kernel with a generous cap and
//! records the largest winning index per (n, κ, J) point.
//!
//! Run with: cargo run --release --example z_selection

use circmcmc::simulation::{z_selection_study, ZSelectionGrid};

fn main() -> circmcmc::Result<()> {
    let grid = ZSelectionGrid {
        sample_sizes: vec![10, 30, 100],
        kappas: vec![0.1, 1.0, 4.0, 32.0],
        groups: vec![1, 3],
    };
    // Lighter than the full study (10 datasets x 2000 iterations); bump
    // these for publication-grade numbers.
    let rows = z_selection_study(&grid, 10, 2000, 40, 5)?;

    println!("{:>3} {:>5} {:>7} {:>7}", "J", "n", "kappa", "max k");
    for r in &rows {
        println!(
            "{:>3} {:>5} {:>7} {:>7}",
            r.groups, r.n_per_group, r.kappa_true, r.max_selected_k
        );
    }
    println!("\na working Z needs a few indices of headroom above the largest max k");
    Ok(())
}
