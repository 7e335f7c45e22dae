//! Monte Carlo success rates of OMP, BOMP and BOMP on orthonormalized blocks.
//! Prints CSV. Pass a trial count as the first argument (default 50).
//!
//! Run with `cargo run --release --example greedy_success_curve -- 200`.

use blocksparse::harness::{run_montecarlo, ExperimentConfig};
use blocksparse::Result;

fn main() -> Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let config = ExperimentConfig::greedy_comparison(trials);
    let curve = run_montecarlo(&config)?;
    print!("{}", curve.to_csv());
    for a in curve.anomalies() {
        eprintln!("non-monotone: {} k={}..{} ({:.2} -> {:.2})", a.solver, a.k_low, a.k_high, a.rate_low, a.rate_high);
    }
    Ok(())
}
