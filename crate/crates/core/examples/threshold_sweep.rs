//! Block versus conventional thresholds of the spike / Kronecker-Fourier pair
//! as the block length grows.
//!
//! Run with `cargo run --example threshold_sweep`.

use blocksparse::harness::{sweep_thresholds, sweep_to_csv};
use blocksparse::Result;

fn main() -> Result<()> {
    print!("{}", sweep_to_csv(&sweep_thresholds(10, 1..=12, 100, 0)?));
    Ok(())
}
