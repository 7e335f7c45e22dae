//! Coherence metrics and recovery thresholds of a few dictionaries.
//!
//! Run with `cargo run --example coherence_audit`.

use blocksparse::analysis::ThresholdReport;
use blocksparse::coherence::CoherenceReport;
use blocksparse::dictionaries::{gaussian_dictionary, orthogonalize_blocks, random_unitary, spike_kron_fourier};
use blocksparse::harness::AuditReport;
use blocksparse::{BlockDictionary, Result};

fn show(name: &str, dict: &BlockDictionary) -> Result<()> {
    let d = dict.block_len();
    let report = CoherenceReport::compute(dict)?;
    let t = ThresholdReport::from_coherence(&report, d)?;
    println!(
        "{name:<28} mu={:.4} mu_B={:.4} nu={:.4}  block kd<{:.2}  conventional kd<{:.2}",
        report.mu, report.mu_block, report.sub_coherence, t.block_threshold_kd, t.conventional_threshold_kd
    );
    Ok(())
}

fn main() -> Result<()> {
    let (_, _, pair) = spike_kron_fourier(16, 4, &random_unitary(4, 1))?;
    show("[I, F (x) U], R=16, d=4", &pair)?;
    let g = gaussian_dictionary(40, 400, 4, 7)?;
    show("Gaussian 40x400, d=4", &g)?;
    show("  with orthonormal blocks", &orthogonalize_blocks(&g)?.a)?;

    println!("\nfull audit of the extremal pair:\n{}", AuditReport::compute(&pair)?);
    Ok(())
}
