//! The Dirac comb meets the block uncertainty relation with equality.
//!
//! Run with `cargo run --example uncertainty_comb`.

use blocksparse::analysis::{uncertainty_lower_bound, verify_uncertainty};
use blocksparse::dictionaries::{dirac_comb_signal, random_unitary, spike_kron_fourier};
use blocksparse::{CVec, Complex64, Result};

fn main() -> Result<()> {
    for (r, d) in [(4, 1), (9, 2), (16, 3), (25, 2)] {
        let (phi, psi, _) = spike_kron_fourier(r, d, &random_unitary(d, r as u64))?;
        let bound = uncertainty_lower_bound(&phi, &psi)?;
        let c = CVec::from_fn(d, |i, _| Complex64::new(1.0 + i as f64, -0.5));
        let x = dirac_comb_signal(r, d, &c)?;
        let check = verify_uncertainty(&phi, &psi, x.entries(), 1e-9)?;
        println!(
            "R={r:<3} d={d}  A={} B={}  sqrt(AB) >= {:.3}, A+B >= {:.3}  equality={}",
            check.a, check.b, bound.geometric, bound.additive, check.equality
        );
    }
    Ok(())
}
