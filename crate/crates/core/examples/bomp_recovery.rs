//! BOMP and OMP on a block-sparse signal, with the exact-recovery certificate.
//!
//! Run with `cargo run --example bomp_recovery`.

use blocksparse::coherence::exact_recovery_certificate;
use blocksparse::dictionaries::gaussian_dictionary;
use blocksparse::recovery::{bomp, omp, DEFAULT_RES_TOL};
use blocksparse::{BlockSupport, BlockVector, Result};

fn main() -> Result<()> {
    let (l, n, d) = (40, 400, 4);
    let dict = gaussian_dictionary(l, n, d, 42)?;
    let support = BlockSupport::new(vec![3, 17, 58])?;
    let mut x = BlockVector::zeros(n, d)?;
    for (j, b) in support.iter().enumerate() {
        for (i, v) in x.block_mut(b).iter_mut().enumerate() {
            v.re = (j as f64 + 1.0) * if i % 2 == 0 { 1.0 } else { -0.7 };
        }
    }
    let y = dict.apply(&x)?;
    let cert = exact_recovery_certificate(&dict, &support)?;
    println!("certificate rho_c = {:.3} (holds: {})", cert.value, cert.holds);

    let b = bomp(&dict, &y, support.len(), DEFAULT_RES_TOL)?;
    let err = (b.x_hat.entries() - x.entries()).norm() / x.entries().norm();
    println!("bomp: support {} order {:?} rel. error {err:.2e} ({})", b.support, b.selection_order, b.termination);

    let o = omp(&dict, &y, support.len() * d, DEFAULT_RES_TOL)?;
    let err = (o.x_hat.entries() - x.entries()).norm() / x.entries().norm();
    println!("omp:  {} atoms selected, rel. error {err:.2e} ({})", o.selection_order.len(), o.termination);
    Ok(())
}
