//! Per-block orthonormalization `D = A W` and its effect on block coherence.
//!
//! Run with `cargo run --example orthogonalize`.

use blocksparse::analysis::{orthogonalization_gain_min_d, welch_coherence_bound};
use blocksparse::coherence::block_coherence;
use blocksparse::dictionaries::{gaussian_dictionary, orthogonalize_blocks};
use blocksparse::recovery::bomp;
use blocksparse::{BlockVector, Result};

fn main() -> Result<()> {
    let (l, n, d) = (40, 400, 4);
    let dict = gaussian_dictionary(l, n, d, 11)?;
    let pair = orthogonalize_blocks(&dict)?;
    let (m, r) = (n / d, l / d);
    println!("mu_B(D) = {:.4}", block_coherence(&dict)?);
    println!("mu_B(A) = {:.4}", block_coherence(&pair.a)?);
    println!("Welch bound for orthonormal blocks = {:.4}", welch_coherence_bound(m, r, d)?);
    println!("orthogonalization helps the threshold once d > {:.2}", orthogonalization_gain_min_d(m, r)?);

    let mut x = BlockVector::zeros(n, d)?;
    for b in [2, 30, 64] {
        x.block_mut(b).iter_mut().for_each(|v| v.re = 1.0);
    }
    let y = dict.apply(&x)?;
    let c = bomp(&pair.a, &y, 3, 1e-10)?;
    let x_hat = pair.apply_w_inv(&c.x_hat)?;
    let err = (x_hat.entries() - x.entries()).norm() / x.entries().norm();
    println!("bomp on A, mapped back through W^-1: support {} rel. error {err:.2e}", c.support);
    Ok(())
}
