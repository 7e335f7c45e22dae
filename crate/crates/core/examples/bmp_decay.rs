//! Residual decay of block matching pursuit against the geometric bound.
//!
//! Run with `cargo run --example bmp_decay`.

use blocksparse::analysis::bmp_decay_factor;
use blocksparse::coherence::block_coherence;
use blocksparse::dictionaries::{random_unitary, spike_kron_fourier};
use blocksparse::recovery::bmp;
use blocksparse::{BlockVector, Result};

fn main() -> Result<()> {
    let (r, d, k) = (64, 2, 2);
    let (_, _, dict) = spike_kron_fourier(r, d, &random_unitary(d, 9))?;
    let mu_b = block_coherence(&dict)?;
    let beta = bmp_decay_factor(k, d, mu_b)?;
    let mut x = BlockVector::zeros(2 * r * d, d)?;
    x.block_mut(3)[0].re = 1.0;
    x.block_mut(3)[1].im = -2.0;
    x.block_mut(70)[1].re = 0.5;
    let y = dict.apply(&x)?;
    let res = bmp(&dict, &y, 12, 1e-12)?;
    println!("mu_B = {mu_b:.4}, decay factor beta = {beta:.4}");
    let r0 = res.residual_norms[0];
    for (l, rn) in res.residual_norms.iter().enumerate() {
        let bound = r0 * beta.powf(l as f64 / 2.0);
        let pick = if l == 0 { "-".to_string() } else { res.selection_order[l - 1].to_string() };
        println!("step {l:>2}  block {pick:>3}  ||r|| = {rn:.3e}  bound {bound:.3e}");
    }
    Ok(())
}
