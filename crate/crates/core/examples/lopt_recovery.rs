//! Mixed l2/l1 minimization against its unblocked counterpart.
//!
//! Run with `cargo run --example lopt_recovery`.

use blocksparse::dictionaries::gaussian_dictionary;
use blocksparse::recovery::{lopt, LoptParams};
use blocksparse::{BlockVector, Result};

fn main() -> Result<()> {
    let (l, n, d) = (40, 400, 4);
    let dict = gaussian_dictionary(l, n, d, 3)?;
    let mut x = BlockVector::zeros(n, d)?;
    for (j, b) in [5, 40, 77].into_iter().enumerate() {
        for (i, v) in x.block_mut(b).iter_mut().enumerate() {
            v.re = 1.0 + j as f64 - 0.3 * i as f64;
        }
    }
    let y = dict.apply(&x)?;
    let params = LoptParams::default();
    for (name, view) in [("lopt", dict.clone()), ("bp", dict.unblocked())] {
        let res = lopt(&view, &y, &params)?;
        let err = (res.x_hat.entries() - x.entries()).norm() / x.entries().norm();
        println!("{name:<4} iterations={:<5} {:<10} rel. error {err:.2e}", res.iterations, res.termination.as_str());
    }
    Ok(())
}
