use nalgebra::{DMatrix, DVector};

use super::{best_block, check_measurements, real_problem, KernelOutput, RecoveryResult, Termination};
use crate::blockmat::{BlockDictionary, BlockSupport};
use crate::error::{Error, Result};
use crate::linalg::{CVec, Scalar};

/// Blocks count as orthonormal when `max |(D[l]^H D[l] - I)_ij|` is below this.
pub const BMP_ORTHONORMAL_TOL: f64 = 1e-9;

fn bmp_kernel<T: Scalar>(
    dict: &DMatrix<T>,
    d: usize,
    y: &DVector<T>,
    max_iters: usize,
    res_tol: f64,
) -> Result<KernelOutput<T>> {
    let y_norm = y.norm();
    let stop = res_tol * y_norm;
    let mut x = DVector::<T>::zeros(dict.ncols());
    let mut residual = y.clone();
    let mut norms = vec![y_norm];
    let mut order = Vec::new();

    let termination = loop {
        if *norms.last().unwrap() <= stop {
            break Termination::ResidualTol;
        }
        if order.len() == max_iters {
            break Termination::MaxIters;
        }
        let corr = dict.ad_mul(&residual);
        let pick = best_block(&corr, d, None).expect("dictionary has at least one block");
        let coef = corr.rows(pick * d, d).into_owned();
        // r <- r - D[i] D[i]^H r ; x[i] accumulates across repeat selections.
        residual -= dict.columns(pick * d, d) * &coef;
        for j in 0..d {
            x[pick * d + j] += coef[j];
        }
        order.push(pick);
        norms.push(residual.norm());
    };

    let mut distinct = order.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let iterations = order.len();
    Ok(KernelOutput {
        x,
        support: Some(BlockSupport::new(distinct)?),
        selection_order: order,
        residual_norms: norms,
        termination,
        iterations,
    })
}

/// Block matching pursuit for dictionaries with orthonormal blocks.
///
/// Uses the BOMP selection rule but removes only the projection onto the
/// chosen block, `r <- r - D[i] D[i]^H r`, without re-fitting earlier blocks.
/// Blocks may be selected more than once. Stops after `max_iters` steps or
/// once `||r|| <= res_tol * ||y||`.
pub fn bmp(dict: &BlockDictionary, y: &CVec, max_iters: usize, res_tol: f64) -> Result<RecoveryResult> {
    check_measurements(dict, y)?;
    if let Some((block, deviation)) = dict.orthonormality_violation(BMP_ORTHONORMAL_TOL) {
        return Err(Error::NonOrthonormalBlock { block, deviation });
    }
    let d = dict.block_len();
    match real_problem(dict, y) {
        Some((dr, yr)) => bmp_kernel(&dr, d, &yr, max_iters, res_tol)?.into_result(d, None),
        None => bmp_kernel(dict.entries(), d, y, max_iters, res_tol)?.into_result(d, None),
    }
}

/// Matching pursuit: [`bmp`] on the `d = 1` view of `dict`.
pub fn mp(dict: &BlockDictionary, y: &CVec, max_iters: usize, res_tol: f64) -> Result<RecoveryResult> {
    bmp(&dict.unblocked(), y, max_iters, res_tol)
}
