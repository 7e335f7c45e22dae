use nalgebra::{DMatrix, DVector};

use super::{best_block, check_measurements, real_problem, KernelOutput, RecoveryResult, Termination};
use crate::blockmat::{scatter_blocks, BlockDictionary, BlockSupport};
use crate::error::{Error, Result};
use crate::linalg::{CVec, IncrementalQr, Scalar};

/// A new column whose component outside the current span is below this
/// fraction of its norm makes the selection rank deficient.
const SELECTION_RANK_TOL: f64 = 1e-10;

fn bomp_kernel<T: Scalar>(
    dict: &DMatrix<T>,
    d: usize,
    y: &DVector<T>,
    k_max: usize,
    res_tol: f64,
) -> Result<KernelOutput<T>> {
    let m = dict.ncols() / d;
    let y_norm = y.norm();
    let stop = res_tol * y_norm;
    let mut qr = IncrementalQr::new(y, SELECTION_RANK_TOL);
    let mut chosen = vec![false; m];
    let mut order = Vec::with_capacity(k_max);
    let mut residual = y.clone();
    let mut norms = vec![y_norm];

    let termination = loop {
        if *norms.last().unwrap() <= stop {
            break Termination::ResidualTol;
        }
        if order.len() == k_max || order.len() == m {
            break Termination::SupportFull;
        }
        let corr = dict.ad_mul(&residual);
        let pick = best_block(&corr, d, Some(&chosen)).expect("an unselected block remains");
        qr.push_columns(&dict.columns(pick * d, d).into_owned()).map_err(|_| {
            Error::RankDeficient(format!(
                "selecting block {pick} after {:?} makes the sub-dictionary rank deficient",
                order
            ))
        })?;
        chosen[pick] = true;
        order.push(pick);
        residual = qr.residual();
        norms.push(residual.norm());
    };

    let x = scatter_blocks(dict.ncols(), d, &order, &qr.coefficients());
    let iterations = order.len();
    Ok(KernelOutput {
        x,
        support: Some(BlockSupport::new(order.clone())?),
        selection_order: order,
        residual_norms: norms,
        termination,
        iterations,
    })
}

/// Block orthogonal matching pursuit.
///
/// Each step picks the block maximizing `||D[i]^H r||_2` among blocks not yet
/// chosen (lowest index on exact ties), re-fits all chosen blocks jointly by
/// least squares and updates the residual. Stops once
/// `||r|| <= res_tol * ||y||` or `k_max` blocks have been chosen.
pub fn bomp(dict: &BlockDictionary, y: &CVec, k_max: usize, res_tol: f64) -> Result<RecoveryResult> {
    check_measurements(dict, y)?;
    let d = dict.block_len();
    if k_max * d > dict.rows() {
        return Err(Error::InvalidArgument(format!(
            "k_max * d = {} exceeds the number of measurements L = {}",
            k_max * d,
            dict.rows()
        )));
    }
    match real_problem(dict, y) {
        Some((dr, yr)) => bomp_kernel(&dr, d, &yr, k_max, res_tol)?.into_result(d, None),
        None => bomp_kernel(dict.entries(), d, y, k_max, res_tol)?.into_result(d, None),
    }
}

/// Orthogonal matching pursuit: [`bomp`] on the `d = 1` view of `dict`.
pub fn omp(dict: &BlockDictionary, y: &CVec, k_max: usize, res_tol: f64) -> Result<RecoveryResult> {
    bomp(&dict.unblocked(), y, k_max, res_tol)
}
