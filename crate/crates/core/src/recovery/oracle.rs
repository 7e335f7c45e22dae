use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use super::lopt::objective;
use super::{check_measurements, real_problem, KernelOutput, RecoveryResult, Termination};
use crate::blockmat::{scatter_blocks, BlockDictionary, BlockSupport};
use crate::error::{Error, Result};
use crate::linalg::{self, CVec, Scalar};

/// Largest number of candidate supports the oracle will enumerate.
pub const ORACLE_SUPPORT_LIMIT: u128 = 1_000_000;
/// Residuals closer than this are treated as tied.
const RESIDUAL_TIE_TOL: f64 = 1e-10;

/// `n choose k`, saturating at `u128::MAX`.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn block_columns<T: Scalar>(dict: &DMatrix<T>, d: usize, blocks: &[usize]) -> DMatrix<T> {
    let mut out = DMatrix::<T>::zeros(dict.nrows(), blocks.len() * d);
    for (j, &b) in blocks.iter().enumerate() {
        out.columns_mut(j * d, d).copy_from(&dict.columns(b * d, d));
    }
    out
}

fn fit<T: Scalar>(sub: &DMatrix<T>, y: &DVector<T>) -> (DVector<T>, f64) {
    if sub.ncols() == 0 {
        return (DVector::zeros(0), y.norm());
    }
    match linalg::least_squares(sub, y) {
        Ok((c, r)) => (c, r.norm()),
        Err(_) => {
            let c = linalg::pinv(sub) * y;
            let r = (y - sub * &c).norm();
            (c, r)
        }
    }
}

fn oracle_kernel<T: Scalar>(dict: &DMatrix<T>, d: usize, y: &DVector<T>, k: usize) -> Result<KernelOutput<T>> {
    let m = dict.ncols() / d;
    // (residual, objective, blocks, coefficients)
    let mut best: Option<(f64, f64, Vec<usize>, DVector<T>)> = None;
    for blocks in (0..m).combinations(k) {
        let (coef, res) = fit(&block_columns(dict, d, &blocks), y);
        let obj = objective(coef.as_slice(), d);
        let better = match &best {
            None => true,
            Some((r0, o0, _, _)) => {
                if res < r0 - RESIDUAL_TIE_TOL {
                    true
                } else if res <= r0 + RESIDUAL_TIE_TOL {
                    // Enumeration is lexicographic, so an equal objective keeps the earlier support.
                    obj < *o0
                } else {
                    false
                }
            }
        };
        if better {
            best = Some((res, obj, blocks, coef));
        }
    }
    let (res, _, blocks, coef) = best.expect("at least one support is enumerated");
    Ok(KernelOutput {
        x: scatter_blocks(dict.ncols(), d, &blocks, &coef),
        support: Some(BlockSupport::new(blocks.clone())?),
        selection_order: blocks,
        residual_norms: vec![y.norm(), res],
        termination: Termination::Converged,
        iterations: 1,
    })
}

/// Exhaustive search over all `k`-block supports.
///
/// Each support is fitted by least squares; the smallest residual wins.
/// Residuals within `1e-10` of each other are tied and broken first by the
/// smaller `sum_l ||x[l]||_2`, then by the lexicographically smaller support.
/// Refuses to run when `M choose k` exceeds [`ORACLE_SUPPORT_LIMIT`].
pub fn exhaustive_oracle(dict: &BlockDictionary, y: &CVec, k: usize) -> Result<RecoveryResult> {
    check_measurements(dict, y)?;
    let m = dict.num_blocks();
    if k > m {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the number of blocks M = {m}")));
    }
    let count = binomial(m, k);
    if count > ORACLE_SUPPORT_LIMIT {
        return Err(Error::TooManySupports { count, limit: ORACLE_SUPPORT_LIMIT });
    }
    let d = dict.block_len();
    match real_problem(dict, y) {
        Some((dr, yr)) => oracle_kernel(&dr, d, &yr, k)?.into_result(d, None),
        None => oracle_kernel(dict.entries(), d, y, k)?.into_result(d, None),
    }
}
