//! Block-sparse solvers.
//!
//! * [`bomp`] / [`omp`]: block orthogonal matching pursuit and its `d = 1` case.
//! * [`bmp`] / [`mp`]: block matching pursuit for orthonormal-block dictionaries.
//! * [`lopt`]: the mixed l2/l1 program `min sum_l ||x[l]||_2 s.t. y = D x`.
//! * [`exhaustive_oracle`]: brute-force search over all `k`-block supports.
//!
//! Every solver runs a real-arithmetic kernel when both the dictionary and
//! the measurements are real, and a complex kernel otherwise.

mod bmp;
mod bomp;
mod lopt;
mod oracle;

use std::fmt;

use nalgebra::{DMatrix, DVector};

pub use bmp::{bmp, mp, BMP_ORTHONORMAL_TOL};
pub use bomp::{bomp, omp};
pub use lopt::{lopt, LoptParams};
pub use oracle::{exhaustive_oracle, ORACLE_SUPPORT_LIMIT};

use crate::blockmat::{BlockDictionary, BlockSupport, BlockVector};
use crate::error::{Error, Result};
use crate::linalg::{self, CVec, Scalar};

/// Default relative residual tolerance of the greedy solvers.
pub const DEFAULT_RES_TOL: f64 = 1e-12;

/// Why a solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    /// `||r|| <= res_tol * ||y||`.
    ResidualTol,
    /// Iteration budget exhausted.
    MaxIters,
    /// The maximum number of blocks has been selected.
    SupportFull,
    /// Primal and dual residuals of the convex solver met their tolerances,
    /// or an exact search finished.
    Converged,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ResidualTol => "residual_tol",
            Termination::MaxIters => "max_iters",
            Termination::SupportFull => "support_full",
            Termination::Converged => "converged",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub x_hat: BlockVector,
    /// Selected blocks, sorted.
    pub support: BlockSupport,
    /// Blocks in the order they were picked (greedy solvers only; repeats
    /// are possible for BMP).
    pub selection_order: Vec<usize>,
    /// `||r_l||_2` per iteration, starting with `||y||_2`.
    pub residual_norms: Vec<f64>,
    pub termination: Termination,
    pub iterations: usize,
}

impl RecoveryResult {
    pub fn final_residual(&self) -> f64 {
        *self.residual_norms.last().expect("residual history is never empty")
    }
}

/// Kernel output before embedding into the complex public types.
pub(crate) struct KernelOutput<T: Scalar> {
    pub x: DVector<T>,
    pub support: Option<BlockSupport>,
    pub selection_order: Vec<usize>,
    pub residual_norms: Vec<f64>,
    pub termination: Termination,
    pub iterations: usize,
}

impl<T: Scalar> KernelOutput<T> {
    pub fn into_result(self, block_len: usize, support_tol: Option<f64>) -> Result<RecoveryResult> {
        let x_hat = BlockVector::new(linalg::to_complex_vec(&self.x), block_len)?;
        let support = match (self.support, support_tol) {
            (Some(s), _) => s,
            (None, Some(tol)) => x_hat.block_support(tol),
            (None, None) => x_hat.block_support(0.0),
        };
        Ok(RecoveryResult {
            x_hat,
            support,
            selection_order: self.selection_order,
            residual_norms: self.residual_norms,
            termination: self.termination,
            iterations: self.iterations,
        })
    }
}

/// Real copies of the problem data when nothing has an imaginary part.
pub(crate) fn real_problem(dict: &BlockDictionary, y: &CVec) -> Option<(DMatrix<f64>, DVector<f64>)> {
    let yr = linalg::real_vec_if_real(y)?;
    let dr = linalg::real_part_if_real(dict.entries())?;
    Some((dr, yr))
}

pub(crate) fn check_measurements(dict: &BlockDictionary, y: &CVec) -> Result<()> {
    if y.len() != dict.rows() {
        return Err(Error::DimensionMismatch(format!(
            "measurement vector has length {}, dictionary has {} rows",
            y.len(),
            dict.rows()
        )));
    }
    Ok(())
}

/// Index of the block with the largest energy in `corr`, skipping `excluded`.
/// Exact ties go to the lowest index.
pub(crate) fn best_block<T: Scalar>(corr: &DVector<T>, d: usize, excluded: Option<&[bool]>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (l, chunk) in corr.as_slice().chunks(d).enumerate() {
        if excluded.is_some_and(|ex| ex[l]) {
            continue;
        }
        let energy: f64 = chunk.iter().map(|v| v.modulus_squared()).sum();
        match best {
            Some((_, e)) if energy <= e => {}
            _ => best = Some((l, energy)),
        }
    }
    best.map(|(l, _)| l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_tie_break_lowest_index() {
        let corr = DVector::from_vec(vec![1.0, 0.0, 0.0, 1.0, -1.0, 0.0]);
        assert_eq!(best_block(&corr, 2, None), Some(0));
        assert_eq!(best_block(&corr, 2, Some(&[true, false, false])), Some(1));
        assert_eq!(best_block(&corr, 2, Some(&[true, true, true])), None);
    }
}
