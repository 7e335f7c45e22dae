use nalgebra::{DMatrix, DVector};

use super::{check_measurements, real_problem, KernelOutput, RecoveryResult, Termination};
use crate::blockmat::{mixed_norm_slice, BlockDictionary, NormOrder};
use crate::error::{Error, Result};
use crate::linalg::{self, CVec, Scalar};

/// Reported support: blocks with norm above this fraction of the largest block.
pub const LOPT_SUPPORT_REL_THRESHOLD: f64 = 1e-6;
/// Penalty is rescaled when primal and dual residuals differ by more than this factor.
const PENALTY_BALANCE: f64 = 10.0;
const PENALTY_STEP: f64 = 2.0;
const PENALTY_CHECK_EVERY: usize = 10;
/// Over-relaxation weight applied to the projected iterate.
const RELAXATION: f64 = 1.6;

/// Augmented-Lagrangian parameters for [`lopt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoptParams {
    /// Initial penalty weight `rho`.
    pub penalty: f64,
    pub max_iters: usize,
    /// Relative tolerance on `||x - z||`.
    pub primal_tol: f64,
    /// Relative tolerance on `rho ||z - z_prev||`.
    pub dual_tol: f64,
}

impl Default for LoptParams {
    fn default() -> Self {
        Self { penalty: 1.0, max_iters: 10_000, primal_tol: 1e-8, dual_tol: 1e-8 }
    }
}

impl LoptParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.penalty) || !positive(self.primal_tol) || !positive(self.dual_tol) || self.max_iters == 0 {
            return Err(Error::InvalidArgument(format!("L-OPT parameters must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// `v[l] <- max(0, 1 - t / ||v[l]||) v[l]` for every block.
fn block_shrink<T: Scalar>(v: &mut DVector<T>, d: usize, t: f64) {
    for chunk in v.as_mut_slice().chunks_mut(d) {
        let norm = chunk.iter().map(|e| e.modulus_squared()).sum::<f64>().sqrt();
        if norm <= t {
            chunk.iter_mut().for_each(|e| *e = T::zero());
        } else {
            let scale = 1.0 - t / norm;
            chunk.iter_mut().for_each(|e| *e = e.scale(scale));
        }
    }
}

fn lopt_kernel<T: Scalar>(dict: &DMatrix<T>, d: usize, y: &DVector<T>, params: &LoptParams) -> KernelOutput<T> {
    let n = dict.ncols();
    // Projection onto {x : D x = y} is v - D^+ (D v - y).
    let pinv = linalg::pinv(dict);
    let mut z = &pinv * y;
    let mut u = DVector::<T>::zeros(n);
    let mut x = z.clone();
    let mut v = DVector::<T>::zeros(n);
    let mut z_prev = DVector::<T>::zeros(n);
    let mut diff = DVector::<T>::zeros(n);
    let mut dv = DVector::<T>::zeros(dict.nrows());
    let mut rho = params.penalty;
    let mut termination = Termination::MaxIters;
    let mut iterations = 0;
    let adapt_until = params.max_iters / 2;

    for it in 1..=params.max_iters {
        iterations = it;
        v.copy_from(&z);
        v -= &u;
        dv.copy_from(y);
        dv.gemv(T::one(), dict, &v, -T::one());
        x.copy_from(&v);
        x.gemv(-T::one(), &pinv, &dv, T::one());

        z_prev.copy_from(&z);
        // Relaxed iterate alpha x + (1 - alpha) z, kept in v.
        v.copy_from(&x);
        v.scale_mut(RELAXATION);
        v.axpy(T::from_real(1.0 - RELAXATION), &z_prev, T::one());
        z.copy_from(&v);
        z += &u;
        block_shrink(&mut z, d, 1.0 / rho);

        v -= &z;
        u += &v;

        diff.copy_from(&x);
        diff -= &z;
        let primal = diff.norm();
        diff.copy_from(&z);
        diff -= &z_prev;
        let dual = rho * diff.norm();
        let eps_primal = params.primal_tol * x.norm().max(z.norm());
        let eps_dual = params.dual_tol * rho * u.norm();
        if primal <= eps_primal && dual <= eps_dual {
            termination = Termination::Converged;
            break;
        }
        if it <= adapt_until && it % PENALTY_CHECK_EVERY == 0 {
            // Scaled dual u = lambda / rho must be rescaled with rho.
            if primal > PENALTY_BALANCE * dual {
                rho *= PENALTY_STEP;
                u.unscale_mut(PENALTY_STEP);
            } else if dual > PENALTY_BALANCE * primal {
                rho /= PENALTY_STEP;
                u.scale_mut(PENALTY_STEP);
            }
        }
    }

    let residual = (y - dict * &z).norm();
    KernelOutput {
        x: z,
        support: None,
        selection_order: Vec::new(),
        residual_norms: vec![y.norm(), residual],
        termination,
        iterations,
    }
}

/// Mixed l2/l1 recovery: `min sum_l ||x[l]||_2` subject to `y = D x`.
///
/// Solved by splitting `x = z` and running an augmented-Lagrangian iteration:
/// `x` is the projection of `z - u` onto the affine set `{D x = y}` (with a
/// pseudo-inverse of `D` cached for the call), `z` is the blockwise
/// soft-threshold of `x + u` at `1 / rho`, and `u` takes a dual ascent step.
/// The penalty `rho` is doubled or halved when the primal and dual residuals
/// drift more than 10x apart.
///
/// `x_hat` is the block-sparse iterate `z`. `residual_norms` holds `||y||` and
/// the final `||y - D x_hat||`. Hitting `max_iters` is reported through
/// [`Termination::MaxIters`], not as an error.
pub fn lopt(dict: &BlockDictionary, y: &CVec, params: &LoptParams) -> Result<RecoveryResult> {
    check_measurements(dict, y)?;
    params.validate()?;
    let d = dict.block_len();
    let out = match real_problem(dict, y) {
        Some((dr, yr)) => lopt_kernel(&dr, d, &yr, params).into_result(d, Some(0.0))?,
        None => lopt_kernel(dict.entries(), d, y, params).into_result(d, Some(0.0))?,
    };
    let max_block = out.x_hat.block_norms().into_iter().fold(0.0, f64::max);
    let support = out.x_hat.block_support(LOPT_SUPPORT_REL_THRESHOLD * max_block);
    Ok(RecoveryResult { support, ..out })
}

/// Objective value `sum_l ||x[l]||_2`.
pub(crate) fn objective<T: Scalar>(x: &[T], d: usize) -> f64 {
    mixed_norm_slice(x, d, NormOrder::One)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmat::BlockVector;
    use crate::coherence::exact_recovery_certificate;
    use crate::dictionaries::{gaussian_dictionary, random_unitary, spike_kron_fourier};
    use crate::linalg::CMat;
    use crate::recovery::{omp, DEFAULT_RES_TOL};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unitary_dictionary_has_a_single_feasible_point() {
        let u = random_unitary(6, 12);
        let dict = BlockDictionary::new(u.clone(), 2).unwrap();
        let y = CVec::from_fn(6, |i, _| c(i as f64 - 2.0, 0.5));
        let res = lopt(&dict, &y, &LoptParams::default()).unwrap();
        assert_eq!(res.termination, Termination::Converged);
        let expect = u.ad_mul(&y);
        assert!((res.x_hat.entries() - &expect).norm() < 1e-6 * expect.norm());
    }

    #[test]
    fn certified_extremal_instance_is_recovered() {
        let (_, _, dict) = spike_kron_fourier(16, 2, &CMat::identity(2, 2)).unwrap();
        let mut x = BlockVector::zeros(64, 2).unwrap();
        x.block_mut(2).copy_from_slice(&[c(1.0, 0.0), c(-0.5, 0.0)]);
        x.block_mut(21).copy_from_slice(&[c(0.3, 0.0), c(0.8, 0.0)]);
        let support = x.block_support(0.0);
        assert!(exact_recovery_certificate(&dict, &support).unwrap().holds);
        let y = dict.apply(&x).unwrap();
        let res = lopt(&dict, &y, &LoptParams::default()).unwrap();
        assert_eq!(res.termination, Termination::Converged);
        assert!((res.x_hat.entries() - x.entries()).norm() <= 1e-4 * x.entries().norm());
        assert_eq!(res.support, support);
    }

    #[test]
    fn d1_basis_pursuit_agrees_with_omp_on_certified_instance() {
        let (_, _, dict) = spike_kron_fourier(16, 1, &CMat::identity(1, 1)).unwrap();
        let mut x = BlockVector::zeros(32, 1).unwrap();
        x.block_mut(3)[0] = c(1.0, 0.0);
        x.block_mut(20)[0] = c(-2.0, 0.0);
        let support = x.block_support(0.0);
        assert!(exact_recovery_certificate(&dict, &support).unwrap().holds);
        let y = dict.apply(&x).unwrap();
        let bp = lopt(&dict, &y, &LoptParams::default()).unwrap();
        let greedy = omp(&dict, &y, 2, DEFAULT_RES_TOL).unwrap();
        assert_eq!(bp.support, greedy.support);
        assert_eq!(bp.support, support);
    }

    #[test]
    fn zero_measurements_converge_immediately() {
        let dict = gaussian_dictionary(8, 24, 2, 3).unwrap();
        let res = lopt(&dict, &CVec::zeros(8), &LoptParams::default()).unwrap();
        assert_eq!(res.termination, Termination::Converged);
        assert_eq!(res.iterations, 1);
        assert!(res.x_hat.entries().iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn reports_max_iters() {
        let dict = gaussian_dictionary(20, 80, 4, 3).unwrap();
        let y = CVec::from_fn(20, |i, _| c((i as f64).sin(), 0.0));
        let params = LoptParams { max_iters: 3, ..LoptParams::default() };
        let res = lopt(&dict, &y, &params).unwrap();
        assert_eq!(res.termination, Termination::MaxIters);
        assert_eq!(res.iterations, 3);
    }

    #[test]
    fn rejects_bad_params() {
        let dict = gaussian_dictionary(4, 8, 2, 3).unwrap();
        let bad = LoptParams { penalty: 0.0, ..LoptParams::default() };
        assert!(lopt(&dict, &CVec::zeros(4), &bad).is_err());
    }

    #[test]
    fn shrink_zeroes_small_blocks() {
        let mut v = DVector::<f64>::from_vec(vec![3.0, 4.0, 0.1, 0.0]);
        block_shrink(&mut v, 2, 1.0);
        assert!((v[0] - 2.4).abs() < 1e-15 && (v[1] - 3.2).abs() < 1e-15);
        assert_eq!((v[2], v[3]), (0.0, 0.0));
        assert_eq!(objective(v.as_slice(), 2), 4.0);
    }
}
