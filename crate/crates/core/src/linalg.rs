//! Dense linear-algebra helpers on top of `nalgebra`.
//!
//! Everything here is generic over [`Scalar`] so the solver kernels can run
//! in real arithmetic when the data has no imaginary part.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Field types the numerical kernels are instantiated with (`f64`, `Complex64`).
pub trait Scalar: ComplexField<RealField = f64> + Copy {}
impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

/// Largest singular value of `a`.
pub fn spectral_norm<T: Scalar>(a: &DMatrix<T>) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    Ok(spectral_norm_unchecked(a))
}

pub(crate) fn spectral_norm_unchecked<T: Scalar>(a: &DMatrix<T>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if a.nrows() == 1 || a.ncols() == 1 {
        return a.norm();
    }
    a.clone().svd(false, false).singular_values.max()
}

/// Smallest-over-largest singular value ratio; 0 for a zero matrix.
pub fn singular_ratio<T: Scalar>(a: &DMatrix<T>) -> f64 {
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

/// `max |(A^H A - I)_ij|`.
pub fn unitary_deviation<T: Scalar>(a: &DMatrix<T>) -> f64 {
    let gram = a.ad_mul(a);
    let mut dev = 0.0f64;
    for j in 0..gram.ncols() {
        for i in 0..gram.nrows() {
            let target = if i == j { T::one() } else { T::zero() };
            dev = dev.max((gram[(i, j)] - target).modulus());
        }
    }
    dev
}

pub fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Real part of `m` when every imaginary part is exactly zero.
pub fn real_part_if_real(m: &CMat) -> Option<DMatrix<f64>> {
    is_real(m).then(|| m.map(|z| z.re))
}

pub fn real_vec_if_real(v: &CVec) -> Option<DVector<f64>> {
    v.iter().all(|z| z.im == 0.0).then(|| v.map(|z| z.re))
}

pub fn to_complex<T: Scalar>(m: &DMatrix<T>) -> CMat {
    m.map(|t| Complex64::new(t.real(), t.imaginary()))
}

pub fn to_complex_vec<T: Scalar>(v: &DVector<T>) -> CVec {
    v.map(|t| Complex64::new(t.real(), t.imaginary()))
}

/// Thin QR (`m >= n`) with the triangular factor normalised to a positive
/// real diagonal. With that convention the factorization is unique for full
/// column rank input.
pub fn thin_qr_positive<T: Scalar>(a: DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    assert!(a.nrows() >= a.ncols(), "thin QR needs a tall matrix");
    let qr = a.qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for j in 0..r.nrows() {
        let rjj = r[(j, j)];
        let m = rjj.modulus();
        if m > 0.0 {
            let phase = rjj.unscale(m);
            for i in 0..q.nrows() {
                q[(i, j)] *= phase;
            }
            let conj = phase.conjugate();
            for c in j..r.ncols() {
                r[(j, c)] *= conj;
            }
            r[(j, j)] = T::from_real(m);
        }
    }
    (q, r)
}

/// Relative rank tolerance `max(m, n) * eps` applied against the largest
/// diagonal entry of a triangular factor.
fn qr_rank_tol(rows: usize, cols: usize, rmax: f64) -> f64 {
    rmax * rows.max(cols) as f64 * f64::EPSILON
}

/// Moore-Penrose pseudo-inverse of a full-rank matrix via thin QR.
///
/// Tall input: `A^+ = R^{-1} Q^H`; wide input: `A^+ = Q R^{-H}` from the QR of
/// `A^H`. Fails if a diagonal entry of `R` falls under the rank tolerance.
pub fn pinv_full_rank<T: Scalar>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    if a.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let tall = a.nrows() >= a.ncols();
    let work = if tall { a.clone() } else { a.adjoint() };
    let (q, r) = thin_qr_positive(work);
    let n = r.nrows();
    let rmax = (0..n).map(|i| r[(i, i)].modulus()).fold(0.0, f64::max);
    let tol = qr_rank_tol(a.nrows(), a.ncols(), rmax);
    if let Some(i) = (0..n).find(|&i| r[(i, i)].modulus() <= tol) {
        return Err(Error::RankDeficient(format!(
            "{}x{} matrix: |R[{i},{i}]| = {:e} <= {:e}",
            a.nrows(),
            a.ncols(),
            r[(i, i)].modulus(),
            tol
        )));
    }
    // R^{-1} Q^H
    let qh = q.adjoint();
    let x = r
        .solve_upper_triangular(&qh)
        .ok_or_else(|| Error::RankDeficient("singular triangular factor".into()))?;
    Ok(if tall { x } else { x.adjoint() })
}

/// Pseudo-inverse with an SVD fallback for rank-deficient input.
pub fn pinv<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    match pinv_full_rank(a) {
        Ok(p) => p,
        Err(_) => {
            let svd = a.clone().svd(true, true);
            let smax = svd.singular_values.max();
            let tol = qr_rank_tol(a.nrows(), a.ncols(), smax);
            svd.pseudo_inverse(tol)
                .unwrap_or_else(|_| DMatrix::zeros(a.ncols(), a.nrows()))
        }
    }
}

/// Least-squares solve `min ||A c - y||` for full column rank `A`, returning
/// `(c, residual)`.
pub fn least_squares<T: Scalar>(a: &DMatrix<T>, y: &DVector<T>) -> Result<(DVector<T>, DVector<T>)> {
    let p = pinv_full_rank(a)?;
    let c = &p * y;
    let r = y - a * &c;
    Ok((c, r))
}

/// Householder-free QR that grows one column at a time, used by the greedy
/// solvers so each step costs `O(L * cols)` instead of a refactorization.
///
/// Columns are orthogonalized with classical Gram-Schmidt applied twice. When a
/// new column loses more than eight digits to cancellation the factorization
/// is rebuilt from scratch with Householder QR.
#[derive(Debug, Clone)]
pub struct IncrementalQr<T: Scalar> {
    cols: DMatrix<T>,
    q: DMatrix<T>,
    r: DMatrix<T>,
    qty: DVector<T>,
    y: DVector<T>,
    rank_tol: f64,
}

impl<T: Scalar> IncrementalQr<T> {
    pub fn new(y: &DVector<T>, rank_tol: f64) -> Self {
        let l = y.len();
        Self {
            cols: DMatrix::zeros(l, 0),
            q: DMatrix::zeros(l, 0),
            r: DMatrix::zeros(0, 0),
            qty: DVector::zeros(0),
            y: y.clone(),
            rank_tol,
        }
    }

    pub fn ncols(&self) -> usize {
        self.q.ncols()
    }

    /// Appends columns. On rank deficiency the factorization is left unchanged.
    pub fn push_columns(&mut self, block: &DMatrix<T>) -> Result<()> {
        let saved = (self.cols.clone(), self.q.clone(), self.r.clone(), self.qty.clone());
        for j in 0..block.ncols() {
            let v = block.column(j).into_owned();
            if let Err(e) = self.push_column(v) {
                (self.cols, self.q, self.r, self.qty) = saved;
                return Err(e);
            }
        }
        Ok(())
    }

    fn push_column(&mut self, v: DVector<T>) -> Result<()> {
        let n = self.q.ncols();
        let l = self.q.nrows();
        let norm0 = v.norm();
        let mut w = v.clone();
        let mut h = DVector::<T>::zeros(n);
        for _ in 0..2 {
            if n > 0 {
                let c = self.q.ad_mul(&w);
                w -= &self.q * &c;
                h += c;
            }
        }
        let nw = w.norm();
        if norm0 == 0.0 || nw <= self.rank_tol * norm0 {
            return Err(Error::RankDeficient(format!(
                "column {} lies in the span of the previously selected columns",
                n
            )));
        }
        self.cols = std::mem::replace(&mut self.cols, DMatrix::zeros(0, 0)).insert_column(n, T::zero());
        self.cols.set_column(n, &v);
        if nw < 1e-8 * norm0 {
            return self.refactor();
        }
        let qn = w.unscale(nw);
        self.q = std::mem::replace(&mut self.q, DMatrix::zeros(0, 0)).insert_column(n, T::zero());
        self.q.set_column(n, &qn);
        let mut r = DMatrix::<T>::zeros(n + 1, n + 1);
        r.view_mut((0, 0), (n, n)).copy_from(&self.r);
        r.view_mut((0, n), (n, 1)).copy_from(&h);
        r[(n, n)] = T::from_real(nw);
        self.r = r;
        let qy = qn.dotc(&self.y);
        self.qty = std::mem::replace(&mut self.qty, DVector::zeros(0)).insert_row(n, qy);
        debug_assert_eq!(self.q.nrows(), l);
        Ok(())
    }

    fn refactor(&mut self) -> Result<()> {
        let (q, r) = thin_qr_positive(self.cols.clone());
        let n = r.nrows();
        let rmax = (0..n).map(|i| r[(i, i)].modulus()).fold(0.0, f64::max);
        if (0..n).any(|i| r[(i, i)].modulus() <= self.rank_tol * rmax) {
            self.cols = self.cols.clone().remove_column(n - 1);
            return Err(Error::RankDeficient("selected columns are linearly dependent".into()));
        }
        self.qty = q.ad_mul(&self.y);
        self.q = q;
        self.r = r;
        Ok(())
    }

    /// Least-squares coefficients over all pushed columns.
    pub fn coefficients(&self) -> DVector<T> {
        if self.q.ncols() == 0 {
            return DVector::zeros(0);
        }
        self.r
            .solve_upper_triangular(&self.qty)
            .expect("triangular factor has a nonzero diagonal")
    }

    /// `y - Q Q^H y`.
    pub fn residual(&self) -> DVector<T> {
        if self.q.ncols() == 0 {
            return self.y.clone();
        }
        &self.y - &self.q * &self.qty
    }
}
