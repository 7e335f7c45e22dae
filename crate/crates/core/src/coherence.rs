//! Coherence metrics, blocked matrix norms and the exact-recovery certificate.

use std::fmt;

use nalgebra::DMatrix;

use crate::blockmat::{BlockDictionary, BlockSupport};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Scalar};

/// Unitarity tolerance for basis pairs.
pub const UNITARY_TOL: f64 = 1e-10;

pub use crate::linalg::spectral_norm;

fn gram<T: Scalar>(m: &DMatrix<T>) -> DMatrix<T> {
    m.ad_mul(m)
}

fn block_of<T: Scalar>(m: &DMatrix<T>, row_block: usize, col_block: usize, d: usize) -> DMatrix<T> {
    m.view((row_block * d, col_block * d), (d, d)).into_owned()
}

fn coherence_from_gram<T: Scalar>(g: &DMatrix<T>) -> f64 {
    let n = g.ncols();
    let mut mu = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            mu = mu.max(g[(i, j)].modulus());
        }
    }
    mu
}

fn block_coherence_from_gram<T: Scalar>(g: &DMatrix<T>, d: usize) -> f64 {
    let m = g.ncols() / d;
    let mut best = 0.0f64;
    // rho(M[l, r]) = rho(M[r, l]) because M[r, l] = M[l, r]^H.
    for r in 0..m {
        for l in 0..r {
            best = best.max(linalg::spectral_norm_unchecked(&block_of(g, l, r, d)));
        }
    }
    best / d as f64
}

fn sub_coherence_from_gram<T: Scalar>(g: &DMatrix<T>, d: usize) -> f64 {
    if d == 1 {
        return 0.0;
    }
    let m = g.ncols() / d;
    let mut nu = 0.0f64;
    for l in 0..m {
        for j in 0..d {
            for i in 0..j {
                nu = nu.max(g[(l * d + i, l * d + j)].modulus());
            }
        }
    }
    nu
}

enum Gram {
    Real(DMatrix<f64>),
    Complex(CMat),
}

impl Gram {
    fn of(dict: &BlockDictionary) -> Gram {
        match linalg::real_part_if_real(dict.entries()) {
            Some(r) => Gram::Real(gram(&r)),
            None => Gram::Complex(gram(dict.entries())),
        }
    }

    fn coherence(&self) -> f64 {
        match self {
            Gram::Real(g) => coherence_from_gram(g),
            Gram::Complex(g) => coherence_from_gram(g),
        }
    }

    fn block_coherence(&self, d: usize) -> f64 {
        match self {
            Gram::Real(g) => block_coherence_from_gram(g, d),
            Gram::Complex(g) => block_coherence_from_gram(g, d),
        }
    }

    fn sub_coherence(&self, d: usize) -> f64 {
        match self {
            Gram::Real(g) => sub_coherence_from_gram(g, d),
            Gram::Complex(g) => sub_coherence_from_gram(g, d),
        }
    }
}

/// `mu = max_{i != j} |d_i^H d_j|`.
pub fn coherence(dict: &BlockDictionary) -> Result<f64> {
    if dict.cols() < 2 {
        return Err(Error::InvalidArgument("coherence needs at least two columns".into()));
    }
    Ok(Gram::of(dict).coherence())
}

/// `mu_B = max_{l != r} rho(D[l]^H D[r]) / d`.
pub fn block_coherence(dict: &BlockDictionary) -> Result<f64> {
    if dict.num_blocks() < 2 {
        return Err(Error::InvalidArgument("block-coherence needs at least two blocks".into()));
    }
    Ok(Gram::of(dict).block_coherence(dict.block_len()))
}

/// Largest coherence between distinct columns of the same block; 0 for `d = 1`.
pub fn sub_coherence(dict: &BlockDictionary) -> f64 {
    if dict.block_len() == 1 {
        return 0.0;
    }
    Gram::of(dict).sub_coherence(dict.block_len())
}

/// Block-coherence between two unitary bases sharing block length `d`:
/// `max_{l, r} rho(Phi[l]^H Psi[r]) / d`, with the diagonal pairs included.
pub fn cross_block_coherence(phi: &BlockDictionary, psi: &BlockDictionary) -> Result<f64> {
    check_unitary_pair(phi, psi)?;
    let d = phi.block_len();
    let cross = phi.entries().ad_mul(psi.entries());
    let m = phi.num_blocks();
    let mut best = 0.0f64;
    match linalg::real_part_if_real(&cross) {
        Some(c) => {
            for r in 0..m {
                for l in 0..m {
                    best = best.max(linalg::spectral_norm_unchecked(&block_of(&c, l, r, d)));
                }
            }
        }
        None => {
            for r in 0..m {
                for l in 0..m {
                    best = best.max(linalg::spectral_norm_unchecked(&block_of(&cross, l, r, d)));
                }
            }
        }
    }
    Ok(best / d as f64)
}

pub(crate) fn check_unitary_pair(phi: &BlockDictionary, psi: &BlockDictionary) -> Result<()> {
    if phi.block_len() != psi.block_len() {
        return Err(Error::DimensionMismatch(format!(
            "block lengths differ ({} vs {})",
            phi.block_len(),
            psi.block_len()
        )));
    }
    for basis in [phi, psi] {
        if basis.rows() != basis.cols() {
            return Err(Error::DimensionMismatch(format!(
                "basis must be square, found {}x{}",
                basis.rows(),
                basis.cols()
            )));
        }
        let deviation = linalg::unitary_deviation(basis.entries());
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
    }
    if phi.rows() != psi.rows() {
        return Err(Error::DimensionMismatch("bases have different dimensions".into()));
    }
    Ok(())
}

fn check_aligned<T>(a: &DMatrix<T>, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::ZeroBlockLen);
    }
    if !a.nrows().is_multiple_of(d) {
        return Err(Error::BlockMisaligned { what: "row count", len: a.nrows(), block_len: d });
    }
    if !a.ncols().is_multiple_of(d) {
        return Err(Error::BlockMisaligned { what: "column count", len: a.ncols(), block_len: d });
    }
    Ok(())
}

/// Sum of block spectral norms down block-column `r`.
fn block_column_sum<T: Scalar>(a: &DMatrix<T>, d: usize, r: usize) -> f64 {
    (0..a.nrows() / d)
        .map(|l| linalg::spectral_norm_unchecked(&block_of(a, l, r, d)))
        .sum()
}

/// Per-block-column sums `rho_c(A J_r)`.
pub fn block_column_sums<T: Scalar>(a: &DMatrix<T>, d: usize) -> Result<Vec<f64>> {
    check_aligned(a, d)?;
    Ok((0..a.ncols() / d).map(|r| block_column_sum(a, d, r)).collect())
}

/// `rho_c(A) = max_r sum_l rho(A[l, r])` over `d x d` blocks.
pub fn rho_c<T: Scalar>(a: &DMatrix<T>, d: usize) -> Result<f64> {
    Ok(block_column_sums(a, d)?.into_iter().fold(0.0, f64::max))
}

/// `rho_r(A) = max_l sum_r rho(A[l, r])`.
pub fn rho_r<T: Scalar>(a: &DMatrix<T>, d: usize) -> Result<f64> {
    check_aligned(a, d)?;
    let best = (0..a.nrows() / d)
        .map(|l| {
            (0..a.ncols() / d)
                .map(|r| linalg::spectral_norm_unchecked(&block_of(a, l, r, d)))
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    Ok(best)
}

/// Value of `rho_c(D0^+ Dbar0)` and whether it is strictly below one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub value: f64,
    pub holds: bool,
}

impl Certificate {
    fn from_value(value: f64) -> Self {
        Self { value, holds: value < 1.0 }
    }
}

pub(crate) fn certificate_kernel<T: Scalar>(dict: &DMatrix<T>, d: usize, support: &BlockSupport) -> Result<f64> {
    let m = dict.ncols() / d;
    let k = support.len();
    if let Some(max) = support.max_index() {
        if max >= m {
            return Err(Error::BlockOutOfRange { index: max, count: m });
        }
    }
    if k * d > dict.nrows() {
        return Err(Error::InvalidArgument(format!(
            "support of {k} blocks needs {} rows, dictionary has {}",
            k * d,
            dict.nrows()
        )));
    }
    let rest = support.complement(m);
    if k == 0 || rest.is_empty() {
        return Ok(0.0);
    }
    let gather = |blocks: &[usize]| {
        let mut out = DMatrix::<T>::zeros(dict.nrows(), blocks.len() * d);
        for (slot, &l) in blocks.iter().enumerate() {
            out.columns_mut(slot * d, d).copy_from(&dict.columns(l * d, d));
        }
        out
    };
    let d0 = gather(support.indices());
    let dbar = gather(&rest);
    let pinv = linalg::pinv_full_rank(&d0)?;
    rho_c(&(pinv * dbar), d)
}

/// Exact-recovery certificate `rho_c(D0^+ Dbar0) < 1` for the support `support`.
///
/// When it holds, both BOMP and the mixed l2/l1 program recover every signal
/// supported on `support`.
pub fn exact_recovery_certificate(dict: &BlockDictionary, support: &BlockSupport) -> Result<Certificate> {
    let d = dict.block_len();
    let value = match linalg::real_part_if_real(dict.entries()) {
        Some(r) => certificate_kernel(&r, d, support)?,
        None => certificate_kernel(dict.entries(), d, support)?,
    };
    Ok(Certificate::from_value(value))
}

/// `mu`, `mu_B` and `nu` of a dictionary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub mu: f64,
    pub mu_block: f64,
    pub sub_coherence: f64,
    pub gram_computed: bool,
}

impl CoherenceReport {
    /// Computes all three metrics from one Gram matrix.
    pub fn compute(dict: &BlockDictionary) -> Result<Self> {
        if dict.cols() < 2 {
            return Err(Error::InvalidArgument("coherence needs at least two columns".into()));
        }
        let g = Gram::of(dict);
        let d = dict.block_len();
        let mu_block = if dict.num_blocks() >= 2 { g.block_coherence(d) } else { 0.0 };
        Ok(Self {
            mu: g.coherence(),
            mu_block,
            sub_coherence: if d == 1 { 0.0 } else { g.sub_coherence(d) },
            gram_computed: true,
        })
    }

    pub fn to_key_value(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CoherenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mu={}", self.mu)?;
        writeln!(f, "mu_block={}", self.mu_block)?;
        writeln!(f, "sub_coherence={}", self.sub_coherence)?;
        writeln!(f, "gram_computed={}", self.gram_computed)
    }
}
