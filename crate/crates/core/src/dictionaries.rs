//! Dictionary ensembles and special signals: normalized Gaussian
//! dictionaries, the spike / Kronecker-Fourier basis pair, Haar unitaries,
//! per-block orthogonalization and Dirac combs.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::blockmat::{io, BlockDictionary, BlockVector};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, Scalar};
use crate::rng::{rng_from_seed, standard_normal};

/// Entry distribution of [`gaussian_dictionary_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ensemble {
    /// i.i.d. real standard normal entries.
    #[default]
    Real,
    /// i.i.d. circular complex normal entries.
    Complex,
}

/// `L x N` matrix with i.i.d. real Gaussian entries and unit-norm columns,
/// split into blocks of length `d`.
pub fn gaussian_dictionary(rows: usize, cols: usize, block_len: usize, seed: u64) -> Result<BlockDictionary> {
    gaussian_dictionary_with(rows, cols, block_len, seed, Ensemble::Real)
}

pub fn gaussian_dictionary_with(
    rows: usize,
    cols: usize,
    block_len: usize,
    seed: u64,
    ensemble: Ensemble,
) -> Result<BlockDictionary> {
    if block_len == 0 {
        return Err(Error::ZeroBlockLen);
    }
    if !cols.is_multiple_of(block_len) {
        return Err(Error::BlockMisaligned { what: "column count", len: cols, block_len });
    }
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    if rows >= cols {
        log::warn!("gaussian dictionary with L = {rows} >= N = {cols} is not in the compressed-sensing regime");
    }
    let mut rng = rng_from_seed(seed);
    let mut m = CMat::zeros(rows, cols);
    // Column-major fill so the stream maps to columns.
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = match ensemble {
                Ensemble::Real => Complex64::new(standard_normal(&mut rng), 0.0),
                Ensemble::Complex => {
                    let s = std::f64::consts::FRAC_1_SQRT_2;
                    Complex64::new(s * standard_normal(&mut rng), s * standard_normal(&mut rng))
                }
            };
        }
        let norm = m.column(j).norm();
        m.column_mut(j).unscale_mut(norm);
    }
    BlockDictionary::new(m, block_len)
}

/// Haar-distributed `d x d` unitary: QR of a complex Gaussian matrix with the
/// triangular factor normalised to a positive real diagonal.
pub fn random_unitary(d: usize, seed: u64) -> CMat {
    let mut rng = rng_from_seed(seed);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMat::from_fn(d, d, |_, _| {
        let re = standard_normal(&mut rng);
        let im = standard_normal(&mut rng);
        Complex64::new(s * re, s * im)
    });
    linalg::thin_qr_positive(g).0
}

/// Unitary DFT matrix with entries `exp(j 2 pi l r / R) / sqrt(R)`.
pub fn dft_matrix(size: usize) -> CMat {
    let scale = 1.0 / (size as f64).sqrt();
    CMat::from_fn(size, size, |l, r| {
        // Reduce l*r modulo R before forming the angle to keep it small.
        let phase = 2.0 * PI * ((l * r) % size) as f64 / size as f64;
        Complex64::from_polar(scale, phase)
    })
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// The basis pair `Phi = I_L`, `Psi = F_R (x) U` with `L = R d`, and the
/// two-basis dictionary `D = [Phi Psi]`, all with block length `d`.
///
/// This pair attains the smallest possible block-coherence `1 / (d sqrt(R))`.
pub fn spike_kron_fourier(
    r: usize,
    d: usize,
    u: &CMat,
) -> Result<(BlockDictionary, BlockDictionary, BlockDictionary)> {
    if r == 0 {
        return Err(Error::InvalidArgument("R must be at least 1".into()));
    }
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch(format!("U must be {d}x{d}, found {}x{}", u.nrows(), u.ncols())));
    }
    let deviation = linalg::unitary_deviation(u);
    if deviation > crate::coherence::UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let l = r * d;
    let phi = CMat::identity(l, l);
    let psi = kron(&dft_matrix(r), u);
    let mut both = CMat::zeros(l, 2 * l);
    both.columns_mut(0, l).copy_from(&phi);
    both.columns_mut(l, l).copy_from(&psi);
    Ok((
        BlockDictionary::new(phi, d)?,
        BlockDictionary::new(psi, d)?,
        BlockDictionary::new(both, d)?,
    ))
}

/// Resolves a `U` specification: `identity`, `haar:<seed>` or a matrix file.
pub fn unitary_from_spec(spec: &str, d: usize) -> Result<CMat> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("identity") {
        return Ok(CMat::identity(d, d));
    }
    if let Some(seed) = spec.strip_prefix("haar:") {
        let seed = seed
            .parse::<u64>()
            .map_err(|_| Error::InvalidArgument(format!("bad haar seed {seed:?}")))?;
        return Ok(random_unitary(d, seed));
    }
    io::read_matrix(Path::new(spec))
}

/// `D = A W` with orthonormal blocks `A[l]` and block-diagonal invertible `W`.
#[derive(Debug, Clone)]
pub struct OrthogonalizedPair {
    pub a: BlockDictionary,
    /// Diagonal blocks `W_l` (upper triangular with positive real diagonal).
    pub w_blocks: Vec<CMat>,
}

impl OrthogonalizedPair {
    /// Full `N x N` block-diagonal `W`.
    pub fn w(&self) -> CMat {
        let d = self.a.block_len();
        let n = self.a.cols();
        let mut w = CMat::zeros(n, n);
        for (l, wl) in self.w_blocks.iter().enumerate() {
            w.view_mut((l * d, l * d), (d, d)).copy_from(wl);
        }
        w
    }

    /// `c = W x`.
    pub fn apply_w(&self, x: &BlockVector) -> Result<BlockVector> {
        let d = self.a.block_len();
        self.check_len(x)?;
        let mut out = x.clone();
        for (l, wl) in self.w_blocks.iter().enumerate() {
            let xb = CVec::from_column_slice(x.block(l));
            out.block_mut(l).copy_from_slice((wl * xb).as_slice());
        }
        debug_assert_eq!(out.block_len(), d);
        Ok(out)
    }

    /// `x = W^{-1} c`, solved blockwise against the triangular `W_l`.
    pub fn apply_w_inv(&self, c: &BlockVector) -> Result<BlockVector> {
        self.check_len(c)?;
        let mut out = c.clone();
        for (l, wl) in self.w_blocks.iter().enumerate() {
            let cb = CVec::from_column_slice(c.block(l));
            let xb = wl
                .solve_upper_triangular(&cb)
                .ok_or_else(|| Error::RankDeficient(format!("W block {l} is singular")))?;
            out.block_mut(l).copy_from_slice(xb.as_slice());
        }
        Ok(out)
    }

    fn check_len(&self, x: &BlockVector) -> Result<()> {
        if x.len() != self.a.cols() || x.block_len() != self.a.block_len() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} (d = {}) against N = {} (d = {})",
                x.len(),
                x.block_len(),
                self.a.cols(),
                self.a.block_len()
            )));
        }
        Ok(())
    }
}

fn orthogonalize_kernel<T: Scalar>(m: &DMatrix<T>, d: usize) -> Result<(DMatrix<T>, Vec<DMatrix<T>>)> {
    if m.nrows() < d {
        return Err(Error::DimensionMismatch(format!("blocks of {d} columns need at least {d} rows")));
    }
    let nblocks = m.ncols() / d;
    let mut a = DMatrix::<T>::zeros(m.nrows(), m.ncols());
    let mut ws = Vec::with_capacity(nblocks);
    for l in 0..nblocks {
        let block = m.columns(l * d, d).into_owned();
        let (q, r) = linalg::thin_qr_positive(block);
        let rmax = (0..d).map(|i| r[(i, i)].modulus()).fold(0.0, f64::max);
        let rmin = (0..d).map(|i| r[(i, i)].modulus()).fold(f64::INFINITY, f64::min);
        if !(rmin > crate::blockmat::BLOCK_RANK_TOL * rmax) {
            return Err(Error::RankDeficientBlock { block: l, ratio: rmin / rmax });
        }
        a.columns_mut(l * d, d).copy_from(&q);
        ws.push(r);
    }
    Ok((a, ws))
}

/// Per-block thin QR `D[l] = A[l] W_l`. Block supports are preserved by `W`.
pub fn orthogonalize_blocks(dict: &BlockDictionary) -> Result<OrthogonalizedPair> {
    let d = dict.block_len();
    let (a, w_blocks) = match linalg::real_part_if_real(dict.entries()) {
        Some(r) => {
            let (a, ws) = orthogonalize_kernel(&r, d)?;
            (linalg::to_complex(&a), ws.iter().map(linalg::to_complex).collect())
        }
        None => orthogonalize_kernel(dict.entries(), d)?,
    };
    Ok(OrthogonalizedPair { a: BlockDictionary::new_unchecked(a, d)?, w_blocks })
}

/// `delta_{sqrt R} (x) c`: nonzero blocks at `0, sqrt R, 2 sqrt R, ...`, each
/// equal to `c`, in a vector of `R` blocks of length `d`.
pub fn dirac_comb_signal(r: usize, d: usize, c: &CVec) -> Result<BlockVector> {
    if d == 0 {
        return Err(Error::ZeroBlockLen);
    }
    if c.len() != d {
        return Err(Error::DimensionMismatch(format!("comb amplitude has length {}, expected {d}", c.len())));
    }
    let root = (r as f64).sqrt().round() as usize;
    if r == 0 || root * root != r {
        return Err(Error::InvalidArgument(format!("R = {r} is not a perfect square")));
    }
    if c.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(Error::InvalidArgument("comb amplitude c must be nonzero".into()));
    }
    let mut x = BlockVector::zeros(r * d, d)?;
    for t in 0..root {
        x.block_mut(t * root).copy_from_slice(c.as_slice());
    }
    Ok(x)
}
