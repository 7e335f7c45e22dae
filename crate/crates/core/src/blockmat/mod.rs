//! Blocked data model: dictionaries split into column blocks, block vectors,
//! block supports and the mixed l2/lp vector norms.

pub mod io;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DMatrixView, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};

/// Column norms must equal one within this tolerance.
pub const UNIT_NORM_TOL: f64 = 1e-10;
/// A block is full rank when `sigma_min > BLOCK_RANK_TOL * sigma_max`.
pub const BLOCK_RANK_TOL: f64 = 1e-10;

fn check_block_len(len: usize, block_len: usize, what: &'static str) -> Result<()> {
    if block_len == 0 {
        return Err(Error::ZeroBlockLen);
    }
    if !len.is_multiple_of(block_len) {
        return Err(Error::BlockMisaligned { what, len, block_len });
    }
    Ok(())
}

/// An `L x N` dictionary viewed as `M = N / d` consecutive column blocks of
/// width `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDictionary {
    entries: CMat,
    block_len: usize,
}

impl BlockDictionary {
    /// Validating constructor: `d | N`, unit-norm columns and full column
    /// rank within every block.
    pub fn new(entries: CMat, block_len: usize) -> Result<Self> {
        let dict = Self::new_unchecked(entries, block_len)?;
        dict.validate()?;
        Ok(dict)
    }

    /// Only checks that `d` divides `N`. Intended for synthetic matrices that
    /// deliberately violate the normalisation assumptions.
    pub fn new_unchecked(entries: CMat, block_len: usize) -> Result<Self> {
        check_block_len(entries.ncols(), block_len, "column count")?;
        Ok(Self { entries, block_len })
    }

    pub fn from_real(entries: &DMatrix<f64>, block_len: usize) -> Result<Self> {
        Self::new(linalg::to_complex(entries), block_len)
    }

    /// Checks the unit-norm and block-rank invariants.
    pub fn validate(&self) -> Result<()> {
        for (j, col) in self.entries.column_iter().enumerate() {
            let norm = col.norm();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::NotUnitNorm { column: j, norm });
            }
        }
        for l in 0..self.num_blocks() {
            let ratio = match linalg::real_part_if_real(&self.block_owned(l)) {
                Some(b) => linalg::singular_ratio(&b),
                None => linalg::singular_ratio(&self.block_owned(l)),
            };
            if !(ratio > BLOCK_RANK_TOL) {
                return Err(Error::RankDeficientBlock { block: l, ratio });
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn into_entries(self) -> CMat {
        self.entries
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// `L`
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    /// `N`
    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// `M = N / d`
    pub fn num_blocks(&self) -> usize {
        self.cols() / self.block_len
    }

    /// `R = L / d` when `d` divides `L`.
    pub fn row_blocks(&self) -> Option<usize> {
        self.rows().is_multiple_of(self.block_len).then(|| self.rows() / self.block_len)
    }

    pub fn require_row_aligned(&self) -> Result<usize> {
        check_block_len(self.rows(), self.block_len, "row count")?;
        Ok(self.rows() / self.block_len)
    }

    /// Columns `[l d, (l + 1) d)`.
    pub fn block(&self, l: usize) -> Result<DMatrixView<'_, Complex64>> {
        if l >= self.num_blocks() {
            return Err(Error::BlockOutOfRange { index: l, count: self.num_blocks() });
        }
        Ok(self.entries.columns(l * self.block_len, self.block_len))
    }

    pub(crate) fn block_owned(&self, l: usize) -> CMat {
        self.entries.columns(l * self.block_len, self.block_len).into_owned()
    }

    /// Horizontal concatenation of the given blocks (in the given order).
    pub fn select_blocks(&self, blocks: &[usize]) -> Result<CMat> {
        let d = self.block_len;
        let mut out = CMat::zeros(self.rows(), blocks.len() * d);
        for (slot, &l) in blocks.iter().enumerate() {
            out.columns_mut(slot * d, d).copy_from(&self.block(l)?);
        }
        Ok(out)
    }

    /// The same matrix re-blocked with `d = 1` (the conventional sparse view).
    pub fn unblocked(&self) -> BlockDictionary {
        BlockDictionary { entries: self.entries.clone(), block_len: 1 }
    }

    pub fn is_real(&self) -> bool {
        linalg::is_real(&self.entries)
    }

    /// True when `D[l]^H D[l] = I` within `tol` for every block.
    pub fn has_orthonormal_blocks(&self, tol: f64) -> bool {
        self.orthonormality_violation(tol).is_none()
    }

    pub(crate) fn orthonormality_violation(&self, tol: f64) -> Option<(usize, f64)> {
        (0..self.num_blocks()).find_map(|l| {
            let dev = linalg::unitary_deviation(&self.block_owned(l));
            (dev > tol).then_some((l, dev))
        })
    }

    pub fn apply(&self, x: &BlockVector) -> Result<CVec> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols()
            )));
        }
        Ok(&self.entries * x.entries())
    }
}

/// A length-`N` vector partitioned into consecutive length-`d` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    entries: CVec,
    block_len: usize,
}

impl BlockVector {
    pub fn new(entries: CVec, block_len: usize) -> Result<Self> {
        check_block_len(entries.len(), block_len, "vector length")?;
        Ok(Self { entries, block_len })
    }

    pub fn from_real(entries: &[f64], block_len: usize) -> Result<Self> {
        Self::new(CVec::from_iterator(entries.len(), entries.iter().map(|&v| Complex64::new(v, 0.0))), block_len)
    }

    pub fn zeros(len: usize, block_len: usize) -> Result<Self> {
        Self::new(CVec::zeros(len), block_len)
    }

    pub fn entries(&self) -> &CVec {
        &self.entries
    }

    pub fn into_entries(self) -> CVec {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn num_blocks(&self) -> usize {
        self.len() / self.block_len
    }

    /// Entries `[l d, (l + 1) d)`.
    pub fn block(&self, l: usize) -> &[Complex64] {
        let d = self.block_len;
        &self.entries.as_slice()[l * d..(l + 1) * d]
    }

    pub fn block_mut(&mut self, l: usize) -> &mut [Complex64] {
        let d = self.block_len;
        &mut self.entries.as_mut_slice()[l * d..(l + 1) * d]
    }

    /// Euclidean norm of each block.
    pub fn block_norms(&self) -> Vec<f64> {
        block_norms(self.entries.as_slice(), self.block_len)
    }

    /// `{l : ||x[l]||_2 > tol}`.
    pub fn block_support(&self, tol: f64) -> BlockSupport {
        let indices = self
            .block_norms()
            .into_iter()
            .enumerate()
            .filter_map(|(l, n)| (n > tol).then_some(l))
            .collect();
        BlockSupport { indices }
    }

    pub fn mixed_norm(&self, p: NormOrder) -> f64 {
        mixed_norm_slice(self.entries.as_slice(), self.block_len, p)
    }

    /// Same entries re-blocked with a different block length.
    pub fn reblock(&self, block_len: usize) -> Result<Self> {
        Self::new(self.entries.clone(), block_len)
    }
}

/// Convenience wrapper matching the free-function form of [`BlockVector::block_support`].
pub fn block_support(x: &BlockVector, tol: f64) -> BlockSupport {
    x.block_support(tol)
}

/// Convenience wrapper for [`BlockDictionary::block`].
pub fn get_block(dict: &BlockDictionary, l: usize) -> Result<CMat> {
    dict.block(l).map(|b| b.into_owned())
}

pub(crate) fn block_norms<T: linalg::Scalar>(x: &[T], block_len: usize) -> Vec<f64> {
    x.chunks(block_len)
        .map(|b| b.iter().map(|v| v.modulus_squared()).sum::<f64>().sqrt())
        .collect()
}

/// Mixed l2/lp norm of a raw slice split into blocks of `block_len`.
pub fn mixed_norm_slice<T: linalg::Scalar>(x: &[T], block_len: usize, p: NormOrder) -> f64 {
    let norms = block_norms(x, block_len);
    match p {
        NormOrder::Zero => norms.iter().filter(|&&n| n != 0.0).count() as f64,
        NormOrder::One => norms.iter().sum(),
        NormOrder::Two => norms.iter().map(|n| n * n).sum::<f64>().sqrt(),
        NormOrder::Inf => norms.iter().cloned().fold(0.0, f64::max),
    }
}

pub fn mixed_norm(x: &BlockVector, p: NormOrder) -> f64 {
    x.mixed_norm(p)
}

/// The `p` in the mixed l2/lp norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormOrder {
    /// Number of nonzero blocks.
    Zero,
    One,
    Two,
    Inf,
}

impl FromStr for NormOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "0" => Ok(NormOrder::Zero),
            "1" => Ok(NormOrder::One),
            "2" => Ok(NormOrder::Two),
            "inf" | "infinity" | "∞" => Ok(NormOrder::Inf),
            other => Err(Error::InvalidArgument(format!("unsupported mixed norm order {other:?}"))),
        }
    }
}

/// Strictly increasing list of block indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BlockSupport {
    indices: Vec<usize>,
}

impl BlockSupport {
    /// Sorts the indices; duplicates are rejected.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("duplicate block index {}", w[0])));
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Block sparsity `k`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, l: usize) -> bool {
        self.indices.binary_search(&l).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.indices.last().copied()
    }

    /// Indices in `0..m` not in the support.
    pub fn complement(&self, m: usize) -> Vec<usize> {
        (0..m).filter(|l| !self.contains(*l)).collect()
    }

    pub fn is_subset_of(&self, other: &BlockSupport) -> bool {
        self.iter().all(|l| other.contains(l))
    }
}

impl fmt::Display for BlockSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// Embeds a real vector.
pub fn complex_vector(values: &[f64]) -> CVec {
    CVec::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0)))
}

pub(crate) fn scatter_blocks<T: linalg::Scalar>(
    n: usize,
    block_len: usize,
    blocks: &[usize],
    coeffs: &DVector<T>,
) -> DVector<T> {
    let mut x = DVector::<T>::zeros(n);
    for (slot, &l) in blocks.iter().enumerate() {
        for j in 0..block_len {
            x[l * block_len + j] = coeffs[slot * block_len + j];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn get_block_of_identity() {
        let d = BlockDictionary::new(CMat::identity(4, 4), 2).unwrap();
        let b = get_block(&d, 1).unwrap();
        assert_eq!(b.nrows(), 4);
        assert_eq!(b.ncols(), 2);
        assert_eq!(b[(2, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(b[(3, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(b[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(get_block(&d, 0).unwrap(), d.entries().columns(0, 2).into_owned());
    }

    #[test]
    fn get_block_out_of_range() {
        let d = BlockDictionary::new(CMat::identity(6, 6), 2).unwrap();
        assert!(matches!(get_block(&d, 3), Err(Error::BlockOutOfRange { index: 3, count: 3 })));
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            BlockDictionary::new(CMat::identity(4, 4), 3),
            Err(Error::BlockMisaligned { .. })
        ));
        assert!(matches!(BlockDictionary::new(CMat::identity(4, 4), 0), Err(Error::ZeroBlockLen)));
        let mut m = CMat::identity(3, 3);
        m[(0, 0)] = Complex64::new(2.0, 0.0);
        assert!(matches!(BlockDictionary::new(m.clone(), 1), Err(Error::NotUnitNorm { column: 0, .. })));
        assert!(BlockDictionary::new_unchecked(m, 1).is_ok());
        // Two identical unit columns inside one block.
        let mut dup = CMat::zeros(3, 2);
        dup[(0, 0)] = Complex64::new(1.0, 0.0);
        dup[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(BlockDictionary::new(dup, 2), Err(Error::RankDeficientBlock { block: 0, .. })));
    }

    #[test]
    fn support_examples() {
        let zero = BlockVector::zeros(8, 2).unwrap();
        assert!(zero.block_support(0.0).is_empty());
        let mut x = BlockVector::zeros(8, 2).unwrap();
        x.block_mut(2)[1] = Complex64::new(0.5, -1.0);
        assert_eq!(x.block_support(0.0).indices(), &[2]);
    }

    #[test]
    fn mixed_norm_examples() {
        let x = BlockVector::from_real(&[3.0, 4.0, 0.0, 0.0], 2).unwrap();
        assert_abs_diff_eq!(x.mixed_norm(NormOrder::One), 5.0);
        assert_abs_diff_eq!(x.mixed_norm(NormOrder::Inf), 5.0);
        assert_eq!(x.mixed_norm(NormOrder::Zero), 1.0);
        let y = BlockVector::from_real(&[3.0, -4.0, 1.0, 0.0], 1).unwrap();
        assert_abs_diff_eq!(y.mixed_norm(NormOrder::One), 8.0);
        assert_abs_diff_eq!(y.mixed_norm(NormOrder::Two), 26f64.sqrt());
        assert_abs_diff_eq!(y.mixed_norm(NormOrder::Inf), 4.0);
        assert_eq!(y.mixed_norm(NormOrder::Zero), 3.0);
        assert!("3".parse::<NormOrder>().is_err());
        assert_eq!("inf".parse::<NormOrder>().unwrap(), NormOrder::Inf);
    }

    #[test]
    fn support_rejects_duplicates() {
        assert!(BlockSupport::new(vec![3, 1, 3]).is_err());
        assert_eq!(BlockSupport::new(vec![3, 1]).unwrap().indices(), &[1, 3]);
    }

    fn block_vec_strategy() -> impl Strategy<Value = BlockVector> {
        (1usize..5, 1usize..8).prop_flat_map(|(d, m)| {
            prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, prop::bool::weighted(0.4)), d * m).prop_map(
                move |vals| {
                    let v = CVec::from_iterator(
                        vals.len(),
                        vals.iter().map(|&(re, im, zero)| if zero { Complex64::new(0.0, 0.0) } else { Complex64::new(re, im) }),
                    );
                    BlockVector::new(v, d).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn norm_chain(x in block_vec_strategy()) {
            let inf = x.mixed_norm(NormOrder::Inf);
            let two = x.mixed_norm(NormOrder::Two);
            let one = x.mixed_norm(NormOrder::One);
            let zero = x.mixed_norm(NormOrder::Zero);
            prop_assert!(inf <= two * (1.0 + 1e-12));
            prop_assert!(two <= one * (1.0 + 1e-12));
            prop_assert!(one <= zero.sqrt() * two * (1.0 + 1e-12) + 1e-15);
            let nnz = x.entries().iter().filter(|z| **z != Complex64::new(0.0, 0.0)).count() as f64;
            prop_assert!(nnz <= x.block_len() as f64 * zero);
            prop_assert_eq!(x.block_support(0.0).len() as f64, zero);
        }

        #[test]
        fn unit_blocks_reduce_to_lp(vals in prop::collection::vec(-5.0f64..5.0, 1..12)) {
            let x = BlockVector::from_real(&vals, 1).unwrap();
            let l1: f64 = vals.iter().map(|v| v.abs()).sum();
            let l2: f64 = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((x.mixed_norm(NormOrder::One) - l1).abs() < 1e-12);
            prop_assert!((x.mixed_norm(NormOrder::Two) - l2).abs() < 1e-12);
        }

        #[test]
        fn support_round_trip(m in 1usize..10, d in 1usize..4, mask in prop::collection::vec(any::<bool>(), 10)) {
            let mut x = BlockVector::zeros(m * d, d).unwrap();
            let mut expect = Vec::new();
            for l in 0..m {
                if mask[l] {
                    x.block_mut(l)[d - 1] = Complex64::new(1.0 + l as f64, 0.5);
                    expect.push(l);
                }
            }
            let got = x.block_support(0.0);
            prop_assert_eq!(got.indices(), expect.as_slice());
        }
    }
}
