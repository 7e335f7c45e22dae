//! Reference computations used as oracles by the integration tests. They are
//! written directly from the definitions with SVD-based linear algebra and
//! share no code with the library routines they check.

#![allow(dead_code)]

use blocksparse::{BlockDictionary, BlockSupport, CMat, CVec, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, complex: bool) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        if complex { complex_gaussian(rng) } else { Complex64::new(gaussian(rng), 0.0) }
    })
}

pub fn random_vector(rng: &mut ChaCha8Rng, len: usize, complex: bool) -> CVec {
    CVec::from_fn(len, |_, _| if complex { complex_gaussian(rng) } else { Complex64::new(gaussian(rng), 0.0) })
}

pub fn normalize_columns(mut m: CMat) -> CMat {
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        col /= Complex64::new(n, 0.0);
    }
    m
}

/// Largest singular value through a full SVD.
pub fn svd_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.max()
}

pub fn block(a: &CMat, row: usize, col: usize, d: usize) -> CMat {
    a.view((row * d, col * d), (d, d)).into_owned()
}

/// `max_r sum_l rho(A[l, r])` directly from the definition.
pub fn rho_c_oracle(a: &CMat, d: usize) -> f64 {
    let (rb, cb) = (a.nrows() / d, a.ncols() / d);
    (0..cb)
        .map(|r| (0..rb).map(|l| svd_norm(&block(a, l, r, d))).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn rho_r_oracle(a: &CMat, d: usize) -> f64 {
    rho_c_oracle(&a.adjoint(), d)
}

/// `max_{l != r} rho(D[l]^H D[r]) / d`.
pub fn block_coherence_oracle(dict: &CMat, d: usize) -> f64 {
    let m = dict.ncols() / d;
    let mut best = 0.0f64;
    for l in 0..m {
        for r in 0..m {
            if l != r {
                let g = dict.columns(l * d, d).adjoint() * dict.columns(r * d, d);
                best = best.max(svd_norm(&g));
            }
        }
    }
    best / d as f64
}

pub fn coherence_oracle(dict: &CMat) -> f64 {
    let n = dict.ncols();
    let mut best = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                best = best.max(dict.column(i).dotc(&dict.column(j)).norm());
            }
        }
    }
    best
}

/// `rho_c(D0^+ D0bar)` with an SVD pseudo-inverse.
pub fn certificate_oracle(dict: &BlockDictionary, support: &BlockSupport) -> f64 {
    let d = dict.block_len();
    let m = dict.num_blocks();
    let d0 = dict.select_blocks(support.indices()).unwrap();
    let rest = support.complement(m);
    if rest.is_empty() || support.is_empty() {
        return 0.0;
    }
    let d0bar = dict.select_blocks(&rest).unwrap();
    let pinv = d0.pseudo_inverse(1e-12).unwrap();
    rho_c_oracle(&(pinv * d0bar), d)
}

/// `sum_l ||x[l]||_2`.
pub fn l21(x: &[Complex64], d: usize) -> f64 {
    x.chunks(d).map(|b| b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()).sum()
}

/// `max_l ||x[l]||_2`.
pub fn l2inf(x: &[Complex64], d: usize) -> f64 {
    x.chunks(d).map(|b| b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()).fold(0.0, f64::max)
}

pub fn rel_err(a: &CVec, b: &CVec) -> f64 {
    (a - b).norm() / b.norm()
}
