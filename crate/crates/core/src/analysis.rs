//! Closed-form recovery thresholds and bounds.
//!
//! Thresholds are real upper bounds on `k d` (strict). Integer block-sparsity
//! levels are derived separately by [`max_recoverable_k`].

use std::fmt;

use log::warn;

use crate::blockmat::BlockDictionary;
use crate::coherence::{cross_block_coherence, CoherenceReport};
use crate::error::{Error, Result};
use crate::linalg::CVec;

/// Relative slack for the equality flags of [`verify_uncertainty`].
pub const UNCERTAINTY_EQUALITY_TOL: f64 = 1e-9;

fn check_metrics(mu_block: f64, nu: f64, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::ZeroBlockLen);
    }
    if !(mu_block >= 0.0 && mu_block.is_finite()) || !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "coherences must be finite and nonnegative (mu_B = {mu_block}, nu = {nu})"
        )));
    }
    Ok(())
}

/// `(1/mu_B + d - (d - 1) nu / mu_B) / 2`, the strict upper bound on `k d`.
///
/// Returns `+inf` when `mu_B = 0`.
pub fn block_recovery_threshold(mu_block: f64, nu: f64, d: usize) -> Result<f64> {
    check_metrics(mu_block, nu, d)?;
    if mu_block == 0.0 {
        return Ok(f64::INFINITY);
    }
    let d = d as f64;
    Ok((1.0 / mu_block + d - (d - 1.0) * nu / mu_block) / 2.0)
}

/// `(1/mu + 1) / 2`, the conventional-sparsity threshold on `k`.
pub fn conventional_threshold(mu: f64) -> Result<f64> {
    block_recovery_threshold(mu, 0.0, 1)
}

/// Largest `k` with `k d` strictly below [`block_recovery_threshold`], capped
/// at `cap` (typically the number of blocks). An unbounded threshold yields `cap`.
pub fn max_recoverable_k(mu_block: f64, nu: f64, d: usize, cap: usize) -> Result<usize> {
    let bound = block_recovery_threshold(mu_block, nu, d)?;
    if bound.is_infinite() {
        return Ok(cap);
    }
    if bound <= 0.0 {
        return Ok(0);
    }
    let mut k = (bound / d as f64).ceil() as usize;
    while k > 0 && (k * d) as f64 >= bound {
        k -= 1;
    }
    Ok(k.min(cap))
}

/// Lower bounds of the block uncertainty relation for a unitary pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyBound {
    /// `1 / (d mu_B(Phi, Psi))`, bounds `sqrt(A B)`.
    pub geometric: f64,
    /// `2 / (d mu_B(Phi, Psi))`, bounds `A + B`.
    pub additive: f64,
}

pub fn uncertainty_lower_bound(phi: &BlockDictionary, psi: &BlockDictionary) -> Result<UncertaintyBound> {
    let mu = cross_block_coherence(phi, psi)?;
    let geometric = 1.0 / (phi.block_len() as f64 * mu);
    Ok(UncertaintyBound { geometric, additive: 2.0 * geometric })
}

/// Block-sparsity levels of one signal in two bases, and which inequalities hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyCheck {
    /// `||Phi^H x||_{2,0}`.
    pub a: usize,
    /// `||Psi^H x||_{2,0}`.
    pub b: usize,
    pub bound: f64,
    /// `sqrt(A B) >= 1 / (d mu_B)`.
    pub geometric_ok: bool,
    /// `(A + B) / 2 >= sqrt(A B)`.
    pub arithmetic_ok: bool,
    pub geometric_tight: bool,
    pub arithmetic_tight: bool,
    /// Both inequalities hold with equality.
    pub equality: bool,
}

impl fmt::Display for UncertaintyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "A={}", self.a)?;
        writeln!(f, "B={}", self.b)?;
        writeln!(f, "bound={}", self.bound)?;
        writeln!(f, "sqrt_ab={}", ((self.a * self.b) as f64).sqrt())?;
        writeln!(f, "geometric_ok={}", self.geometric_ok)?;
        writeln!(f, "arithmetic_ok={}", self.arithmetic_ok)?;
        writeln!(f, "equality={}", self.equality)
    }
}

/// Expands `x` in both bases and checks the uncertainty relation.
///
/// Blocks with norm `<= tol` count as zero. Equality flags use a relative
/// slack of [`UNCERTAINTY_EQUALITY_TOL`].
pub fn verify_uncertainty(phi: &BlockDictionary, psi: &BlockDictionary, x: &CVec, tol: f64) -> Result<UncertaintyCheck> {
    let bound = uncertainty_lower_bound(phi, psi)?.geometric;
    if x.len() != phi.rows() {
        return Err(Error::DimensionMismatch(format!("signal length {} vs basis size {}", x.len(), phi.rows())));
    }
    if x.iter().all(|v| v.norm_sqr() == 0.0) {
        return Err(Error::InvalidArgument("signal must be nonzero".into()));
    }
    let d = phi.block_len();
    let level = |coef: CVec| -> Result<usize> {
        Ok(crate::blockmat::BlockVector::new(coef, d)?.block_support(tol).len())
    };
    let a = level(phi.entries().ad_mul(x))?;
    let b = level(psi.entries().ad_mul(x))?;
    let eps = UNCERTAINTY_EQUALITY_TOL;
    let gm = ((a * b) as f64).sqrt();
    let am = (a + b) as f64 / 2.0;
    let geometric_ok = gm >= bound * (1.0 - eps);
    let arithmetic_ok = am >= gm * (1.0 - eps);
    let geometric_tight = (gm - bound).abs() <= eps * bound;
    let arithmetic_tight = (am - gm).abs() <= eps * gm;
    Ok(UncertaintyCheck {
        a,
        b,
        bound,
        geometric_ok,
        arithmetic_ok,
        geometric_tight,
        arithmetic_tight,
        equality: geometric_ok && arithmetic_ok && geometric_tight && arithmetic_tight,
    })
}

/// Residual energy contraction per BMP step: `1 - (1 - (k - 1) d mu_B) / k`.
pub fn bmp_decay_factor(k: usize, d: usize, mu_block: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let bound = block_recovery_threshold(mu_block, 0.0, d)?;
    if (k * d) as f64 >= bound {
        warn!("k d = {} is not below (1/mu_B + d)/2 = {bound}; the decay bound does not apply", k * d);
    }
    let (k, d) = (k as f64, d as f64);
    Ok(1.0 - (1.0 - (k - 1.0) * d * mu_block) / k)
}

fn check_m_r(m: usize, r: usize) -> Result<()> {
    if r == 0 || m <= r {
        return Err(Error::InvalidArgument(format!("need M > R >= 1, got M = {m}, R = {r}")));
    }
    Ok(())
}

/// Lower bound on the coherence of `M d` unit vectors in dimension `R d`:
/// `sqrt((M - R) / (R (M d - 1)))`.
pub fn welch_coherence_bound(m: usize, r: usize, d: usize) -> Result<f64> {
    check_m_r(m, r)?;
    if d == 0 {
        return Err(Error::ZeroBlockLen);
    }
    let (m, r, d) = (m as f64, r as f64, d as f64);
    Ok(((m - r) / (r * (m * d - 1.0))).sqrt())
}

/// `R M / (M - R)`: block lengths strictly above this make block recovery on
/// the orthogonalized dictionary beat conventional recovery on the original.
pub fn orthogonalization_gain_min_d(m: usize, r: usize) -> Result<f64> {
    check_m_r(m, r)?;
    let (m, r) = (m as f64, r as f64);
    Ok(r * m / (m - r))
}

/// Block and conventional thresholds for one dictionary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    pub mu: f64,
    pub mu_block: f64,
    pub nu: f64,
    pub d: usize,
    /// Bound on `k d` from the block metrics.
    pub block_threshold_kd: f64,
    /// `(1/mu + 1) / 2`.
    pub conventional_threshold_kd: f64,
    /// `block_threshold_kd / conventional_threshold_kd`; NaN when both are unbounded.
    pub gain: f64,
}

impl ThresholdReport {
    pub const CSV_HEADER: &'static str = "d,mu,mu_block,nu,block_threshold_kd,conventional_threshold_kd,gain";

    pub fn new(mu: f64, mu_block: f64, nu: f64, d: usize) -> Result<Self> {
        let block = block_recovery_threshold(mu_block, nu, d)?;
        let conventional = conventional_threshold(mu)?;
        Ok(Self {
            mu,
            mu_block,
            nu,
            d,
            block_threshold_kd: block,
            conventional_threshold_kd: conventional,
            gain: block / conventional,
        })
    }

    pub fn from_coherence(report: &CoherenceReport, d: usize) -> Result<Self> {
        Self::new(report.mu, report.mu_block, report.sub_coherence, d)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.d,
            fmt_real(self.mu),
            fmt_real(self.mu_block),
            fmt_real(self.nu),
            fmt_real(self.block_threshold_kd),
            fmt_real(self.conventional_threshold_kd),
            fmt_real(self.gain)
        )
    }

    pub fn to_key_value(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ThresholdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "block_threshold_kd={}", fmt_real(self.block_threshold_kd))?;
        writeln!(f, "conventional_threshold_kd={}", fmt_real(self.conventional_threshold_kd))?;
        writeln!(f, "gain={}", fmt_real(self.gain))
    }
}

/// Formats `inf` and `NaN` as `inf` and `undefined`.
pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "undefined".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        v.to_string()
    }
}
