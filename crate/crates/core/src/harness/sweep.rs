use std::fmt::Write as _;

use crate::analysis::{conventional_threshold, fmt_real};
use crate::dictionaries::random_unitary;
use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Thresholds for the spike / Kronecker-Fourier pair at one block length.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub d: usize,
    /// `d (sqrt R + 1) / 2`, the block threshold on `k d`.
    pub block_threshold_kd: f64,
    /// `(sqrt R + 1) / 2`: conventional threshold with `U_d = I`.
    pub conventional_identity: f64,
    /// Conventional threshold averaged over Haar-random `U_d`.
    pub conventional_haar_mean: f64,
    /// `block_threshold_kd / conventional_identity`.
    pub ratio: f64,
}

pub const SWEEP_CSV_HEADER: &str = "d,block_threshold_kd,conventional_threshold_identity,conventional_threshold_haar_mean,ratio";

/// Coherence of `[I, F (x) U]`: the largest entry of `F (x) U` in modulus,
/// `max |U_ij| / sqrt R`. Returned as `sqrt R / max |U_ij|` to keep `U = I` exact.
fn inverse_coherence(r: usize, u_max: f64) -> f64 {
    (r as f64).sqrt() / u_max
}

/// Block and conventional recovery thresholds for `d` in `d_values`.
///
/// The conventional threshold `(1/mu + 1)/2` depends on `U_d`; it is reported
/// at `U_d = I` and averaged over `samples` Haar-random unitaries seeded from
/// `(seed, d, sample)`.
pub fn sweep_thresholds(r: usize, d_values: impl IntoIterator<Item = usize>, samples: usize, seed: u64) -> Result<Vec<SweepRow>> {
    if r == 0 {
        return Err(Error::InvalidArgument("R must be positive".into()));
    }
    let root = (r as f64).sqrt();
    let mut rows = Vec::new();
    for d in d_values {
        if d == 0 {
            return Err(Error::ZeroBlockLen);
        }
        let conventional_identity = (inverse_coherence(r, 1.0) + 1.0) / 2.0;
        let mut sum = 0.0;
        for s in 0..samples {
            let u = random_unitary(d, derive_seed(seed, &[d as u64, s as u64]));
            let u_max = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
            sum += conventional_threshold(1.0 / inverse_coherence(r, u_max))?;
        }
        let block_threshold_kd = d as f64 * (root + 1.0) / 2.0;
        rows.push(SweepRow {
            d,
            block_threshold_kd,
            conventional_identity,
            conventional_haar_mean: if samples == 0 { f64::NAN } else { sum / samples as f64 },
            ratio: block_threshold_kd / conventional_identity,
        });
    }
    Ok(rows)
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.d,
            fmt_real(row.block_threshold_kd),
            fmt_real(row.conventional_identity),
            fmt_real(row.conventional_haar_mean),
            fmt_real(row.ratio)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r10_rows() {
        let rows = sweep_thresholds(10, 1..=12, 20, 3).unwrap();
        let base = (10f64.sqrt() + 1.0) / 2.0;
        for row in &rows {
            assert_eq!(row.conventional_identity, base);
            assert_eq!(row.block_threshold_kd, row.d as f64 * base);
            assert_eq!(row.ratio, row.d as f64);
            // Haar unitaries have max |U_ij| <= 1, so the mean threshold is no lower.
            assert!(row.conventional_haar_mean >= base - 1e-12);
        }
        assert!((rows[3].block_threshold_kd - 8.32).abs() < 5e-3);
        assert!((rows[0].conventional_identity - 2.08).abs() < 5e-3);
        // d = 1: U is a unit-modulus scalar, so everything coincides.
        assert!((rows[0].conventional_haar_mean - rows[0].block_threshold_kd).abs() < 1e-12);
    }

    #[test]
    fn csv_and_errors() {
        let rows = sweep_thresholds(4, [1, 2], 0, 0).unwrap();
        let csv = sweep_to_csv(&rows);
        assert_eq!(csv.lines().next().unwrap(), SWEEP_CSV_HEADER);
        assert_eq!(csv.lines().nth(2).unwrap(), "2,3,1.5,undefined,2");
        assert!(sweep_thresholds(0, [1], 1, 0).is_err());
        assert!(sweep_thresholds(4, [0], 1, 0).is_err());
    }
}
