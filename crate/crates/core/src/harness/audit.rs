use std::fmt;
use std::path::Path;

use crate::analysis::{fmt_real, max_recoverable_k, orthogonalization_gain_min_d, welch_coherence_bound, ThresholdReport};
use crate::blockmat::{io, BlockDictionary};
use crate::coherence::CoherenceReport;
use crate::error::Result;

/// Everything `audit` prints for one dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub rows: usize,
    pub cols: usize,
    pub block_len: usize,
    pub coherence: CoherenceReport,
    pub thresholds: ThresholdReport,
    pub max_k: usize,
    /// `None` unless `d | L` and `M > R`.
    pub welch_bound: Option<f64>,
    pub orthogonalization_min_d: Option<f64>,
}

impl AuditReport {
    pub fn compute(dict: &BlockDictionary) -> Result<Self> {
        let d = dict.block_len();
        let coherence = CoherenceReport::compute(dict)?;
        let thresholds = ThresholdReport::from_coherence(&coherence, d)?;
        let m = dict.num_blocks();
        let cap = m.min(dict.rows() / d);
        let max_k = max_recoverable_k(coherence.mu_block, coherence.sub_coherence, d, cap)?;
        let (welch_bound, orthogonalization_min_d) = match dict.row_blocks() {
            Some(r) if m > r && r > 0 => (
                Some(welch_coherence_bound(m, r, d)?),
                Some(orthogonalization_gain_min_d(m, r)?),
            ),
            _ => (None, None),
        };
        Ok(Self {
            rows: dict.rows(),
            cols: dict.cols(),
            block_len: d,
            coherence,
            thresholds,
            max_k,
            welch_bound,
            orthogonalization_min_d,
        })
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), fmt_real);
        writeln!(f, "L={}", self.rows)?;
        writeln!(f, "N={}", self.cols)?;
        writeln!(f, "d={}", self.block_len)?;
        write!(f, "{}", self.coherence)?;
        write!(f, "{}", self.thresholds)?;
        writeln!(f, "max_k={}", self.max_k)?;
        writeln!(f, "welch_bound={}", opt(self.welch_bound))?;
        writeln!(f, "orthogonalization_min_d={}", opt(self.orthogonalization_min_d))
    }
}

/// Loads a dictionary file, validates it with block length `d` and audits it.
pub fn audit(path: impl AsRef<Path>, d: usize) -> Result<AuditReport> {
    let entries = io::read_matrix(path)?;
    let dict = BlockDictionary::new(entries, d)?;
    AuditReport::compute(&dict)
}
