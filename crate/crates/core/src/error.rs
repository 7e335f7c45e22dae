use thiserror::Error;

/// Errors raised by the library. CLI exit codes are derived from
/// [`Error::is_usage`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("block length must be positive")]
    ZeroBlockLen,

    #[error("block length {block_len} does not divide {what} ({len})")]
    BlockMisaligned {
        what: &'static str,
        len: usize,
        block_len: usize,
    },

    #[error("column {column} has norm {norm}, expected 1")]
    NotUnitNorm { column: usize, norm: f64 },

    #[error("block {block} is rank deficient (sigma_min/sigma_max = {ratio:e})")]
    RankDeficientBlock { block: usize, ratio: f64 },

    #[error("block index {index} out of range for {count} blocks")]
    BlockOutOfRange { index: usize, count: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("block {block} does not have orthonormal columns (deviation {deviation:e})")]
    NonOrthonormalBlock { block: usize, deviation: f64 },

    #[error("rank-deficient matrix: {0}")]
    RankDeficient(String),

    #[error("{count} candidate supports exceed the enumeration limit {limit}")]
    TooManySupports { count: u128, limit: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user input (arguments, config, unreadable
    /// files) rather than numerics or validation.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::InvalidArgument(_) | Error::Io(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
