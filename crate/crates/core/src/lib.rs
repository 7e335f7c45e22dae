//! Block-sparse signal recovery.
//!
//! The crate covers the block-sparsity model (blocked dictionaries, block
//! vectors, mixed norms), coherence metrics and blocked matrix norms, the
//! greedy block solvers BOMP and BMP, a mixed l2/l1 convex solver, exact
//! recovery certificates, closed-form recovery thresholds, and a seeded Monte
//! Carlo harness that produces success-rate curves as CSV.
//!
//! All scalars are complex (`Complex64`). Real inputs are embedded with zero
//! imaginary part; solvers detect real data and run a real-arithmetic kernel.

pub mod analysis;
pub mod blockmat;
pub mod coherence;
pub mod dictionaries;
mod error;
pub mod harness;
pub mod linalg;
pub mod recovery;
pub mod rng;

pub use blockmat::{BlockDictionary, BlockSupport, BlockVector, NormOrder};
pub use error::{Error, Result};
pub use linalg::{CMat, CVec};
pub use num_complex::Complex64;
pub use recovery::{RecoveryResult, Termination};
