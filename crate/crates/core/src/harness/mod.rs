//! Experiment harness: Monte Carlo success curves, threshold sweeps and
//! dictionary audits. Outputs are CSV or `key=value` text.

mod audit;
mod config;
mod montecarlo;
mod sweep;

pub use audit::{audit, AuditReport};
pub use config::{ExperimentConfig, SolverKind};
pub use montecarlo::{generate_instance, run_montecarlo, run_trial, Anomaly, CurvePoint, Instance, SuccessCurve, TrialOutcome};
pub use sweep::{sweep_thresholds, sweep_to_csv, SweepRow, SWEEP_CSV_HEADER};
