use std::fmt::Write as _;
use std::time::Instant;

use log::{info, warn};
use rand::seq::index::sample;
use rayon::prelude::*;

use super::config::{ExperimentConfig, SolverKind};
use crate::blockmat::{BlockDictionary, BlockSupport, BlockVector};
use crate::coherence::exact_recovery_certificate;
use crate::dictionaries::{gaussian_dictionary, orthogonalize_blocks, OrthogonalizedPair};
use crate::error::{Error, Result};
use crate::linalg::CVec;
use crate::recovery::{bmp, bomp, lopt, omp, RecoveryResult, Termination};
use crate::rng::{derive_seed, rng_from_seed, standard_normal};
use crate::Complex64;

/// One random problem: `y = D x0` with `x0` block `k`-sparse.
#[derive(Debug, Clone)]
pub struct Instance {
    pub dict: BlockDictionary,
    pub x0: BlockVector,
    pub y: CVec,
    pub support: BlockSupport,
}

/// Draws the instance for `(config.seed, k, trial)`.
///
/// The dictionary is Gaussian with unit-norm columns, the support is uniform
/// over `k`-subsets of the blocks and the nonzero entries are i.i.d. standard
/// normal. The result depends only on the seed, `k` and `trial`.
pub fn generate_instance(config: &ExperimentConfig, k: usize, trial: usize) -> Result<Instance> {
    config.validate()?;
    let (l, n, d) = (config.rows, config.cols, config.block_len);
    let m = config.num_blocks();
    if k * d > l || k > m {
        return Err(Error::Config(format!("k = {k} is outside the admissible range for L = {l}, M = {m}")));
    }
    let base = derive_seed(config.seed, &[k as u64, trial as u64]);
    let dict = gaussian_dictionary(l, n, d, derive_seed(base, &[0]))?;
    let mut rng = rng_from_seed(derive_seed(base, &[1]));
    let mut blocks = sample(&mut rng, m, k).into_vec();
    blocks.sort_unstable();
    let mut x0 = BlockVector::zeros(n, d)?;
    for &b in &blocks {
        for v in x0.block_mut(b) {
            *v = Complex64::new(standard_normal(&mut rng), 0.0);
        }
    }
    let y = dict.apply(&x0)?;
    Ok(Instance { dict, x0, y, support: BlockSupport::new(blocks)? })
}

/// Outcome of one solver on one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub success: bool,
    pub solver_error: bool,
    pub nonconverged: bool,
    pub iterations: usize,
    pub wall_time: f64,
    /// Whether the exact-recovery certificate holds for the solver's dictionary view.
    pub certified: Option<bool>,
}

fn relative_error(x_hat: &BlockVector, x0: &BlockVector) -> f64 {
    let err = (x_hat.entries() - x0.entries()).norm();
    let scale = x0.entries().norm();
    if scale == 0.0 {
        if err == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        err / scale
    }
}

fn run_solver(
    config: &ExperimentConfig,
    solver: SolverKind,
    inst: &Instance,
    k: usize,
    ortho: Option<&OrthogonalizedPair>,
) -> Result<RecoveryResult> {
    let d = config.block_len;
    let dict = match (solver.orthogonalized(), ortho) {
        (true, Some(o)) => &o.a,
        (true, None) => unreachable!("orthogonalized dictionary is prepared for -O solvers"),
        (false, _) => &inst.dict,
    };
    let mut res = match solver {
        SolverKind::Omp => omp(dict, &inst.y, k * d, config.res_tol)?,
        SolverKind::Bomp | SolverKind::BompO => bomp(dict, &inst.y, k, config.res_tol)?,
        SolverKind::Bp => lopt(&dict.unblocked(), &inst.y, &config.lopt)?,
        SolverKind::Lopt | SolverKind::LoptO => lopt(dict, &inst.y, &config.lopt)?,
        SolverKind::Bmp => bmp(dict, &inst.y, config.bmp_max_iters, config.res_tol)?,
    };
    if solver.unblocked() {
        res.x_hat = res.x_hat.reblock(d)?;
    }
    if let Some(o) = ortho.filter(|_| solver.orthogonalized()) {
        res.x_hat = o.apply_w_inv(&res.x_hat)?;
    }
    Ok(res)
}

fn certificate_for(solver: SolverKind, inst: &Instance, ortho: Option<&OrthogonalizedPair>) -> Option<bool> {
    let cert = if solver.unblocked() {
        let d = inst.dict.block_len();
        let atoms = inst.support.iter().flat_map(|b| b * d..(b + 1) * d).collect();
        exact_recovery_certificate(&inst.dict.unblocked(), &BlockSupport::new(atoms).ok()?)
    } else if solver.orthogonalized() {
        exact_recovery_certificate(&ortho?.a, &inst.support)
    } else {
        exact_recovery_certificate(&inst.dict, &inst.support)
    };
    cert.ok().map(|c| c.holds)
}

/// Runs every configured solver on the instance `(k, trial)`.
pub fn run_trial(config: &ExperimentConfig, k: usize, trial: usize) -> Result<Vec<TrialOutcome>> {
    let inst = generate_instance(config, k, trial)?;
    let ortho = if config.solvers.iter().any(|s| s.orthogonalized()) {
        Some(orthogonalize_blocks(&inst.dict)?)
    } else {
        None
    };
    let outcomes = config
        .solvers
        .iter()
        .map(|&solver| {
            let start = Instant::now();
            let res = run_solver(config, solver, &inst, k, ortho.as_ref());
            let wall_time = start.elapsed().as_secs_f64();
            let certified = config.certify.then(|| certificate_for(solver, &inst, ortho.as_ref())).flatten();
            match res {
                Ok(r) => {
                    let nonconverged = solver.convex() && r.termination == Termination::MaxIters;
                    let close = relative_error(&r.x_hat, &inst.x0) <= config.success_rel_tol;
                    TrialOutcome {
                        success: close && !nonconverged,
                        solver_error: false,
                        nonconverged,
                        iterations: r.iterations,
                        wall_time,
                        certified,
                    }
                }
                Err(e) => {
                    warn!("{solver} failed on k = {k}, trial = {trial}: {e}");
                    TrialOutcome {
                        success: false,
                        solver_error: true,
                        nonconverged: false,
                        iterations: 0,
                        wall_time,
                        certified,
                    }
                }
            }
        })
        .collect();
    Ok(outcomes)
}

/// Aggregated statistics for one `(solver, k)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub solver: SolverKind,
    pub k: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub solver_errors: usize,
    pub nonconverged: usize,
    pub mean_iterations: f64,
    pub mean_wall_time: f64,
    pub certified_trials: usize,
    pub certified_successes: usize,
}

/// A success rate that rises with `k` by more than three binomial standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Anomaly {
    pub solver: SolverKind,
    pub k_low: usize,
    pub k_high: usize,
    pub rate_low: f64,
    pub rate_high: f64,
    pub sigma: f64,
}

/// Success rate versus block-sparsity level, one point per `(solver, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessCurve {
    /// Ordered by solver (config order), then `k`.
    pub points: Vec<CurvePoint>,
    pub certify: bool,
    pub timing: bool,
}

impl SuccessCurve {
    pub fn point(&self, solver: SolverKind, k: usize) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.solver == solver && p.k == k)
    }

    pub fn rate(&self, solver: SolverKind, k: usize) -> Option<f64> {
        self.point(solver, k).map(|p| p.success_rate)
    }

    pub fn solver_points(&self, solver: SolverKind) -> impl Iterator<Item = &CurvePoint> {
        self.points.iter().filter(move |p| p.solver == solver)
    }

    pub fn csv_header(&self) -> String {
        let mut h = String::from("solver,k,trials,successes,success_rate,solver_errors,nonconverged,mean_iterations");
        if self.certify {
            h += ",certified_trials,certified_successes";
        }
        if self.timing {
            h += ",mean_wall_time_s";
        }
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header();
        out.push('\n');
        for p in &self.points {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{}",
                p.solver, p.k, p.trials, p.successes, p.success_rate, p.solver_errors, p.nonconverged, p.mean_iterations
            );
            if self.certify {
                let _ = write!(out, ",{},{}", p.certified_trials, p.certified_successes);
            }
            if self.timing {
                let _ = write!(out, ",{:.6}", p.mean_wall_time);
            }
            out.push('\n');
        }
        out
    }

    /// Consecutive `k` where the success rate increases by more than `3 sigma`,
    /// with `sigma` the pooled binomial standard error of the difference.
    pub fn anomalies(&self) -> Vec<Anomaly> {
        let mut found = Vec::new();
        let mut solvers: Vec<SolverKind> = self.points.iter().map(|p| p.solver).collect();
        solvers.dedup();
        for solver in solvers {
            let pts: Vec<_> = self.solver_points(solver).collect();
            for w in pts.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let (n1, n2) = (lo.trials as f64, hi.trials as f64);
                let pooled = (lo.successes + hi.successes) as f64 / (n1 + n2);
                let sigma = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
                if hi.success_rate - lo.success_rate > 3.0 * sigma {
                    found.push(Anomaly {
                        solver,
                        k_low: lo.k,
                        k_high: hi.k,
                        rate_low: lo.success_rate,
                        rate_high: hi.success_rate,
                        sigma,
                    });
                }
            }
        }
        found
    }
}

fn aggregate(config: &ExperimentConfig, outcomes: &[(usize, Vec<TrialOutcome>)]) -> SuccessCurve {
    let mut points = Vec::new();
    for (si, &solver) in config.solvers.iter().enumerate() {
        for k in config.k_values() {
            let mut p = CurvePoint {
                solver,
                k,
                trials: 0,
                successes: 0,
                success_rate: 0.0,
                solver_errors: 0,
                nonconverged: 0,
                mean_iterations: 0.0,
                mean_wall_time: 0.0,
                certified_trials: 0,
                certified_successes: 0,
            };
            let mut iter_sum = 0usize;
            let mut time_sum = 0.0;
            for (_, o) in outcomes.iter().filter(|(kk, _)| *kk == k) {
                let o = o[si];
                p.trials += 1;
                p.successes += o.success as usize;
                p.solver_errors += o.solver_error as usize;
                p.nonconverged += o.nonconverged as usize;
                iter_sum += o.iterations;
                time_sum += o.wall_time;
                if o.certified == Some(true) {
                    p.certified_trials += 1;
                    p.certified_successes += o.success as usize;
                }
            }
            p.success_rate = p.successes as f64 / p.trials as f64;
            p.mean_iterations = iter_sum as f64 / p.trials as f64;
            p.mean_wall_time = time_sum / p.trials as f64;
            points.push(p);
        }
    }
    SuccessCurve { points, certify: config.certify, timing: config.timing }
}

/// Runs all trials of `config` and aggregates a [`SuccessCurve`].
///
/// Trials run on a rayon pool (`config.threads` workers, or the global pool).
/// Every trial draws from its own seed and results are reduced in
/// `(k, trial)` order, so the curve does not depend on the thread count.
/// Solver errors count as failures and are tallied in `solver_errors`.
pub fn run_montecarlo(config: &ExperimentConfig) -> Result<SuccessCurve> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .k_values()
        .flat_map(|k| (0..config.trials).map(move |t| (k, t)))
        .collect();
    info!("running {} trials for {} solvers", jobs.len(), config.solvers.len());
    let work = || -> Result<Vec<(usize, Vec<TrialOutcome>)>> {
        jobs.par_iter()
            .map(|&(k, t)| run_trial(config, k, t).map(|o| (k, o)))
            .collect()
    };
    let outcomes = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let curve = aggregate(config, &outcomes);
    for a in curve.anomalies() {
        warn!(
            "{}: success rate rises from {:.3} at k = {} to {:.3} at k = {} (> 3 sigma = {:.3})",
            a.solver,
            a.rate_low,
            a.k_low,
            a.rate_high,
            a.k_high,
            3.0 * a.sigma
        );
    }
    Ok(curve)
}
