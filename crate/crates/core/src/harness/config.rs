use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::recovery::{LoptParams, DEFAULT_RES_TOL};

/// Solvers available to the Monte Carlo runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    /// OMP on the `d = 1` view, `k d` atoms.
    Omp,
    Bomp,
    /// BOMP on the block-orthogonalized dictionary.
    BompO,
    /// Mixed l2/l1 solver on the `d = 1` view.
    Bp,
    Lopt,
    LoptO,
    /// BMP on the block-orthogonalized dictionary.
    Bmp,
}

impl SolverKind {
    pub const ALL: [SolverKind; 7] = [
        SolverKind::Omp,
        SolverKind::Bomp,
        SolverKind::BompO,
        SolverKind::Bp,
        SolverKind::Lopt,
        SolverKind::LoptO,
        SolverKind::Bmp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Omp => "omp",
            SolverKind::Bomp => "bomp",
            SolverKind::BompO => "bomp_o",
            SolverKind::Bp => "bp",
            SolverKind::Lopt => "lopt",
            SolverKind::LoptO => "lopt_o",
            SolverKind::Bmp => "bmp",
        }
    }

    /// Runs on the orthogonalized dictionary and maps back through `W^{-1}`.
    pub fn orthogonalized(&self) -> bool {
        matches!(self, SolverKind::BompO | SolverKind::LoptO | SolverKind::Bmp)
    }

    /// Works on the `d = 1` view of the dictionary.
    pub fn unblocked(&self) -> bool {
        matches!(self, SolverKind::Omp | SolverKind::Bp)
    }

    /// Iterative convex solver whose iteration cap signals non-convergence.
    pub fn convex(&self) -> bool {
        matches!(self, SolverKind::Bp | SolverKind::Lopt | SolverKind::LoptO)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown solver '{s}' (expected one of omp, bomp, bomp_o, bp, lopt, lopt_o, bmp)")))
    }
}

/// Monte Carlo experiment description.
///
/// Parsed from flat `key = value` text; `#` starts a comment. Keys:
///
/// | key | meaning | default |
/// |-----|---------|---------|
/// | `L`, `N`, `d` | dimensions | required |
/// | `solvers` | comma-separated solver names | required |
/// | `k_range` | `a..b` inclusive, or `k_min` / `k_max` | required |
/// | `trials` | trials per `k` | required |
/// | `seed` | base seed | `0` |
/// | `success_rel_tol` | relative l2 error for success | `1e-3` |
/// | `threads` | worker threads (0 = all cores) | `0` |
/// | `res_tol` | greedy relative residual tolerance | `1e-12` |
/// | `bmp.max_iters` | BMP iteration cap | `500` |
/// | `lopt.penalty`, `lopt.max_iters`, `lopt.primal_tol`, `lopt.dual_tol` | L-OPT parameters | library defaults |
/// | `certify` | add certificate columns | `false` |
/// | `timing` | add a wall-time column | `false` |
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub rows: usize,
    pub cols: usize,
    pub block_len: usize,
    pub solvers: Vec<SolverKind>,
    pub k_min: usize,
    pub k_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub success_rel_tol: f64,
    /// `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub res_tol: f64,
    pub bmp_max_iters: usize,
    pub lopt: LoptParams,
    pub certify: bool,
    /// Wall time varies run to run, so it is off by default to keep CSV output reproducible.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(rows: usize, cols: usize, block_len: usize, solvers: Vec<SolverKind>, k_min: usize, k_max: usize, trials: usize) -> Self {
        Self {
            rows,
            cols,
            block_len,
            solvers,
            k_min,
            k_max,
            trials,
            seed: 0,
            success_rel_tol: 1e-3,
            threads: None,
            res_tol: DEFAULT_RES_TOL,
            bmp_max_iters: 500,
            lopt: LoptParams::default(),
            certify: false,
            timing: false,
        }
    }

    /// Gaussian `40 x 400`, `d = 4`, OMP vs BOMP vs BOMP-O, `k = 1..10`.
    pub fn greedy_comparison(trials: usize) -> Self {
        Self::new(40, 400, 4, vec![SolverKind::Omp, SolverKind::Bomp, SolverKind::BompO], 1, 10, trials)
    }

    /// Gaussian `40 x 400`, `d = 4`, BP vs L-OPT vs L-OPT-O vs BOMP-O, `k = 1..10`.
    pub fn convex_comparison(trials: usize) -> Self {
        Self::new(
            40,
            400,
            4,
            vec![SolverKind::Bp, SolverKind::Lopt, SolverKind::LoptO, SolverKind::BompO],
            1,
            10,
            trials,
        )
    }

    pub fn num_blocks(&self) -> usize {
        self.cols / self.block_len
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.rows == 0 || self.cols == 0 {
            return bad("L and N must be positive".into());
        }
        if self.block_len == 0 || !self.cols.is_multiple_of(self.block_len) {
            return bad(format!("d = {} must be positive and divide N = {}", self.block_len, self.cols));
        }
        if self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        if self.k_min > self.k_max {
            return bad(format!("empty k range {}..{}", self.k_min, self.k_max));
        }
        if self.k_max * self.block_len > self.rows {
            return bad(format!(
                "k_max * d = {} exceeds L = {}",
                self.k_max * self.block_len,
                self.rows
            ));
        }
        if self.k_max > self.num_blocks() {
            return bad(format!("k_max = {} exceeds M = {}", self.k_max, self.num_blocks()));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.success_rel_tol >= 0.0) || !(self.res_tol.is_finite()) {
            return bad("tolerances must be finite and nonnegative".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if self.solvers.iter().any(|s| s.orthogonalized()) && self.rows < self.block_len {
            return bad(format!("orthogonalized solvers need L >= d (L = {}, d = {})", self.rows, self.block_len));
        }
        self.lopt.validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn k_values(&self) -> std::ops::RangeInclusive<usize> {
        self.k_min..=self.k_max
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    /// Flat `key = value` rendering accepted by [`FromStr`].
    pub fn to_key_value(&self) -> String {
        let solvers: Vec<_> = self.solvers.iter().map(|s| s.name()).collect();
        let mut out = format!(
            "L = {}\nN = {}\nd = {}\nsolvers = {}\nk_range = {}..{}\ntrials = {}\nseed = {}\nsuccess_rel_tol = {}\n",
            self.rows,
            self.cols,
            self.block_len,
            solvers.join(","),
            self.k_min,
            self.k_max,
            self.trials,
            self.seed,
            self.success_rel_tol
        );
        out += &format!("threads = {}\n", self.threads.unwrap_or(0));
        out += &format!("res_tol = {}\nbmp.max_iters = {}\n", self.res_tol, self.bmp_max_iters);
        out += &format!(
            "lopt.penalty = {}\nlopt.max_iters = {}\nlopt.primal_tol = {}\nlopt.dual_tol = {}\n",
            self.lopt.penalty, self.lopt.max_iters, self.lopt.primal_tol, self.lopt.dual_tol
        );
        out += &format!("certify = {}\ntiming = {}\n", self.certify, self.timing);
        out
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: invalid value '{value}' for {key}")))
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("line {line}: invalid boolean '{value}' for {key}"))),
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::new(0, 0, 0, Vec::new(), 0, 0, 0);
        let (mut have_l, mut have_n, mut have_d, mut have_k, mut have_trials) = (false, false, false, false, false);
        let (mut k_min, mut k_max) = (None, None);
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line_no}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "L" => {
                    cfg.rows = parse_value(key, value, line_no)?;
                    have_l = true;
                }
                "N" => {
                    cfg.cols = parse_value(key, value, line_no)?;
                    have_n = true;
                }
                "d" => {
                    cfg.block_len = parse_value(key, value, line_no)?;
                    have_d = true;
                }
                "solvers" => {
                    cfg.solvers = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?;
                }
                "k_range" => {
                    let (a, b) = value
                        .split_once("..")
                        .ok_or_else(|| Error::Config(format!("line {line_no}: k_range must look like a..b")))?;
                    let b = b.trim_start_matches('=');
                    k_min = Some(parse_value(key, a.trim(), line_no)?);
                    k_max = Some(parse_value(key, b.trim(), line_no)?);
                    have_k = true;
                }
                "k_min" => k_min = Some(parse_value(key, value, line_no)?),
                "k_max" => k_max = Some(parse_value(key, value, line_no)?),
                "trials" => {
                    cfg.trials = parse_value(key, value, line_no)?;
                    have_trials = true;
                }
                "seed" => cfg.seed = parse_value(key, value, line_no)?,
                "success_rel_tol" => cfg.success_rel_tol = parse_value(key, value, line_no)?,
                "threads" => {
                    let t: usize = parse_value(key, value, line_no)?;
                    cfg.threads = (t > 0).then_some(t);
                }
                "res_tol" => cfg.res_tol = parse_value(key, value, line_no)?,
                "bmp.max_iters" => cfg.bmp_max_iters = parse_value(key, value, line_no)?,
                "lopt.penalty" => cfg.lopt.penalty = parse_value(key, value, line_no)?,
                "lopt.max_iters" => cfg.lopt.max_iters = parse_value(key, value, line_no)?,
                "lopt.primal_tol" => cfg.lopt.primal_tol = parse_value(key, value, line_no)?,
                "lopt.dual_tol" => cfg.lopt.dual_tol = parse_value(key, value, line_no)?,
                "certify" => cfg.certify = parse_bool(key, value, line_no)?,
                "timing" => cfg.timing = parse_bool(key, value, line_no)?,
                _ => return Err(Error::Config(format!("line {line_no}: unknown key '{key}'"))),
            }
        }
        match (k_min, k_max) {
            (Some(a), Some(b)) => {
                cfg.k_min = a;
                cfg.k_max = b;
                have_k = true;
            }
            (None, None) => {}
            _ => return Err(Error::Config("k_min and k_max must be given together".into())),
        }
        for (present, key) in [
            (have_l, "L"),
            (have_n, "N"),
            (have_d, "d"),
            (!cfg.solvers.is_empty(), "solvers"),
            (have_k, "k_range"),
            (have_trials, "trials"),
        ] {
            if !present {
                return Err(Error::Config(format!("missing required key '{key}'")));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
