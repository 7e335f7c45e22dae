use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use blocksparse::analysis::{uncertainty_lower_bound, verify_uncertainty};
use blocksparse::blockmat::io;
use blocksparse::coherence::cross_block_coherence;
use blocksparse::dictionaries::{dirac_comb_signal, spike_kron_fourier, unitary_from_spec};
use blocksparse::harness::{audit, run_montecarlo, sweep_thresholds, sweep_to_csv, ExperimentConfig};
use blocksparse::recovery::{bmp, bomp, exhaustive_oracle, lopt, mp, omp, LoptParams, DEFAULT_RES_TOL};
use blocksparse::rng::{rng_from_seed, standard_normal};
use blocksparse::{BlockDictionary, CMat, CVec, Complex64, Error, Result};

#[derive(Parser)]
#[command(name = "blocksparse", version, about = "Block-sparse recovery experiments")]
struct Cli {
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherence metrics and recovery thresholds of a dictionary file.
    Audit {
        file: PathBuf,
        #[arg(long = "block-len", short = 'd')]
        block_len: usize,
    },
    /// Success-rate curves from a key=value experiment file.
    Montecarlo {
        #[arg(long)]
        config: PathBuf,
    },
    /// Block vs conventional thresholds of the spike / Kronecker-Fourier pair.
    Thresholds {
        #[arg(long = "R")]
        r: usize,
        #[arg(long = "d-max")]
        d_max: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover x from y = D x.
    Recover {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// bomp, omp, bmp, mp, lopt, bp or oracle.
        #[arg(long)]
        solver: String,
        /// Block budget (bomp, omp, oracle).
        #[arg(long)]
        k: usize,
        #[arg(long = "block-len", short = 'd', default_value_t = 1)]
        block_len: usize,
        #[arg(long = "res-tol", default_value_t = DEFAULT_RES_TOL)]
        res_tol: f64,
        /// Iteration cap for bmp / mp and lopt / bp.
        #[arg(long = "max-iters")]
        max_iters: Option<usize>,
    },
    /// Uncertainty relation of [I, F (x) U] checked on a Dirac comb.
    Uncertainty {
        #[arg(long = "R")]
        r: usize,
        #[arg(long)]
        d: usize,
        /// identity, haar:<seed> or a matrix file.
        #[arg(long = "U", default_value = "identity")]
        u: String,
        /// Seed for the comb amplitudes.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn recover(dict: PathBuf, y: PathBuf, solver: &str, k: usize, d: usize, res_tol: f64, max_iters: Option<usize>) -> Result<(CVec, String)> {
    let dict = BlockDictionary::new(io::read_matrix(dict)?, d)?;
    let y = io::read_vector(y)?;
    let res = match solver {
        "bomp" => bomp(&dict, &y, k, res_tol)?,
        "omp" => omp(&dict, &y, k, res_tol)?,
        "bmp" => bmp(&dict, &y, max_iters.unwrap_or(1000), res_tol)?,
        "mp" => mp(&dict, &y, max_iters.unwrap_or(1000), res_tol)?,
        "lopt" | "bp" => {
            let mut params = LoptParams::default();
            if let Some(n) = max_iters {
                params.max_iters = n;
            }
            let view = if solver == "bp" { dict.unblocked() } else { dict.clone() };
            lopt(&view, &y, &params)?
        }
        "oracle" => exhaustive_oracle(&dict, &y, k)?,
        other => return Err(Error::InvalidArgument(format!("unknown solver '{other}'"))),
    };
    let summary = format!(
        "support={}\ntermination={}\niterations={}\nresidual={}\n",
        res.support,
        res.termination,
        res.iterations,
        res.final_residual()
    );
    Ok((res.x_hat.into_entries(), summary))
}

fn uncertainty(r: usize, d: usize, u: &str, seed: u64) -> Result<String> {
    let u = unitary_from_spec(u, d)?;
    let (phi, psi, _) = spike_kron_fourier(r, d, &u)?;
    let mu = cross_block_coherence(&phi, &psi)?;
    let bound = uncertainty_lower_bound(&phi, &psi)?;
    let mut text = format!("mu_block={mu}\nsqrt_ab_bound={}\nsum_bound={}\n", bound.geometric, bound.additive);
    let mut rng = rng_from_seed(seed);
    let c = CVec::from_fn(d, |_, _| Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng)));
    match dirac_comb_signal(r, d, &c) {
        Ok(x) => text += &verify_uncertainty(&phi, &psi, x.entries(), 1e-9)?.to_string(),
        Err(_) => text += "comb=undefined\n",
    }
    Ok(text)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Audit { file, block_len } => emit(&cli.out, &audit(file, block_len)?.to_string()),
        Command::Montecarlo { config } => {
            let cfg = ExperimentConfig::from_file(config)?;
            emit(&cli.out, &run_montecarlo(&cfg)?.to_csv())
        }
        Command::Thresholds { r, d_max, samples, seed } => {
            emit(&cli.out, &sweep_to_csv(&sweep_thresholds(r, 1..=d_max, samples, seed)?))
        }
        Command::Recover { dict, y, solver, k, block_len, res_tol, max_iters } => {
            let (x, summary) = recover(dict, y, &solver, k, block_len, res_tol, max_iters)?;
            eprint!("{summary}");
            match &cli.out {
                Some(path) => io::write_vector(path, &x),
                None => io::write_text(std::io::stdout(), &CMat::from_column_slice(x.len(), 1, x.as_slice())),
            }
        }
        Command::Uncertainty { r, d, u, seed } => emit(&cli.out, &uncertainty(r, d, &u, seed)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
