//! `kac`: kernel tables, simulations and diagnostics as reproducible commands.
//!
//! Exit codes: 0 success, 1 usage, 2 numerical failure, 3 verification failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kac_spectral::littlewood_paley::Exponent;
use kac_spectral::verify::SUITES;
use kac_spectral::Error;

use config::{Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "kac", version = output::VERSION, about = "Spectral experiments for the non-cutoff Kac equation")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed of the rough initial datum.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Singularity exponent of the cross section, in (0, 1).
    #[arg(long, global = true, allow_negative_numbers = true)]
    s: Option<f64>,
    /// Final time.
    #[arg(long = "T", global = true, allow_negative_numbers = true)]
    t_final: Option<f64>,
    /// Time step.
    #[arg(long, global = true, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues λ_k against their large-k asymptote.
    Eig {
        #[arg(long, default_value_t = 16)]
        k_max: usize,
    },
    /// Collision coefficient tables (λ_n and α_{k,l}) as CSV.
    Coeff {
        #[arg(long, default_value_t = 16)]
        k_max: usize,
        #[arg(long, default_value_t = 16)]
        l_max: usize,
    },
    /// Table coefficients against the Fourier-side quadrature.
    BobylevCheck {
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Time evolution with snapshot dumps.
    Simulate,
    /// Picard iteration with contraction ratios.
    Picard {
        #[arg(long, default_value_t = 8)]
        max_iters: usize,
        /// Damping rate of the seed iterate, in [0, 1].
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Datum amplitude; tuned by bisection when absent.
        #[arg(long)]
        amplitude: Option<f64>,
    },
    /// Decay-exponent fits and the weighted-norm monitor along a run.
    SmoothingFit,
    /// Exact Kolmogorov solution checks at the configured s.
    KolmogorovCheck,
    /// Littlewood-Paley profile and Besov norm of a state.
    Besov {
        /// Snapshot CSV (n, j, re, im); the configured datum when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        sigma: f64,
        /// Sequence exponent: 1, 2 or inf.
        #[arg(long, default_value = "1")]
        r: Exponent,
    },
    /// Acceptance suites with JSON verdicts.
    Verify {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        /// Cached kernel tables (as written by `coeff`).
        #[arg(long)]
        tables: Option<PathBuf>,
    },
}

const USAGE: u8 = 1;
const NUMERICAL: u8 = 2;
const VERIFICATION: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    }
    let overrides = Overrides {
        s: cli.s,
        t_final: cli.t_final,
        dt: cli.dt,
        seed: cli.seed,
        out: cli.out.clone(),
    };
    let outcome = RunConfig::load(cli.config.as_deref(), &overrides).and_then(|cfg| match &cli.command {
        Command::Eig { k_max } => commands::eig(&cfg, *k_max),
        Command::Coeff { k_max, l_max } => commands::coeff(&cfg, *k_max, *l_max),
        Command::BobylevCheck { k_max, tol } => commands::bobylev_check(&cfg, *k_max, *tol),
        Command::Simulate => commands::simulate(&cfg),
        Command::Picard {
            max_iters,
            delta,
            amplitude,
        } => commands::picard(&cfg, *max_iters, *delta, *amplitude),
        Command::SmoothingFit => commands::smoothing_fit(&cfg),
        Command::KolmogorovCheck => commands::kolmogorov_check(&cfg),
        Command::Besov { input, sigma, r } => commands::besov(&cfg, input.as_deref(), *sigma, *r),
        Command::Verify { suite, tables } => commands::verify(&cfg, suite, tables.as_deref()),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VERIFICATION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        NUMERICAL
    } else {
        USAGE
    }
}
