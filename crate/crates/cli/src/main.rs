use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nlsgraph_cli::commands::{self, CheckKind, NumericsOptions};
use nlsgraph_cli::selftest;

/// Ground states of the constrained NLS energy on non-compact metric graphs.
#[derive(Parser)]
#[command(name = "nlsgraph", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct NumericsArgs {
    /// Grid spacing (default: adapted to the profile width at the run's mass)
    #[arg(long)]
    h: Option<f64>,
    /// Half-line truncation length (default: profile decays below 1e-12)
    #[arg(long = "L")]
    truncation: Option<f64>,
    /// Flow time step (default: 0.4 h^2)
    #[arg(long)]
    tau: Option<f64>,
    /// Iteration cap per flow run
    #[arg(long)]
    max_iters: Option<usize>,
    /// Seed for the random-noise start
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative gap tolerance for the threshold classification
    #[arg(long, default_value_t = 1e-4)]
    gap_tol: f64,
}

impl NumericsArgs {
    fn into_options(self) -> NumericsOptions {
        NumericsOptions {
            h: self.h,
            truncation: self.truncation,
            tau: self.tau,
            max_iters: self.max_iters,
            seed: self.seed,
            gap_tol: self.gap_tol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the energy at one mass and print the report
    Solve {
        /// Graph/potential spec file (TOML)
        #[arg(long)]
        spec: PathBuf,
        /// Nonlinearity power, 2 < p < 6
        #[arg(long)]
        p: f64,
        /// Mass constraint
        #[arg(long)]
        mu: f64,
        /// Write the minimizer profile as edge_id,coordinate,value rows
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        numerics: NumericsArgs,
    },
    /// Scan a mass range on a log grid and emit CSV rows
    ScanMass {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        mu_min: f64,
        #[arg(long)]
        mu_max: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        numerics: NumericsArgs,
    },
    /// Structured checks: candidate constructions, nonexistence ratios,
    /// trail condition, fork window
    Check {
        #[arg(long, value_enum)]
        which: CheckKind,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Fork size (synthesizes the graph instead of --spec)
        #[arg(long)]
        n: Option<usize>,
        /// Fork edge length
        #[arg(long)]
        l: Option<f64>,
        /// Fork monomial half-exponent (potential is x^(2k))
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[command(flatten)]
        numerics: NumericsArgs,
    },
    /// Run the fast verification battery
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Solve {
            spec,
            p,
            mu,
            dump,
            numerics,
        } => {
            let opts = numerics.into_options();
            match commands::cmd_solve(&spec, p, mu, &opts, dump.as_ref(), &mut out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e),
            }
        }
        Command::ScanMass {
            spec,
            p,
            mu_min,
            mu_max,
            steps,
            numerics,
        } => {
            let opts = numerics.into_options();
            let mut run = || -> anyhow::Result<()> {
                let problem = commands::load_problem(&spec)?;
                let outcome = commands::scan_mass(
                    &problem.graph,
                    &problem.potential_spec,
                    p,
                    mu_min,
                    mu_max,
                    steps,
                    &opts,
                )?;
                commands::write_scan_csv(&mut out, &outcome, p, &opts)?;
                Ok(())
            };
            match run() {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e),
            }
        }
        Command::Check {
            which,
            spec,
            p,
            mu,
            epsilon,
            n,
            l,
            k,
            numerics,
        } => {
            let opts = numerics.into_options();
            let nfork = match (n, l) {
                (Some(n), Some(l)) => Some((n, l, k)),
                (None, None) => None,
                _ => {
                    eprintln!("error: --n and --l must be given together");
                    return ExitCode::from(2);
                }
            };
            match commands::cmd_check(which, spec.as_ref(), p, mu, epsilon, nfork, &opts, &mut out)
            {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e),
            }
        }
        Command::Selftest => {
            let (results, elapsed) = selftest::run_selftest();
            let mut all_ok = true;
            println!("{:<28} {:<6} detail", "check", "state");
            for r in &results {
                all_ok &= r.passed;
                println!(
                    "{:<28} {:<6} {}",
                    r.name,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.detail
                );
            }
            println!("elapsed: {elapsed:.1} s");
            if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Spec/flag problems exit with code 2; everything else completed runs.
fn fail(e: anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(2)
}
