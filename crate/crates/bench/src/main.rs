use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use qbnb::Algorithm;
use qbnb_bench::report::RunSpec;
use qbnb_bench::{bounds, compare, report, BenchError};

#[derive(Parser)]
#[command(name = "qbnb", version, about = "Quasi branch-and-bound global minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize one catalog function with one algorithm.
    Solve {
        #[arg(long)]
        function: String,
        /// Dimension (rastrigin only; others are fixed).
        #[arg(long)]
        dim: Option<usize>,
        /// lipschitz, lipgrad, alphabb, qbnb2, cqbnb2, qbnb3 or qbnb23.
        #[arg(long)]
        algo: Algorithm,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        /// Seconds.
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        /// Seed of the random function families.
        #[arg(long)]
        seed: Option<u64>,
        /// Per-generation CSV output.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// JSON result output; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Run a benchmark table described by a TOML or JSON config.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interval Lipschitz bound of an expression, with a grid cross-check.
    Bounds {
        /// Infix expression in x1, x2, ...
        #[arg(long)]
        expr: String,
        /// lo,hi pairs, e.g. "-1,1;0,2".
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        order: u8,
    },
}

fn run(cli: Cli) -> Result<i32, BenchError> {
    match cli.command {
        Command::Solve {
            function,
            dim,
            algo,
            eps,
            time_limit,
            seed,
            stats,
            out,
            parallel,
        } => {
            if !(time_limit > 0.0 && time_limit.is_finite()) {
                return Err(BenchError::Config(format!(
                    "time limit must be positive, got {time_limit}"
                )));
            }
            let spec = RunSpec {
                dim,
                seed,
                parallel,
                time_limit: Some(Duration::from_secs_f64(time_limit)),
                ..RunSpec::new(&function, algo, eps)
            };
            report::cmd_solve(&spec, stats.as_deref(), out.as_deref())
        }
        Command::Compare { config, out } => compare::cmd_compare(&config, &out),
        Command::Bounds {
            expr,
            domain,
            order,
        } => bounds::cmd_bounds(&expr, &domain, order),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
