use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use robust_moss_cli::{commands, CliError};

#[derive(Parser)]
#[command(
    name = "robust-moss",
    version,
    about = "Heavy-tailed bandit experiments with Robust MOSS"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write CSV files and a plot.
    Run {
        config: PathBuf,
        /// Output directory (defaults to the config's `output`, then ./results).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the batch.
        #[arg(long, env = "RMOSS_THREADS")]
        threads: Option<usize>,
    },
    /// Print the regret bounds for the configured problem.
    Bounds { config: PathBuf },
    /// Check the tuning condition eta*psi(2*eta/a) >= 2*a.
    Validate {
        #[arg(long = "a")]
        a: f64,
        #[arg(long)]
        eta: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            threads,
        } => commands::run(&config, out.as_deref(), threads).map(|o| {
            println!("wrote {}", o.aggregate.display());
            if let Some(runs) = o.runs {
                println!("wrote {}", runs.display());
            }
            println!("wrote {}", o.plot.display());
            true
        }),
        Command::Bounds { config } => {
            commands::bounds(&config, std::io::stdout().lock()).map(|_| true)
        }
        Command::Validate { a, eta } => {
            commands::validate(a, eta, std::io::stdout().lock()).map(|r| r.holds)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}
