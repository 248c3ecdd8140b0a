use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use urep::cli::{run_file, run_suite, Overrides};

#[derive(Parser)]
#[command(name = "urep", version, about = "Run regularized equilibrium solvers from config files", args_conflicts_with_subcommands = true)]
struct Args {
    #[command(subcommand)]
    command: Option<Command>,
    /// Run every *.conf in this directory concurrently.
    #[arg(long, value_name = "DIR")]
    suite: Option<PathBuf>,
    /// Cross-check the final iterate against the grid oracle.
    #[arg(long, global = true)]
    oracle: bool,
    /// Output directory (overrides output.dir).
    #[arg(long, value_name = "DIR", global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Audit every implicit step against sampled test points.
    #[arg(long, global = true)]
    verify: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single config.
    Run { config: PathBuf },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let ov = Overrides { oracle: args.oracle, out: args.out, seed: args.seed, verify: args.verify };
    let code = match (args.command, args.suite) {
        (Some(Command::Run { config }), _) => run_file(&config, &ov),
        (None, Some(dir)) => run_suite(&dir, &ov),
        (None, None) => {
            eprintln!("usage: urep run <config> | urep --suite <dir>");
            1
        }
    };
    ExitCode::from(code as u8)
}
