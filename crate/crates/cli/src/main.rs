use std::path::PathBuf;
use std::process::ExitCode;

use burgers_lab_cli::{catalog, run, RunOptions};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "burgers-lab", version, about = "Forced viscous Burgers experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward solve with trajectory output.
    Simulate(Common),
    /// Pullback diameters of a seed bundle.
    Pullback(Common),
    /// Exponential rate of the difference of two solutions.
    Rate(Common),
    /// Duality identity and dual maximum principles.
    AdjointCheck(Common),
    /// Energy-estimate certificates along a trajectory.
    Certify(Common),
    /// Observed orders on a manufactured solution.
    Converge(Common),
    /// Mean-free reduction and reconstruction.
    Roundtrip(Common),
    /// Print the registered scenarios.
    ListScenarios,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file.
    #[arg(long, env = "BURGERS_LAB_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long, env = "BURGERS_LAB_OUT")]
    out: Option<PathBuf>,
    /// RNG seed, overriding `seed`.
    #[arg(long, env = "BURGERS_LAB_SEED")]
    seed: Option<u64>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, env = "BURGERS_LAB_THREADS")]
    threads: Option<usize>,
}

impl From<Common> for RunOptions {
    fn from(c: Common) -> Self {
        RunOptions {
            config: c.config,
            out: c.out,
            seed: c.seed,
            threads: c.threads,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Command::ListScenarios => {
            print!("{}", catalog());
            return ExitCode::SUCCESS;
        }
        Command::Simulate(c) => ("simulate", c),
        Command::Pullback(c) => ("pullback", c),
        Command::Rate(c) => ("rate", c),
        Command::AdjointCheck(c) => ("adjoint-check", c),
        Command::Certify(c) => ("certify", c),
        Command::Converge(c) => ("converge", c),
        Command::Roundtrip(c) => ("roundtrip", c),
    };
    match run(command, &common.into()) {
        Ok(summary) => {
            println!("{}: wrote {}", summary.scenario, summary.dir.display());
            for name in summary.outcome.failures() {
                eprintln!("check failed: {name}");
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
