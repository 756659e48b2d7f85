use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kdmod::{run, Command, RunOptions};

#[derive(Parser)]
#[command(
    name = "kdmod",
    version,
    about = "Quantum modulation of an electron current by a standing and a traveling wave"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Print derived parameters and regime flags as a TOML manifest.
    Derive(Common),
    /// Integrate the sideband amplitudes along the interaction region.
    Evolve(Common),
    /// Tabulate monochromatic and velocity-averaged current modulation.
    Current(Common),
    /// Evaluate the modulation depth at the end of the interaction region
    /// for every value of `sweep.values`.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV output; the manifest is written next to it with a `.manifest`
    /// extension.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed for the Monte-Carlo cross-check of the velocity average.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Sub::Derive(c) => (Command::Derive, c),
        Sub::Evolve(c) => (Command::Evolve, c),
        Sub::Current(c) => (Command::Current, c),
        Sub::Sweep(c) => (Command::Sweep, c),
    };
    let opts = RunOptions {
        output: common.output,
        jobs: common.jobs,
        seed: common.seed,
    };
    match run(command, &common.config, &opts) {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
