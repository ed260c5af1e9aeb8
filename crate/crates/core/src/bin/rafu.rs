use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rafu::cli::{run_command, Command, CommandArgs};

#[derive(Parser)]
#[command(name = "rafu", version, about = "Hybrid aleatory/epistemic uncertainty propagation")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Study config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "rafu-out")]
    out: PathBuf,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the config and report problems
    Validate(Common),
    /// Derive sample size and evaluation budget; writes plan.json
    Plan(Common),
    /// Run the plan; writes sample.csv and sample.json
    Propagate(Common),
    /// Build p-boxes and the summary from a propagated sample
    Summarize(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Validate(c) => (Command::Validate, c),
        Cmd::Plan(c) => (Command::Plan, c),
        Cmd::Propagate(c) => (Command::Propagate, c),
        Cmd::Summarize(c) => (Command::Summarize, c),
    };
    let args = CommandArgs { config: common.config, out: common.out, seed: common.seed };
    match run_command(command, &args) {
        Ok(output) => {
            print!("{}", output.report);
            for path in output.written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code as u8)
        }
    }
}
