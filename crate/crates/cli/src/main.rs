use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;

use commands::Workspace;
use config::RunConfig;
use error::CliError;

/// Nonlocal competition with a free-boundary invader.
#[derive(Parser)]
#[command(name = "nlcomp", version)]
struct Cli {
    /// TOML configuration; defaults apply when omitted.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set model.mu=2.5`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output root; falls back to $NLCOMP_OUT, then the current directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the free-boundary system and classify the outcome.
    Simulate,
    /// Principal eigenvalue on intervals of the configured lengths.
    Eigen,
    /// Critical lengths for the configured levels.
    Lsigma,
    /// Spreading speeds of both species.
    Speed,
    /// Semi-wave profile and speed of the invader.
    Semiwave,
    /// Bisect for the critical front-expansion coefficient.
    Mustar,
    /// Run a named scenario template and check its expectations.
    Scenario { name: Option<String> },
    /// Repeat `simulate` over values of one configuration key.
    Sweep,
}

fn execute(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let cfg = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    let root = cli
        .out
        .clone()
        .or_else(|| std::env::var_os("NLCOMP_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let ws = Workspace::create(&root, &cfg)?;
    log::info!("writing to {}", ws.dir.display());
    match &cli.command {
        Command::Simulate => commands::simulate(&cfg, &ws),
        Command::Eigen => commands::eigen(&cfg, &ws),
        Command::Lsigma => commands::lsigma(&cfg, &ws),
        Command::Speed => commands::speed(&cfg, &ws),
        Command::Semiwave => commands::semiwave_cmd(&cfg, &ws),
        Command::Mustar => commands::mustar(&cfg, &ws),
        Command::Scenario { name } => commands::scenario(&cfg, name.as_deref(), &ws),
        Command::Sweep => commands::sweep(&cfg, &ws),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(2)
        }
    }
}
