use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use etcsim_cli::run::{certify_cmd, reproduce, simulate_cmd};
use etcsim_cli::{parse_config, CliError, CliResult, RunConfig};

#[derive(Parser)]
#[command(name = "etcsim", version, about = "Event-triggered control of modal truncations: simulation and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configured closed loop and write CSV and metrics files.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Evaluate every applicable certificate and write them as JSON.
    Certify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Exit with status 3 if any certificate is NotCertified.
        #[arg(long)]
        strict: bool,
    },
    /// Regenerate one of the case-study figures or tables.
    Reproduce {
        /// fig1, fig2, fig3, zeno_shift, zeno_heat or certs
        name: String,
        #[arg(long)]
        outdir: PathBuf,
    },
}

fn load(path: &PathBuf) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    parse_config(&text)
}

fn init_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("ETCSIM_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Invalid(format!("ETCSIM_THREADS: expected a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(format!("ETCSIM_THREADS: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.command {
        Command::Simulate { config, outdir } => {
            let m = simulate_cmd(&load(&config)?, &outdir)?;
            println!("T_s = {:.6}, updates = {}, events = {}", m.settling_time, m.updates, m.events);
        }
        Command::Certify { config, out, strict } => {
            let reports = certify_cmd(&load(&config)?, &out, strict)?;
            for r in &reports {
                println!("{}: {}", r.name, r.verdict.name());
            }
        }
        Command::Reproduce { name, outdir } => reproduce(&name, &outdir)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
