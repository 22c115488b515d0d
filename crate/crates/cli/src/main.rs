use clap::{Args, Parser, Subcommand};
use marketdyn_cli::commands::{self, CliError, Outcome, RunOptions};
use marketdyn_cli::config::{parse_config, Format};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "marketdyn", version, about = "Simulate and audit buyer-seller market dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one orbit and write it as CSV or JSON.
    Simulate(Common),
    /// Evaluate a grid over alpha and g.a.
    Sweep(Common),
    /// Run the configured audits on a fresh or stored orbit.
    Audit(Common),
    /// Classify the synchronized point and compute the normal-form margin.
    Stability(Common),
    /// Check the hypotheses on f and g.
    Validate(Common),
    /// Search for a periodic orbit of the two-seller skew map.
    FindPeriodic(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let (run, common): (fn(&_, &_) -> _, Common) = match cli.command {
        Command::Simulate(c) => (commands::run_simulate, c),
        Command::Sweep(c) => (commands::run_sweep, c),
        Command::Audit(c) => (commands::run_audit, c),
        Command::Stability(c) => (commands::run_stability, c),
        Command::Validate(c) => (commands::run_validate, c),
        Command::FindPeriodic(c) => (commands::run_find_periodic, c),
    };
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", common.config.display())))?;
    let cfg = parse_config(&text)?;
    let opts = RunOptions {
        out: common.out,
        seed: common.seed,
        threads: common.threads,
        format: common.format.as_deref().and_then(Format::parse),
        base: common.config.parent().map(PathBuf::from).unwrap_or_default(),
    };
    run(&cfg, &opts)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(o) => {
            println!("{}", o.summary);
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(o.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
