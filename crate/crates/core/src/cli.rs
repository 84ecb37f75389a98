//! Command-line front end.
//!
//! Exit codes: 0 success, 2 config or input error, 3 invalid forecast,
//! 4 termination-bound (cap) violation, 5 I/O failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, LoadedConfig};
use crate::error::Error;
use crate::experiment;

#[derive(Parser)]
#[command(
    name = "calibration-lab",
    version,
    about = "Sequential binary forecasting laboratory: calibration audits, adversarial natures, prefix games, and Monte Carlo self-calibration checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured forecaster against its nature and audit it.
    Run(CommonArgs),
    /// Play the prefix game described by the config's game section.
    Game(GameArgs),
    /// Monte Carlo self-calibration check over predictive samples.
    Mc(McArgs),
    /// Audit a recorded trace file under the config's rules.
    Audit(AuditArgs),
    /// Write the configured nature's outcome sequence.
    Sample(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Output directory; overrides the config's out_dir.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Horizon override.
    #[arg(long, value_name = "N")]
    horizon: Option<u64>,

    /// Suppress per-file progress lines.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct GameArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Round count override.
    #[arg(long, value_name = "N")]
    rounds: Option<u64>,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Run count override.
    #[arg(long, value_name = "N")]
    runs: Option<u64>,

    /// Worker threads for Monte Carlo runs. Reports are identical for
    /// any worker count.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Recorded trace CSV (day,bit,forecast[,discrepancy]).
    #[arg(long, value_name = "PATH")]
    trace: PathBuf,
}

/// Parse arguments, run the selected command, and return the process
/// exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::PrefixParse { .. }
        | Error::TraceFormat { .. }
        | Error::OutcomesExhausted { .. }
        | Error::EmptyMove
        | Error::Json(_) => 2,
        Error::InvalidForecast { .. } | Error::PriorContradicted { .. } => 3,
        Error::CapExceeded { .. } => 4,
        Error::Io { .. } => 5,
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => {
            let (loaded, out) = prepare(&args)?;
            report(experiment::cmd_run(&loaded, &out)?, args.quiet);
            Ok(())
        }
        Command::Sample(args) => {
            let (loaded, out) = prepare(&args)?;
            report(experiment::cmd_sample(&loaded, &out)?, args.quiet);
            Ok(())
        }
        Command::Game(args) => {
            let (mut loaded, out) = prepare(&args.common)?;
            if let Some(rounds) = args.rounds {
                match loaded.config.game.as_mut() {
                    Some(game) => game.rounds = rounds,
                    None => {
                        return Err(Error::config(
                            "the game command needs a \"game\" config section",
                        ))
                    }
                }
                loaded.config.validate(&loaded.base_dir)?;
            }
            report(experiment::cmd_game(&loaded, &out)?, args.common.quiet);
            Ok(())
        }
        Command::Mc(args) => {
            let (mut loaded, out) = prepare(&args.common)?;
            if let Some(runs) = args.runs {
                loaded.config.runs = Some(runs);
                loaded.config.validate(&loaded.base_dir)?;
            }
            let run = || experiment::cmd_mc(&loaded, &out);
            let written = match args.workers {
                Some(workers) => rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| Error::config(format!("worker pool: {e}")))?
                    .install(run),
                None => run(),
            }?;
            report(written, args.common.quiet);
            Ok(())
        }
        Command::Audit(args) => {
            let (loaded, out) = prepare(&args.common)?;
            report(
                experiment::cmd_audit(&loaded, &args.trace, &out)?,
                args.common.quiet,
            );
            Ok(())
        }
    }
}

/// Load the config, apply common overrides, and settle the output
/// directory.
fn prepare(args: &CommonArgs) -> Result<(LoadedConfig, PathBuf), Error> {
    let mut loaded = load_config(&args.config)?;
    if args.seed.is_some() {
        loaded.config.seed = args.seed;
    }
    if let Some(horizon) = args.horizon {
        loaded.config.horizon = horizon;
    }
    if args.seed.is_some() || args.horizon.is_some() {
        loaded.config.validate(&loaded.base_dir)?;
    }
    let out = match (&args.out, &loaded.config.out_dir) {
        (Some(out), _) => out.clone(),
        (None, Some(out)) => loaded.config.resolve(&loaded.base_dir, out),
        (None, None) => {
            return Err(Error::config(
                "an output directory is required: set out_dir in the config or pass --out",
            ))
        }
    };
    Ok((loaded, out))
}

fn report(paths: Vec<PathBuf>, quiet: bool) {
    if !quiet {
        for path in paths {
            println!("wrote {}", path.display());
        }
    }
}
