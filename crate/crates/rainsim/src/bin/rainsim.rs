//! Thin command-line front end over [`rainsim::cli`].

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use rainsim::cli::{self, RolloutArgs, TrainArgs, ValidateArgs};

#[derive(Parser)]
#[command(
    name = "rainsim",
    version,
    about = "Radio propagation in rain and learned UAV trajectory design",
    after_help = "CONFIG accepts a TOML path or a bundled scenario name \
                  (fig3_validation, toy20, sevenbs_rain25). Output goes to \
                  --out, $RAINSIM_OUT_DIR, or ./rainsim_out. Exit codes: \
                  0 ok, 2 configuration, 3 numerical, 4 artifact mismatch."
)]
struct Cli {
    /// Config file path or bundled scenario name.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Seed override (takes precedence over the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare solver rain attenuation against the ITU-R power law.
    Validate {
        /// Rain rate override, mm/h.
        #[arg(long)]
        rain_rate: Option<f64>,
        /// Comma-separated frequency list, GHz.
        #[arg(long, value_delimiter = ',')]
        frequencies: Option<Vec<f64>>,
        /// Relative-error tolerance per frequency (1.0 disables the gate).
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Build and persist the RSS/SIR map for the configured scenario.
    Map,
    /// Train a trajectory policy against a persisted map.
    Train {
        /// Map container produced by `map`.
        #[arg(long)]
        map: PathBuf,
        /// Episode-count override.
        #[arg(long)]
        episodes: Option<usize>,
        /// Proceed despite a medium-digest mismatch.
        #[arg(long)]
        force: bool,
    },
    /// Greedy rollouts from explicit starts.
    Plan {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        map: PathBuf,
        /// Start position "x,y" in metres; repeatable.
        #[arg(long)]
        start: Vec<String>,
        #[arg(long)]
        force: bool,
    },
    /// Rollout statistics over many starts, with optional baseline row.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        map: PathBuf,
        /// Number of random starts (defaults to the config).
        #[arg(long)]
        starts: Option<usize>,
        /// Include the shortest-path baseline row.
        #[arg(long)]
        baseline: Option<bool>,
        #[arg(long)]
        force: bool,
    },
}

fn parse_start(text: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("start '{text}' is not of the form x,y"));
    }
    let x = parts[0].trim().parse().map_err(|e| format!("start '{text}': {e}"))?;
    let y = parts[1].trim().parse().map_err(|e| format!("start '{text}': {e}"))?;
    Ok([x, y])
}

fn run(cli: Cli) -> Result<(), cli::CliError> {
    let config = cli::load_config(cli.config.as_deref(), cli.seed)?;
    let out_dir = cli::resolve_out_dir(cli.out);
    match cli.command {
        Command::Validate { rain_rate, frequencies, tolerance } => {
            let args = ValidateArgs {
                rain_rate_mm_h: rain_rate,
                frequencies_ghz: frequencies,
                tolerance,
            };
            cli::cmd_validate(&config, &args, &out_dir)
        }
        Command::Map => cli::cmd_map(&config, &out_dir).map(|_| ()),
        Command::Train { map, episodes, force } => {
            let args = TrainArgs { map, episodes, force };
            cli::cmd_train(&config, &args, &out_dir).map(|_| ())
        }
        Command::Plan { checkpoint, map, start, force } => {
            let mut starts = Vec::with_capacity(start.len());
            for s in &start {
                starts.push(parse_start(s).map_err(cli::CliError::Config)?);
            }
            let args = RolloutArgs { checkpoint, map, starts, force, ..Default::default() };
            cli::cmd_plan(&config, &args, &out_dir)
        }
        Command::Eval { checkpoint, map, starts, baseline, force } => {
            let args = RolloutArgs {
                checkpoint,
                map,
                n_starts: starts,
                baseline,
                force,
                ..Default::default()
            };
            cli::cmd_eval(&config, &args, &out_dir).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
