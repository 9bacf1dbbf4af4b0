//! Command implementations behind the `rainsim` binary.
//!
//! Five subcommands: `validate` (solver vs ITU-R table), `map` (build and
//! persist the RSS/SIR map), `train` (learn a policy against a map), `plan`
//! (greedy rollouts from chosen starts), and `eval` (rollout statistics over
//! many starts, optionally with the shortest-path baseline). Every command
//! is a pure function of (config file, seed) and writes byte-identical
//! artifacts on repeated runs.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 artifact/digest mismatch.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::agent::{self, AgentError};
use crate::env::{Environment, UavState};
use crate::medium::MediumError;
use crate::pwe::PweError;
use crate::radiomap::{self, MapError, RssMap, SirMap};
use crate::scenario::{ConfigError, RunConfig};
use crate::validation::{self, ValidationError};

/// Exit code for configuration problems.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failures (including tolerance gates).
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit code for artifact problems (digest mismatch, corrupt container).
pub const EXIT_ARTIFACT: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("artifact error: {0}")]
    Artifact(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Artifact(_) => EXIT_ARTIFACT,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<MediumError> for CliError {
    fn from(e: MediumError) -> Self {
        match e {
            MediumError::Domain(m) => CliError::Config(m),
            MediumError::Numerical(m) => CliError::Numerical(m),
        }
    }
}

impl From<PweError> for CliError {
    fn from(e: PweError) -> Self {
        match e {
            PweError::Config(m) => CliError::Config(m),
            PweError::Numerical(m) => CliError::Numerical(m),
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        match e {
            ValidationError::Domain(m) => CliError::Config(m),
            ValidationError::Medium(m) => m.into(),
            ValidationError::Pwe(m) => m.into(),
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::Config(m) | MapError::Domain(m) => CliError::Config(m),
            MapError::Format(m) => CliError::Artifact(m),
            MapError::Io(m) => CliError::Config(format!("io: {m}")),
            MapError::Medium(m) => m.into(),
            MapError::Pwe(m) => m.into(),
        }
    }
}

impl From<crate::env::EnvError> for CliError {
    fn from(e: crate::env::EnvError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<AgentError> for CliError {
    fn from(e: AgentError) -> Self {
        match e {
            AgentError::Numerical(m) => CliError::Numerical(m),
            AgentError::Format(m) => CliError::Artifact(m),
            AgentError::Io(m) => CliError::Config(format!("io: {m}")),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Output directory resolution: `--out` flag, then `RAINSIM_OUT_DIR`, then
/// `./rainsim_out`.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("RAINSIM_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("rainsim_out"))
}

/// Load a config (path or bundled name; `None` means built-in defaults) and
/// apply the seed override.
pub fn load_config(config: Option<&str>, seed: Option<u64>) -> Result<RunConfig> {
    let mut config = match config {
        Some(c) => RunConfig::load(c)?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create output directory {dir:?}: {e}")))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {path:?}: {e}")))
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

/// Overrides for the `validate` command.
#[derive(Debug, Default, Clone)]
pub struct ValidateArgs {
    pub rain_rate_mm_h: Option<f64>,
    pub frequencies_ghz: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
}

/// Run the solver-vs-reference sweep, write `validation.csv`, and gate on
/// the per-frequency tolerance.
pub fn cmd_validate(config: &RunConfig, args: &ValidateArgs, out_dir: &Path) -> Result<()> {
    let mut v = config.validation.clone();
    if let Some(rr) = args.rain_rate_mm_h {
        v.rain_rate_mm_h = rr;
    }
    if let Some(freqs) = &args.frequencies_ghz {
        v.frequencies_ghz = freqs.clone();
    }
    let tolerance = args.tolerance.unwrap_or(v.tolerance);
    ensure_dir(out_dir)?;
    let rows = validation::compare_models(v.rain_rate_mm_h, &v.frequencies_ghz, &v.pwe_settings())?;

    let mut csv = String::from("frequency_ghz,itu_db_km,pwe_db_km,rel_err\n");
    println!("rain rate {} mm/h, tolerance {tolerance}", v.rain_rate_mm_h);
    println!("{:>9} {:>12} {:>12} {:>9}", "f (GHz)", "ITU (dB/km)", "PWE (dB/km)", "rel err");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            row.frequency_ghz, row.itu_db_km, row.pwe_db_km, row.relative_error
        );
        println!(
            "{:>9} {:>12.4} {:>12.4} {:>9.3}",
            row.frequency_ghz, row.itu_db_km, row.pwe_db_km, row.relative_error
        );
    }
    write_file(&out_dir.join("validation.csv"), &csv)?;
    let worst = rows.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    if rows.iter().any(|r| !r.relative_error.is_finite() || r.relative_error > tolerance) {
        return Err(CliError::Numerical(format!(
            "solver-vs-reference disagreement: worst relative error {worst:.3} \
             exceeds tolerance {tolerance}"
        )));
    }
    println!("all {} frequencies within tolerance (worst {worst:.3})", rows.len());
    Ok(())
}

// ---------------------------------------------------------------------------
// map
// ---------------------------------------------------------------------------

/// Build the RSS map for the configured scenario, persist it, and print SIR
/// summary statistics.
pub fn cmd_map(config: &RunConfig, out_dir: &Path) -> Result<PathBuf> {
    config.scenario.validate()?;
    ensure_dir(out_dir)?;
    let rss = radiomap::build_rss_map(&config.scenario)?;
    let sir = SirMap::from_rss(&rss)?;
    let path = out_dir.join("map.rmap");
    radiomap::save_map(&rss, &path)?;
    let (min, mean, max) = sir.sir_stats_db();
    println!(
        "map {}x{} nodes, {} sources, altitude {} m",
        rss.meta.nx, rss.meta.ny, rss.meta.n_sources, rss.meta.altitude_m
    );
    println!("SIR dB: min {min:.1}, mean {mean:.1}, max {max:.1}");
    println!("mean RSS {:.3e}", rss.mean_rss());
    println!("medium digest {:016x}", rss.meta.medium_digest);
    println!("wrote {}", path.display());
    Ok(path)
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

/// Overrides for the `train` command.
#[derive(Debug, Default, Clone)]
pub struct TrainArgs {
    pub map: PathBuf,
    pub episodes: Option<usize>,
    /// Accept a map whose medium digest disagrees with the configuration.
    pub force: bool,
}

fn load_map_checked(config: &RunConfig, path: &Path, force: bool) -> Result<RssMap> {
    let rss = radiomap::load_map(path)?;
    let expected = config.scenario.medium_digest();
    if rss.meta.medium_digest != expected {
        let msg = format!(
            "map {} was built under medium digest {:016x} but the configuration \
             prescribes {expected:016x}",
            path.display(),
            rss.meta.medium_digest
        );
        if force {
            eprintln!("warning: {msg} (continuing under --force)");
        } else {
            return Err(CliError::Artifact(msg));
        }
    }
    Ok(rss)
}

/// Train a policy against a persisted map and write the checkpoint plus the
/// per-episode training log.
pub fn cmd_train(config: &RunConfig, args: &TrainArgs, out_dir: &Path) -> Result<PathBuf> {
    let mut train_config = config.training_with_seed();
    if let Some(episodes) = args.episodes {
        train_config.episodes = episodes;
    }
    train_config.validate()?;
    config.episode.validate()?;
    let rss = load_map_checked(config, &args.map, args.force)?;
    let sir = SirMap::from_rss(&rss)?;
    let env = Environment::new(config.episode, &sir)?;
    ensure_dir(out_dir)?;

    let (net, log) = agent::train(&env, &train_config)?;

    let checkpoint = out_dir.join("checkpoint.json");
    agent::save_checkpoint(
        &checkpoint,
        &net,
        &train_config,
        config.digest(),
        rss.meta.scenario_digest,
    )?;
    let mut csv = String::from("episode,return,moving_avg_return,epsilon,steps\n");
    for line in &log {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            line.episode, line.return_value, line.moving_avg_return, line.epsilon, line.steps
        );
    }
    write_file(&out_dir.join("training_log.csv"), &csv)?;
    if let Some(last) = log.last() {
        println!(
            "trained {} episodes; final moving-average return {:.1}, epsilon {:.4}",
            log.len(),
            last.moving_avg_return,
            last.epsilon
        );
    } else {
        println!("trained 0 episodes (empty log)");
    }
    println!("wrote {}", checkpoint.display());
    Ok(checkpoint)
}

// ---------------------------------------------------------------------------
// plan / eval
// ---------------------------------------------------------------------------

/// Arguments shared by `plan` and `eval`.
#[derive(Debug, Default, Clone)]
pub struct RolloutArgs {
    pub checkpoint: PathBuf,
    pub map: PathBuf,
    /// Explicit start positions (plan); falls back to the config list or
    /// seeded random starts.
    pub starts: Vec<[f64; 2]>,
    pub n_starts: Option<usize>,
    pub baseline: Option<bool>,
    pub force: bool,
}

struct RolloutSetup {
    net: agent::DuelingNetwork,
    rss: RssMap,
}

fn rollout_setup(config: &RunConfig, args: &RolloutArgs) -> Result<RolloutSetup> {
    let rss = load_map_checked(config, &args.map, args.force)?;
    let (net, _, _, map_digest) = agent::load_checkpoint(&args.checkpoint)?;
    if map_digest != rss.meta.scenario_digest {
        let msg = format!(
            "checkpoint {} was trained against scenario digest {map_digest:016x} but the \
             map carries {:016x}",
            args.checkpoint.display(),
            rss.meta.scenario_digest
        );
        if args.force {
            eprintln!("warning: {msg} (continuing under --force)");
        } else {
            return Err(CliError::Artifact(msg));
        }
    }
    Ok(RolloutSetup { net, rss })
}

fn evaluation_starts(
    config: &RunConfig,
    args: &RolloutArgs,
    env: &Environment,
) -> Vec<UavState> {
    if !args.starts.is_empty() {
        return args.starts.iter().map(|s| UavState { x_m: s[0], y_m: s[1] }).collect();
    }
    if !config.evaluation.start_list.is_empty() {
        return config
            .evaluation
            .start_list
            .iter()
            .map(|s| UavState { x_m: s[0], y_m: s[1] })
            .collect();
    }
    let n = args.n_starts.unwrap_or(config.evaluation.starts);
    let mut rng = crate::rng::Rng::new(config.seed).fork(0x5747_5254); // eval sub-stream
    (0..n).map(|_| env.reset(&mut rng)).collect()
}

fn trajectory_csv(trajectory: &agent::Trajectory) -> String {
    let mut csv = String::from("step,x_m,y_m,sir_db,association\n");
    for (step, state) in trajectory.states.iter().enumerate() {
        let sir = trajectory.sir_db[step].map_or(String::new(), |v| v.to_string());
        let assoc = trajectory.associations[step].map_or(String::new(), |a| a.to_string());
        let _ = writeln!(csv, "{},{},{},{},{}", step, state.x_m, state.y_m, sir, assoc);
    }
    csv
}

/// Greedy rollouts from explicit starts; one trajectory CSV per start.
pub fn cmd_plan(config: &RunConfig, args: &RolloutArgs, out_dir: &Path) -> Result<()> {
    config.episode.validate()?;
    let setup = rollout_setup(config, args)?;
    let sir = SirMap::from_rss(&setup.rss)?;
    let env = Environment::new(config.episode, &sir)?;
    ensure_dir(out_dir)?;
    let starts = evaluation_starts(config, args, &env);
    if starts.is_empty() {
        return Err(CliError::Config("no start positions for plan".into()));
    }
    for (i, start) in starts.iter().enumerate() {
        if !env.contains(start) {
            return Err(CliError::Config(format!(
                "start ({}, {}) outside the map footprint",
                start.x_m, start.y_m
            )));
        }
        let trajectory = agent::plan(&setup.net, &env, *start)?;
        let path = out_dir.join(format!("trajectory_{i:03}.csv"));
        write_file(&path, &trajectory_csv(&trajectory))?;
        println!(
            "start ({:.0}, {:.0}): {} steps, terminal {:?}, wrote {}",
            start.x_m,
            start.y_m,
            trajectory.n_steps(),
            trajectory.terminal,
            path.display()
        );
    }
    Ok(())
}

/// Aggregate rollout metrics over one policy.
#[derive(Debug, Clone, Copy)]
pub struct EvalSummary {
    pub success_rate: f64,
    pub mean_length: f64,
    pub mean_sir_db: f64,
    pub mean_violations: f64,
}

fn summarize(
    env: &Environment,
    paths: &[Vec<UavState>],
    reached: &[bool],
) -> Result<EvalSummary> {
    let n = paths.len() as f64;
    let mut lengths = 0.0;
    let mut sir_sum = 0.0;
    let mut violations = 0.0;
    let mut successes = 0.0;
    for (path, ok) in paths.iter().zip(reached) {
        let metrics = env.evaluate_path(path)?;
        lengths += metrics.n_steps as f64;
        sir_sum += metrics.mean_sir_db;
        violations += metrics.violations as f64;
        if *ok {
            successes += 1.0;
        }
    }
    Ok(EvalSummary {
        success_rate: successes / n,
        mean_length: lengths / n,
        mean_sir_db: sir_sum / n,
        mean_violations: violations / n,
    })
}

/// Evaluate a checkpoint over many starts: writes per-start trajectories
/// and `metrics.csv` (learned policy plus optional baseline row).
pub fn cmd_eval(config: &RunConfig, args: &RolloutArgs, out_dir: &Path) -> Result<EvalSummary> {
    config.episode.validate()?;
    let setup = rollout_setup(config, args)?;
    let sir = SirMap::from_rss(&setup.rss)?;
    let env = Environment::new(config.episode, &sir)?;
    ensure_dir(out_dir)?;
    let starts = evaluation_starts(config, args, &env);
    if starts.is_empty() {
        return Err(CliError::Config("no start positions for eval".into()));
    }
    let traj_dir = out_dir.join("trajectories");
    ensure_dir(&traj_dir)?;

    let mut paths = Vec::with_capacity(starts.len());
    let mut reached = Vec::with_capacity(starts.len());
    for (i, start) in starts.iter().enumerate() {
        let trajectory = agent::plan(&setup.net, &env, *start)?;
        write_file(
            &traj_dir.join(format!("trajectory_{i:03}.csv")),
            &trajectory_csv(&trajectory),
        )?;
        reached.push(trajectory.reached_destination());
        paths.push(trajectory.states);
    }
    let learned = summarize(&env, &paths, &reached)?;

    let mut csv = String::from(
        "policy,starts,success_rate,mean_length,mean_sir_db,mean_sir_min_violations\n",
    );
    let _ = writeln!(
        csv,
        "learned,{},{},{},{},{}",
        starts.len(),
        learned.success_rate,
        learned.mean_length,
        learned.mean_sir_db,
        learned.mean_violations
    );
    if args.baseline.unwrap_or(config.evaluation.baseline) {
        let baseline_paths: Vec<Vec<UavState>> =
            starts.iter().map(|s| env.shortest_path_baseline(*s)).collect();
        let baseline_reached: Vec<bool> = baseline_paths
            .iter()
            .map(|p| {
                p.last()
                    .map(|q| q.distance_to(env.config.destination_m) < env.config.d_tol_m)
                    .unwrap_or(false)
            })
            .collect();
        let baseline = summarize(&env, &baseline_paths, &baseline_reached)?;
        let _ = writeln!(
            csv,
            "baseline,{},{},{},{},{}",
            starts.len(),
            baseline.success_rate,
            baseline.mean_length,
            baseline.mean_sir_db,
            baseline.mean_violations
        );
    }
    write_file(&out_dir.join("metrics.csv"), &csv)?;
    println!(
        "evaluated {} starts: success {:.1}%, mean length {:.1}, mean SIR {:.2} dB",
        starts.len(),
        100.0 * learned.success_rate,
        learned.mean_length,
        learned.mean_sir_db
    );
    Ok(learned)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_dir_resolution_precedence() {
        let flag = resolve_out_dir(Some(PathBuf::from("/tmp/explicit")));
        assert_eq!(flag, PathBuf::from("/tmp/explicit"));
        // Without the flag we fall back to the env var or the default; both
        // are exercised through the binary-level tests.
        let fallback = resolve_out_dir(None);
        assert!(!fallback.as_os_str().is_empty());
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Numerical("x".into()).exit_code(), 3);
        assert_eq!(CliError::Artifact("x".into()).exit_code(), 4);
    }

    #[test]
    fn map_error_classification() {
        let e: CliError = MapError::Format("bad".into()).into();
        assert_eq!(e.exit_code(), EXIT_ARTIFACT);
        let e: CliError = MapError::Config("bad".into()).into();
        assert_eq!(e.exit_code(), EXIT_CONFIG);
        let e: CliError = MediumError::Numerical("bad".into()).into();
        assert_eq!(e.exit_code(), EXIT_NUMERICAL);
    }
}
