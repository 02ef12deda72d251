//! The `apf` command line: runs, campaigns, instance generation, oracle
//! checks, exhaustive exploration and trace rendering.
//!
//! Exit codes: 0 success, 1 oracle divergence, 2 collision or deadlock,
//! 3 timeout or exploration horizon reached, 4 unsolvable instance,
//! 64 malformed input, 74 output failure.

pub mod files;
pub mod render;
pub mod verify;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use apf_grid::config::is_solvable;
use apf_grid::controller::TargetPattern;
use apf_grid::generate;
use apf_grid::oracle::{explore_all_schedules, ExploreOptions, ExploreOutcome};
use apf_grid::sim::{check_move_bound, run_with, Outcome, RunOptions, RunStats, SchedulerPolicy};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use files::{InstanceFile, PatternFile};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_DIVERGENCE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;
pub const EXIT_UNSOLVABLE: i32 = 4;
pub const EXIT_MALFORMED: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("the instance is mirror-symmetric about a horizontal axis with no robot on it; no algorithm can solve it")]
    Unsolvable,
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => EXIT_MALFORMED,
            CliError::Unsolvable => EXIT_UNSOLVABLE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "apf", version, about = "Pattern formation by asynchronous opaque luminous robots on the grid")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one run (or a campaign of seeded runs) and print statistics.
    Run(RunArgs),
    /// Write a random solvable instance and a pattern of the same size.
    Generate(GenerateArgs),
    /// Check the fast geometry against the brute-force oracles.
    Verify(VerifyArgs),
    /// Explore every schedule of a small instance.
    Explore(ExploreArgs),
    /// Draw a trace as a static SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Random,
    Ssync,
    Fsync,
    Laggard,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub pattern: PathBuf,
    #[arg(long, value_enum, default_value_t = PolicyArg::Random)]
    pub policy: PolicyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// An enabled robot is never skipped for more than this many times k events.
    #[arg(long, default_value_t = apf_grid::sim::DEFAULT_FAIRNESS)]
    pub fairness: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_events: u64,
    /// JSONL trace output. In a campaign each run writes `<stem>.<seed>.jsonl`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Also write the statistics report here.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// c in the check total_moves <= c * k * D.
    #[arg(long, default_value_t = 10)]
    pub bound_constant: u64,
    /// Run this many seeds, starting at --seed, in parallel.
    #[arg(long)]
    pub campaign: Option<u64>,
    /// Laggard policy: events between changes of the delayed robot.
    #[arg(long, default_value_t = 40)]
    pub rotation: u64,
    /// Laggard policy: how long the delayed robot's move is held back.
    #[arg(long, default_value_t = 25)]
    pub delay: u64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub robots: usize,
    #[arg(long)]
    pub spread: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instance output; with neither path, both files go to stdout as one object.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub pattern: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Number of random configurations.
    #[arg(short = 'n', long, default_value_t = 10_000)]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub max_robots: usize,
    /// Coordinates are drawn from [-coord, coord].
    #[arg(long, default_value_t = 30)]
    pub coord: i64,
    /// Write the shrunk reproducer of a divergence here.
    #[arg(long)]
    pub reproducer: Option<PathBuf>,
    /// Check a deliberately broken visibility instead (detector self-test).
    #[arg(long, hide = true)]
    pub mutant: bool,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub pattern: PathBuf,
    /// Longest schedule explored, in events.
    #[arg(long, default_value_t = 100_000)]
    pub depth: u64,
    /// JSONL output for the counterexample schedule, if one is found.
    #[arg(long)]
    pub counterexample: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub trace: PathBuf,
    /// Targets to outline over the final positions.
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    /// SVG output; stdout by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn execute(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Generate(a) => cmd_generate(&a).map(|()| EXIT_SUCCESS),
        Command::Verify(a) => cmd_verify(&a),
        Command::Explore(a) => cmd_explore(&a),
        Command::Render(a) => cmd_render(&a).map(|()| EXIT_SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("apf: {e}");
        e.exit_code()
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("plain data serializes");
    writeln!(std::io::stdout(), "{text}").map_err(|e| CliError::Io(format!("stdout: {e}")))
}

/// Instance and pattern, validated for a run.
fn load_problem(instance: &Path, pattern: &Path) -> Result<(InstanceFile, TargetPattern), CliError> {
    let inst: InstanceFile = files::read_json(instance)?;
    let targets = files::read_json::<PatternFile>(pattern)?.pattern()?;
    inst.configuration()?;
    if inst.robots.len() != targets.len() {
        return Err(CliError::Malformed(format!(
            "{} robots but {} targets",
            inst.robots.len(),
            targets.len()
        )));
    }
    if !is_solvable(&inst.robots) {
        return Err(CliError::Unsolvable);
    }
    Ok((inst, targets))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub policy: PolicyArg,
    pub seed: u64,
    #[serde(flatten)]
    pub outcome: Outcome,
    #[serde(flatten)]
    pub stats: RunStats,
    pub move_constant: f64,
    pub bound_constant: u64,
    pub within_bound: bool,
}

impl Serialize for PolicyArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    pub runs: usize,
    pub outcomes: BTreeMap<&'static str, usize>,
    pub max_move_constant: f64,
    pub all_within_bound: bool,
    pub results: Vec<RunReport>,
}

fn policy(a: &RunArgs, seed: u64) -> SchedulerPolicy {
    match a.policy {
        PolicyArg::Random => SchedulerPolicy::RandomAsync(seed),
        PolicyArg::Ssync => SchedulerPolicy::RoundRobinSSync,
        PolicyArg::Fsync => SchedulerPolicy::FSync,
        PolicyArg::Laggard => SchedulerPolicy::LaggardAsync { seed, rotation: a.rotation, delay: a.delay },
    }
}

fn outcome_name(o: &Outcome) -> &'static str {
    match o {
        Outcome::Success => "success",
        Outcome::Collision { .. } => "collision",
        Outcome::Deadlock => "deadlock",
        Outcome::Timeout => "timeout",
    }
}

fn exit_for(outcomes: impl IntoIterator<Item = Outcome>) -> i32 {
    outcomes.into_iter().fold(EXIT_SUCCESS, |code, o| match o {
        Outcome::Collision { .. } | Outcome::Deadlock => EXIT_FAILURE,
        Outcome::Timeout if code == EXIT_SUCCESS => EXIT_TIMEOUT,
        _ => code,
    })
}

fn campaign_trace_path(base: &Path, seed: u64) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "trace".into());
    base.with_file_name(format!("{stem}.{seed}.jsonl"))
}

fn single_run(a: &RunArgs, inst: &InstanceFile, targets: &TargetPattern, seed: u64, trace: Option<PathBuf>) -> Result<RunReport, CliError> {
    let config = inst.configuration()?;
    let options = RunOptions {
        max_events: a.max_events,
        fairness: a.fairness,
        record_trace: trace.is_some(),
        ..RunOptions::default()
    };
    let result = run_with(&config, targets, policy(a, seed), options, |_, _| {})
        .map_err(|e| CliError::Malformed(e.to_string()))?;
    if let Some(path) = trace {
        files::write_trace(&path, &result.trace)?;
    }
    Ok(RunReport {
        policy: a.policy,
        seed,
        outcome: result.outcome,
        stats: result.stats,
        move_constant: result.stats.move_constant(),
        bound_constant: a.bound_constant,
        within_bound: check_move_bound(&result.stats, a.bound_constant),
    })
}

pub fn cmd_run(a: &RunArgs) -> Result<i32, CliError> {
    let (inst, targets) = load_problem(&a.instance, &a.pattern)?;
    let Some(n) = a.campaign else {
        let report = single_run(a, &inst, &targets, a.seed, a.trace.clone())?;
        if let Some(path) = &a.stats {
            files::write_json(path, &report)?;
        }
        print_json(&report)?;
        return Ok(exit_for([report.outcome]));
    };
    let results = (0..n)
        .into_par_iter()
        .map(|i| {
            let seed = a.seed + i;
            single_run(a, &inst, &targets, seed, a.trace.as_deref().map(|t| campaign_trace_path(t, seed)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut outcomes = BTreeMap::new();
    for r in &results {
        *outcomes.entry(outcome_name(&r.outcome)).or_insert(0) += 1;
    }
    let report = CampaignReport {
        runs: results.len(),
        outcomes,
        max_move_constant: results.iter().map(|r| r.move_constant).fold(0.0, f64::max),
        all_within_bound: results.iter().all(|r| r.within_bound),
        results,
    };
    if let Some(path) = &a.stats {
        files::write_json(path, &report)?;
    }
    print_json(&report)?;
    Ok(exit_for(report.results.iter().map(|r| r.outcome)))
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<(), CliError> {
    let (robots, targets) =
        generate::instance(a.robots, a.spread, a.seed).map_err(|e| CliError::Malformed(e.to_string()))?;
    let inst = InstanceFile { robots, chirality: Vec::new() };
    let pat = PatternFile { targets };
    match (&a.instance, &a.pattern) {
        (None, None) => print_json(&serde_json::json!({ "instance": inst, "pattern": pat })),
        (i, p) => {
            if let Some(i) = i {
                files::write_json(i, &inst)?;
            }
            if let Some(p) = p {
                files::write_json(p, &pat)?;
            }
            Ok(())
        }
    }
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<i32, CliError> {
    let geo = if a.mutant { verify::Geometry::mutant() } else { verify::Geometry::default() };
    match verify::run_suite(geo, a.count, a.seed, a.max_robots, a.coord) {
        None => {
            print_json(&serde_json::json!({ "checked": a.count, "divergences": 0 }))?;
            Ok(EXIT_SUCCESS)
        }
        Some(d) => {
            eprintln!("apf: geometry disagrees with the oracle");
            if let Some(path) = &a.reproducer {
                files::write_json(path, &d)?;
            }
            print_json(&d)?;
            Ok(EXIT_DIVERGENCE)
        }
    }
}

#[derive(Debug, Serialize)]
struct ExploreReport {
    states_visited: usize,
    outcomes: BTreeMap<ExploreOutcome, usize>,
    livelock_states: usize,
    depth_exceeded_extended: usize,
    counterexample_events: Option<usize>,
}

pub fn cmd_explore(a: &ExploreArgs) -> Result<i32, CliError> {
    let (inst, targets) = load_problem(&a.instance, &a.pattern)?;
    let options = ExploreOptions { depth_limit: a.depth, ..ExploreOptions::default() };
    let result = explore_all_schedules(&inst.configuration()?, &targets, options)
        .map_err(|e| CliError::Malformed(e.to_string()))?;
    if let (Some(path), Some(cex)) = (&a.counterexample, &result.counterexample) {
        files::write_trace(path, cex)?;
    }
    print_json(&ExploreReport {
        states_visited: result.states_visited,
        outcomes: result.outcomes.clone(),
        livelock_states: result.livelock_states,
        depth_exceeded_extended: result.depth_exceeded_extended,
        counterexample_events: result.counterexample.as_ref().map(Vec::len),
    })?;
    Ok(if !result.only_success() {
        EXIT_FAILURE
    } else if result.count(ExploreOutcome::DepthExceeded) > 0 {
        EXIT_TIMEOUT
    } else {
        EXIT_SUCCESS
    })
}

pub fn cmd_render(a: &RenderArgs) -> Result<(), CliError> {
    let trace = files::read_trace(&a.trace)?;
    let targets = match &a.pattern {
        Some(p) => files::read_json::<PatternFile>(p)?.targets,
        None => Vec::new(),
    };
    let svg = render::render_svg(&trace, &targets);
    match &a.out {
        Some(path) => std::fs::write(path, svg).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => write!(std::io::stdout(), "{svg}").map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}
