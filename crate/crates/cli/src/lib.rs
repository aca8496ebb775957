//! Command-line front end: run scenarios, render runs to SVG, dump proposal
//! distributions, validate scenario files.
//!
//! Every flag can also be supplied through an environment variable with the
//! `RRDT_` prefix (e.g. `RRDT_SCENARIO`, `RRDT_SEED`, `RRDT_OUT`).
//!
//! Exit codes: 0 on success, 2 for usage/configuration errors, 3 for IO
//! failures.

pub mod dump;
pub mod render;
pub mod svg;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rrdt_core::experiment::{export_csv, export_markdown, run_experiment, RunRecord};
use rrdt_core::{load_scenario, Error, Scenario};

use dump::{dump_dist, DumpSpec};
use render::{render_record, RenderOptions};

#[derive(Parser, Debug)]
#[command(name = "rrdt", version, about = "Motion-planning benchmark runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a scenario's planner roster and export metric tables
    Run(RunArgs),
    /// Render a raw run record to SVG
    Render(RenderArgs),
    /// Replay a failure script against static and Bayesian-updated proposals
    DumpDist(DumpDistArgs),
    /// Parse and validate a scenario file
    ValidateScenario(ValidateArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Scenario file to run
    #[arg(long, env = "RRDT_SCENARIO")]
    pub scenario: PathBuf,
    /// Base seed; repeat r uses seed + r
    #[arg(long, env = "RRDT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output directory for tables and raw records
    #[arg(long, env = "RRDT_OUT")]
    pub out: PathBuf,
    /// Restrict the roster to these planner names
    #[arg(long, env = "RRDT_PLANNER", value_delimiter = ',')]
    pub planner: Vec<String>,
    /// Override the scenario's checkpoint interval
    #[arg(long, env = "RRDT_CHECKPOINT_EVERY")]
    pub checkpoint_every: Option<u64>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Scenario the record was produced from
    #[arg(long, env = "RRDT_SCENARIO")]
    pub scenario: PathBuf,
    /// Planner name of the record
    #[arg(long, env = "RRDT_PLANNER")]
    pub planner: String,
    /// Seed of the record
    #[arg(long, env = "RRDT_SEED")]
    pub seed: u64,
    /// Directory holding `raw/` records; the SVG is written next to them
    #[arg(long, env = "RRDT_OUT")]
    pub out: PathBuf,
    /// Draw search-tree nodes and edges
    #[arg(long, env = "RRDT_RENDER_TREES")]
    pub render_trees: bool,
    /// Highlight the solution path
    #[arg(long, env = "RRDT_RENDER_PATH")]
    pub render_path: bool,
    /// Stroke edges by tree component
    #[arg(long, env = "RRDT_COLOR_BY_TREE")]
    pub color_by_tree: bool,
}

#[derive(Args, Debug)]
pub struct DumpDistArgs {
    /// Output directory for CSVs and snapshots
    #[arg(long, env = "RRDT_OUT")]
    pub out: PathBuf,
    /// Mean direction angle of the prior (radians)
    #[arg(long, default_value_t = FRAC_PI_2)]
    pub mu_angle: f64,
    /// Prior concentration
    #[arg(long, default_value_t = 4.0)]
    pub kappa: f64,
    /// Kernel mask depth
    #[arg(long, default_value_t = 0.9)]
    pub beta: f64,
    /// Kernel length scale (radians)
    #[arg(long, default_value_t = FRAC_PI_4)]
    pub lambda: f64,
    /// Bins over the angle circle
    #[arg(long, default_value_t = 360)]
    pub bins: usize,
    /// Scripted failed directions (radians, replayed in order); defaults to
    /// fifteen repeats of pi/2
    #[arg(long, value_delimiter = ',')]
    pub failed_dirs: Vec<f64>,
    /// Steps at which polar SVG snapshots are written
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 5, 10, 15])]
    pub snapshots: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Scenario file to check
    #[arg(long, env = "RRDT_SCENARIO")]
    pub scenario: PathBuf,
}

/// Errors carrying their process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Usage or configuration problem: exit 2.
    Config(String),
    /// Filesystem failure: exit 3.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Scenario, CliError> {
    // a missing file is a configuration problem, not an IO failure
    if !path.exists() {
        return Err(CliError::Config(format!(
            "scenario file {} does not exist",
            path.display()
        )));
    }
    Ok(load_scenario(path)?)
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let mut scenario = load(&args.scenario)?;
    if let Some(every) = args.checkpoint_every {
        if every == 0 {
            return Err(CliError::Config("checkpoint interval must be positive".into()));
        }
        scenario.checkpoint_every = every;
    }
    if !args.planner.is_empty() {
        for name in &args.planner {
            if !scenario.planners.iter().any(|p| p.name() == name) {
                return Err(CliError::Config(format!(
                    "planner `{name}` is not in scenario `{}`",
                    scenario.name
                )));
            }
        }
        scenario.planners.retain(|p| args.planner.iter().any(|n| n == p.name()));
    }

    let result = run_experiment(&scenario, args.seed);

    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let raw_dir = args.out.join("raw");
    std::fs::create_dir_all(&raw_dir).map_err(io)?;
    for run in &result.runs {
        let body = serde_json::to_string(run).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(raw_dir.join(format!("{}.json", run.file_stem())), body).map_err(io)?;
    }
    let csv = export_csv(&result.rows);
    std::fs::write(args.out.join(format!("{}_summary.csv", scenario.name)), &csv).map_err(io)?;
    let md = export_markdown(&result.rows);
    std::fs::write(args.out.join(format!("{}_summary.md", scenario.name)), &md).map_err(io)?;
    print!("{md}");
    Ok(())
}

pub fn cmd_render(args: &RenderArgs) -> Result<(), CliError> {
    let scenario = load(&args.scenario)?;
    let stem = format!("{}_{}_{}", scenario.name, args.planner, args.seed);
    let record_path = args.out.join("raw").join(format!("{stem}.json"));
    if !record_path.exists() {
        return Err(CliError::Config(format!(
            "no run record at {}; run the scenario first",
            record_path.display()
        )));
    }
    let body = std::fs::read_to_string(&record_path).map_err(|e| CliError::Io(e.to_string()))?;
    let record: RunRecord =
        serde_json::from_str(&body).map_err(|e| CliError::Config(e.to_string()))?;
    let opts = RenderOptions {
        show_trees: args.render_trees || !args.render_path,
        show_path: args.render_path || !args.render_trees,
        color_by_tree: args.color_by_tree,
    };
    let svg = render_record(&scenario, &record, opts);
    std::fs::write(args.out.join(format!("{stem}.svg")), svg)
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

pub fn cmd_dump_dist(args: &DumpDistArgs) -> Result<(), CliError> {
    let failed_dirs = if args.failed_dirs.is_empty() {
        dump::default_failed_dirs()
    } else {
        args.failed_dirs.clone()
    };
    let spec = DumpSpec {
        mu_angle: args.mu_angle,
        kappa: args.kappa,
        beta: args.beta,
        lambda: args.lambda,
        bins: args.bins,
        failed_dirs,
        snapshots: args.snapshots.clone(),
    };
    dump_dist(&spec, &args.out)
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let scenario = load(&args.scenario)?;
    println!(
        "ok: scenario `{}` ({}d, {} obstacles, {} planners, budget {}, repeats {})",
        scenario.name,
        scenario.world.dim(),
        scenario.world.obstacles().len(),
        scenario.planners.len(),
        scenario.node_budget,
        scenario.repeats
    );
    Ok(())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Render(args) => cmd_render(args),
        Command::DumpDist(args) => cmd_dump_dist(args),
        Command::ValidateScenario(args) => cmd_validate(args),
    }
}
