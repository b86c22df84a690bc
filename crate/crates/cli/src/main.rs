//! `adeploy`: validate, run, sweep and snapshot deployment scenarios.

mod load;
mod sweep;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adaptive_deploy::sim::{run_with, RunOptions, Scenario};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adeploy", version, about = "Simulate adaptive deployment of robotic networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override a scenario value, e.g. `--set stepsize.c=0.2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its trace, summary and snapshots.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also dump the min-consensus rounds of every event.
        #[arg(long)]
        floodmin_trace: bool,
    },
    /// Run a grid of scenario variants and tabulate their summaries.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Grid axis `key=v1,v2,...`; at most two axes.
        #[arg(long, value_name = "KEY=V1,V2,...")]
        grid: Vec<String>,
        /// Directory for `sweep.csv`; the table always goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the positions and cell raster after a given number of events.
    Snapshot {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        at: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check a scenario without running it or writing anything.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

/// Validation problems exit with 2, everything else with 1.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Runtime(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid scenario: {m}"),
            Failure::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

fn scenario(args: &ScenarioArgs) -> Result<Scenario, Failure> {
    load::resolve(load::read_table(&args.scenario)?, &args.sets, args.seed)
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("cannot write {}: {e}", path.display()))
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { scenario: args } => {
            let s = scenario(&args)?;
            println!("{}: ok ({:?}, {} robots)", args.scenario.display(), s.algorithm, s.robot_count().unwrap_or(0));
            Ok(())
        }
        Command::Run { scenario: args, out, floodmin_trace } => {
            let s = scenario(&args)?;
            let options = RunOptions { floodmin_trace, snapshot_at: None };
            let output = run_with(&s, options).map_err(|e| Failure::Runtime(e.to_string()))?;
            let written = output.write_dir(&out).map_err(|e| io_failure(&out, e))?;
            print!("{}", toml::to_string(&output.summary).expect("summaries serialize"));
            for p in written {
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Snapshot { scenario: args, at, out } => {
            let s = scenario(&args)?;
            let options = RunOptions { floodmin_trace: false, snapshot_at: Some(at) };
            let mut output = run_with(&s, options).map_err(|e| match e {
                adaptive_deploy::Error::InvalidParameter { .. } => Failure::Invalid(e.to_string()),
                other => Failure::Runtime(other.to_string()),
            })?;
            output.snapshots.retain(|snap| snap.k == at);
            if output.snapshots.is_empty() {
                return Err(Failure::Runtime(format!("the run ended before event {at}")));
            }
            let written = output.write_snapshots(&out).map_err(|e| io_failure(&out, e))?;
            for p in written {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Sweep { scenario: args, grid, out } => {
            let axes = sweep::parse_grid(&grid)?;
            let base = load::read_table(&args.scenario)?;
            let table = sweep::run_sweep(&base, &args.sets, args.seed, &axes)?;
            let mut text = String::new();
            for line in toml::to_string(&base).expect("tables serialize").lines() {
                text.push_str("# ");
                text.push_str(line);
                text.push('\n');
            }
            for a in &axes {
                text.push_str(&format!("# grid {} = {}\n", a.key, a.values.join(",")));
            }
            text.push_str(&table.to_csv());
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
                let path = dir.join("sweep.csv");
                fs::write(&path, &text).map_err(|e| io_failure(&path, e))?;
            }
            print!("{}", text);
            let failed = table.failures();
            if failed == table.rows.len() {
                return Err(Failure::Runtime("every grid point failed".into()));
            }
            if failed > 0 {
                eprintln!("{failed} grid point(s) failed; see the status column");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}
