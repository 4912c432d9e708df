//! `kuramoto-lock`: simulate, certify and sweep inertial Kuramoto ensembles.
//!
//! Exit codes: 0 success (or certified), 1 usage, I/O or validation error,
//! 2 not certified / campaign defects / selftest failure, 3 numeric abort.

mod commands;
mod figures;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kuramoto_lock_experiments::{CampaignKind, ExperimentError, SweepAxis};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_NEGATIVE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "kuramoto-lock", version, about = "Inertial Kuramoto simulation and phase-locking certificates")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug, -vvv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Scenario configuration (JSON).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Override a configuration value, e.g. `--set params.kappa=2.0`.
    /// Applied in order; the last writer wins.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Override the RNG seed (applied after every `--set`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print machine-readable JSON on stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one scenario and persist its record, series and summary.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_name = "DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate the phase-locking certificates of a scenario without simulating.
    Certify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Evaluate only the three-oscillator certificate.
        #[arg(long)]
        n3: bool,
        /// Also write the reports to DIR/certificates.json.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Run a scenario once per value of a normalized parameter.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// dv_over_kappa, m_kappa or domega_over_kappa.
        #[arg(long)]
        axis: SweepAxis,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
        /// Draw a fresh instance per value instead of rescaling one sample.
        #[arg(long)]
        fresh: bool,
        #[arg(long, value_name = "DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Write SVG line charts of R(t) and Δ(t) for a scenario or a sweep.
    Figures {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, requires = "values")]
        axis: Option<SweepAxis>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        #[arg(long, value_name = "DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Count phase collisions of a scenario.
    Collide {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_name = "DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Sample certified instances and check that the simulations agree.
    Campaign {
        /// simple, n3, first_order, partial or nonsync.
        #[arg(long)]
        kind: CampaignKind,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        json: bool,
        #[arg(long, value_name = "DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Run the embedded invariant suites and print a pass/fail table.
    Selftest {
        #[arg(long)]
        json: bool,
        /// Test hook: perturb a reference constant so the suite must fail.
        #[arg(long, hide = true)]
        perturb_constant: bool,
    },
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

/// KURAMOTO_LOCK_THREADS caps the worker pool used by sweeps and campaigns.
fn init_threads() {
    let Ok(raw) = std::env::var("KURAMOTO_LOCK_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("cannot size the worker pool: {e}");
            }
        }
        _ => log::warn!("ignoring KURAMOTO_LOCK_THREADS={raw:?}: expected a positive integer"),
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<ExperimentError>() {
        Some(e) if e.is_numeric_abort() => EXIT_NUMERIC,
        _ => EXIT_ERROR,
    }
}

fn dispatch(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Simulate { scenario, out } => commands::simulate(&scenario, &out),
        Command::Certify { scenario, n3, out } => commands::certify(&scenario, n3, out.as_deref()),
        Command::Sweep { scenario, axis, values, fresh, out } => commands::sweep(&scenario, axis, &values, fresh, &out),
        Command::Figures { scenario, axis, values, out } => commands::figures(&scenario, axis, &values, &out),
        Command::Collide { scenario, out } => commands::collide(&scenario, &out),
        Command::Campaign { kind, instances, seed, t_end, json, out } => {
            commands::campaign(kind, instances, seed, t_end, json, &out)
        }
        Command::Selftest { json, perturb_constant } => commands::selftest(json, perturb_constant),
    }
}

fn main() -> ExitCode {
    // Usage errors exit 1 like any other invalid input; 2 is reserved for
    // negative verdicts.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    init_logging(cli.verbose);
    init_threads();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
