//! Command-line driver for `pmtherm`.
//!
//! Exit status: 0 when every enabled check passes, 1 when a check fails,
//! 2 on usage, configuration or I/O errors. Reports are written before the
//! status is decided, so a failing run still leaves its summary on disk.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

pub mod config;
pub mod jarzynski;
pub mod output;
pub mod relaxation;
pub mod scheme;

use config::{RelaxationSection, RunConfig};
use jarzynski::ScenarioArg;
use output::{Format, OutDir};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

/// Exit status for errors.
pub const ERROR_CODE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "pmtherm", version, about = "Projective-measurement thermodynamics simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relaxation of the surviving weight and its entropy.
    Relaxation(RelaxationCli),
    /// Two-point-measurement work statistics for a single drive.
    Jarzynski(JarzynskiCli),
    /// The five-step measurement protocol with entropy accounting.
    Scheme(SchemeCli),
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, value_name = "DIR")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Root seed of all random streams.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RelaxationCli {
    #[command(flatten)]
    pub common: Common,
    /// Grid steps over the horizon.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Emit a single description instead of all three.
    #[arg(long, value_parser = ["direct", "statistical", "poisson"])]
    pub description: Option<String>,
}

#[derive(Debug, Args)]
pub struct JarzynskiCli {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    /// Schedule file for `--scenario custom`.
    #[arg(long, value_name = "PATH")]
    pub schedule: Option<PathBuf>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Time steps of the drive.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Check against this ΔF instead of the computed one.
    #[arg(long, allow_hyphen_values = true)]
    pub delta_f: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SchemeCli {
    #[command(flatten)]
    pub common: Common,
    /// Number of runs.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Time steps of the barrier ramp.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Start S0 in an eigenstate of the measured observable.
    #[arg(long)]
    pub eigenstate_prep: bool,
    /// Also run the branch round-trip checks.
    #[arg(long = "verify-appendix-b")]
    pub verify_round_trips: bool,
}

/// Resolved relaxation parameters.
pub struct RelaxationArgs {
    pub section: RelaxationSection,
}

fn setup(common: &Common) -> Result<(RunConfig, OutDir, Format)> {
    let cfg = RunConfig::load(common.config.as_deref())?;
    let out = OutDir::create(&cfg.output_dir(common.output.as_deref()))?;
    let format = cfg.format(common.format);
    Ok((cfg, out, format))
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Relaxation(a) => {
            let (cfg, out, format) = setup(&a.common)?;
            let mut section = cfg.relaxation;
            if let Some(s) = a.steps {
                section.steps = s;
            }
            if a.description.is_some() {
                section.description = a.description;
            }
            relaxation::run(&RelaxationArgs { section }, &out, format)
        }
        Command::Jarzynski(a) => {
            let (cfg, out, format) = setup(&a.common)?;
            let mut section = cfg.jarzynski;
            if let Some(s) = a.common.seed.or(cfg.seed) {
                section.seed = s;
            }
            if let Some(n) = a.samples {
                section.samples = n;
            }
            if let Some(n) = a.steps {
                section.steps = n;
            }
            if a.schedule.is_some() {
                section.schedule = a.schedule;
            }
            if a.delta_f.is_some() {
                section.delta_f = a.delta_f;
            }
            let scenario = match a.scenario {
                Some(s) => s,
                None => ScenarioArg::parse(&section.scenario)?,
            };
            jarzynski::run(scenario, &section, &out, format)
        }
        Command::Scheme(a) => {
            let (cfg, out, format) = setup(&a.common)?;
            let mut sc = cfg.scheme;
            if let Some(s) = a.common.seed.or(cfg.seed) {
                sc.seed = s;
            }
            if let Some(n) = a.samples {
                sc.n_samples = n;
            }
            if let Some(n) = a.steps {
                sc.steps = n;
            }
            if a.eigenstate_prep {
                sc.eigenstate_prep = true;
            }
            scheme::run(&sc, a.verify_round_trips, &out, format)
        }
    }
}

/// Parses `args` and runs the command; usage errors exit through clap.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ERROR_CODE } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) => ExitCode::from(o.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ERROR_CODE)
        }
    }
}
