use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use pmtherm::jarzynski::{
    delta_f, jarzynski_equality_check, jarzynski_exact, jarzynski_operator_trace, tpm_sample, work_values,
    DriveSchedule, JarzynskiReport, LinearInterpolation, Scenario, ScenarioParams,
};
use pmtherm::linalg::{CMatrix, Operator, C64};
use serde::Serialize;

use crate::config::{JarzynskiSection, MatrixSpec, ScheduleFile};
use crate::output::{float, Format, OutDir};
use crate::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioArg {
    Constant,
    CommutingQuench,
    DrivenQubit,
    Custom,
}

impl ScenarioArg {
    pub fn parse(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s, false).map_err(|_| anyhow::anyhow!("unknown scenario '{s}'"))
    }
}

#[derive(Serialize)]
struct ReportFile<'a> {
    scenario: ScenarioArg,
    seed: u64,
    steps: usize,
    t_f: f64,
    /// `e^{-βΔF}` for the `ΔF` used in the check.
    target: f64,
    /// `ΔF` from the endpoint Hamiltonians, before any override.
    computed_delta_f: f64,
    delta_f_overridden: bool,
    /// Sum over initial and final energy sectors.
    exact_sector_sum: f64,
    /// Single operator trace over the product of step propagators.
    exact_operator_trace: f64,
    #[serde(flatten)]
    report: &'a JarzynskiReport,
}

#[derive(Serialize)]
struct SampleJson {
    initial_energy: f64,
    final_energy: f64,
    work: f64,
    stream_id: u64,
    draw_id: u64,
}

fn matrix(spec: &MatrixSpec, what: &str) -> Result<Operator> {
    let n = spec.re.len();
    if n == 0 || spec.re.iter().any(|r| r.len() != n) {
        bail!("{what}.re must be a nonempty square matrix");
    }
    if let Some(im) = &spec.im {
        if im.len() != n || im.iter().any(|r| r.len() != n) {
            bail!("{what}.im must match the shape of {what}.re");
        }
    }
    let m = CMatrix::from_fn(n, n, |i, j| {
        C64::new(spec.re[i][j], spec.im.as_ref().map_or(0.0, |im| im[i][j]))
    });
    Operator::hermitian(m).with_context(|| format!("{what} Hamiltonian"))
}

/// Schedule and inverse temperature for the selected scenario.
fn schedule(
    scenario: ScenarioArg,
    cfg: &JarzynskiSection,
    file: Option<&Path>,
) -> Result<(DriveSchedule, f64, f64, usize)> {
    let named = |s: Scenario| -> Result<_> {
        let p = ScenarioParams {
            epsilon: cfg.epsilon,
            epsilon_prime: cfg.epsilon_prime,
            t_f: cfg.t_f,
            steps: cfg.steps,
            beta: cfg.beta,
        };
        Ok((s.schedule(&p)?, cfg.beta, cfg.t_f, cfg.steps))
    };
    match scenario {
        ScenarioArg::Constant => named(Scenario::Constant),
        ScenarioArg::CommutingQuench => named(Scenario::CommutingQuench),
        ScenarioArg::DrivenQubit => named(Scenario::DrivenQubit),
        ScenarioArg::Custom => {
            let path = file.context("scenario custom needs --schedule PATH")?;
            let f = ScheduleFile::load(path)?;
            let h = LinearInterpolation::new(matrix(&f.initial, "initial")?, matrix(&f.final_, "final")?)?;
            let sched = DriveSchedule::linear(Arc::new(h), f.t_f, f.steps)?;
            Ok((sched, f.beta.unwrap_or(cfg.beta), f.t_f, f.steps))
        }
    }
}

pub fn run(scenario: ScenarioArg, cfg: &JarzynskiSection, out: &OutDir, format: Format) -> Result<Outcome> {
    let (sched, beta, t_f, steps) = schedule(scenario, cfg, cfg.schedule.as_deref())?;
    let computed = delta_f(&sched.initial_hamiltonian()?, &sched.final_hamiltonian()?, beta)?;
    let df = cfg.delta_f.unwrap_or(computed);
    let exact_sector_sum = jarzynski_exact(&sched, beta)?;
    let exact_operator_trace = jarzynski_operator_trace(&sched, beta)?;
    let samples = tpm_sample(&sched, beta, cfg.samples, cfg.seed, None)?;
    let report = jarzynski_equality_check(&work_values(&samples), beta, df)?;

    match format {
        Format::Csv => {
            let rows = samples.iter().map(|s| {
                vec![
                    float(s.initial_energy),
                    float(s.final_energy),
                    float(s.work),
                    s.stream_id.to_string(),
                    s.draw_id.to_string(),
                ]
            });
            out.csv(
                "work_samples.csv",
                &["initial_energy", "final_energy", "work", "stream_id", "draw_id"],
                rows,
            )?;
        }
        Format::Json => {
            let recs: Vec<SampleJson> = samples
                .iter()
                .map(|s| SampleJson {
                    initial_energy: s.initial_energy,
                    final_energy: s.final_energy,
                    work: s.work,
                    stream_id: s.stream_id,
                    draw_id: s.draw_id,
                })
                .collect();
            out.json("work_samples.json", &recs)?;
        }
    }
    out.json(
        "jarzynski_report.json",
        &ReportFile {
            scenario,
            seed: cfg.seed,
            steps,
            t_f,
            target: report.exact_value,
            computed_delta_f: computed,
            delta_f_overridden: cfg.delta_f.is_some(),
            exact_sector_sum,
            exact_operator_trace,
            report: &report,
        },
    )?;

    println!(
        "scenario          {}",
        scenario.to_possible_value().expect("named").get_name()
    );
    println!("samples           {}", report.sample_count);
    println!("delta_f           {}", float(df));
    println!("exp(-beta dF)     {}", float(report.exact_value));
    println!("exact (sectors)   {}", float(exact_sector_sum));
    println!("exact (trace)     {}", float(exact_operator_trace));
    println!("estimator mean    {}", float(report.estimator_mean));
    println!("standard error    {}", float(report.standard_error));
    println!("equality check    {}", if report.passed { "pass" } else { "FAIL" });
    Ok(if report.passed { Outcome::Pass } else { Outcome::Fail })
}
