use anyhow::Result;
use pmtherm::relaxation::{entropy_of_weight, simulate, Description, RelaxationTrajectory};
use serde::Serialize;

use crate::output::{float, Format, OutDir};
use crate::{Outcome, RelaxationArgs};

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    description: &'a str,
    dt: f64,
    t: &'a [f64],
    rho: &'a [f64],
    /// `null` where `ρ = 0`.
    sigma: &'a [f64],
}

#[derive(Serialize)]
struct SummaryRow {
    description: &'static str,
    rho_before: f64,
    rho_dt: f64,
    /// `null` where `ρ(dt) = 0`.
    sigma_dt: f64,
    rho_final: f64,
}

#[derive(Serialize)]
struct Summary {
    dt: f64,
    horizon: f64,
    steps: usize,
    rows: Vec<SummaryRow>,
}

fn summary_row(tr: &RelaxationTrajectory, sigma: &[f64]) -> SummaryRow {
    let (rho_before, rho_dt) = tr.kick();
    SummaryRow {
        description: tr.description.name(),
        rho_before,
        rho_dt,
        sigma_dt: sigma[tr.dt_index()],
        rho_final: *tr.weights.last().expect("grid is nonempty"),
    }
}

pub fn run(args: &RelaxationArgs, out: &OutDir, format: Format) -> Result<Outcome> {
    let cfg = &args.section;
    let descriptions: Vec<Description> = match &cfg.description {
        Some(d) => vec![d.parse()?],
        None => Description::ALL.to_vec(),
    };
    let mut rows = Vec::new();
    for d in descriptions {
        let tr = simulate(d, cfg.dt, cfg.horizon, cfg.steps)?;
        let sigma = entropy_of_weight(&tr);
        let name = d.name();
        match format {
            Format::Csv => {
                let cells = tr
                    .times
                    .iter()
                    .zip(&tr.weights)
                    .zip(&sigma)
                    .map(|((t, r), s)| vec![float(*t), float(*r), float(*s)]);
                out.csv(&format!("relaxation_{name}.csv"), &["t", "rho", "sigma"], cells)?;
            }
            Format::Json => {
                out.json(
                    &format!("relaxation_{name}.json"),
                    &TrajectoryJson {
                        description: name,
                        dt: tr.dt,
                        t: &tr.times,
                        rho: &tr.weights,
                        sigma: &sigma,
                    },
                )?;
            }
        }
        rows.push(summary_row(&tr, &sigma));
    }

    println!(
        "{:<12} {:>24} {:>24} {:>24}",
        "description", "rho(dt-)", "rho(dt)", "sigma(dt)"
    );
    for r in &rows {
        println!(
            "{:<12} {:>24} {:>24} {:>24}",
            r.description,
            float(r.rho_before),
            float(r.rho_dt),
            float(r.sigma_dt)
        );
    }
    out.json(
        "relaxation_summary.json",
        &Summary {
            dt: cfg.dt,
            horizon: cfg.horizon,
            steps: cfg.steps,
            rows,
        },
    )?;
    Ok(Outcome::Pass)
}
