use std::collections::BTreeMap;

use anyhow::Result;
use pmtherm::jarzynski::JarzynskiReport;
use pmtherm::scheme::{
    run_scheme, verify_round_trips, RoundTripReport, SchemeConfig, SchemeRunRecord, EXPERIMENTER, MEASURED_S, READER_M,
};
use serde::Serialize;

use crate::output::{float, json_line, Format, OutDir};
use crate::Outcome;

/// Tolerance of the `⟨𝒲⟩ - ⟨W⟩ = ⟨σ⟩·k_BT` identity.
pub const GAP_TOL: f64 = 1e-12;

/// Runs sharing one pattern of reading entropies.
#[derive(Clone, Debug, Serialize)]
pub struct LedgerClass {
    pub sigmas: Vec<f64>,
    pub runs: usize,
    /// Per-run totals in nats.
    pub experimenter: f64,
    pub meter_reader: f64,
    pub measured: f64,
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a SchemeConfig,
    delta_f: f64,
    original: &'a JarzynskiReport,
    modified: &'a JarzynskiReport,
    mean_work_gap: f64,
    expected_gap: f64,
    gap_ok: bool,
    sigma_total: f64,
    trigger_equivalent: bool,
    ledger_balanced: bool,
    ledger_classes: &'a [LedgerClass],
    round_trips: Option<&'a RoundTripReport>,
    passed: bool,
}

pub fn ledger_classes(records: &[SchemeRunRecord]) -> Vec<LedgerClass> {
    let mut map: BTreeMap<String, LedgerClass> = BTreeMap::new();
    for r in records {
        let key = r.sigmas.iter().map(|s| float(*s)).collect::<Vec<_>>().join(",");
        map.entry(key)
            .or_insert_with(|| LedgerClass {
                sigmas: r.sigmas.clone(),
                runs: 0,
                experimenter: r.ledger.total(EXPERIMENTER),
                meter_reader: r.ledger.total(READER_M),
                measured: r.ledger.total(MEASURED_S),
            })
            .runs += 1;
    }
    map.into_values().collect()
}

fn csv_row(r: &SchemeRunRecord) -> Vec<String> {
    let sigma = |k: usize| r.sigmas.get(k).map_or_else(String::new, |s| float(*s));
    let (s_meter, s_final) = if r.event_outcome.is_some() {
        (sigma(1), sigma(2))
    } else {
        (String::new(), sigma(1))
    };
    vec![
        r.run.to_string(),
        r.stream_id.to_string(),
        r.draw_id.to_string(),
        r.initial.index.to_string(),
        float(r.initial.energy),
        r.event_outcome.map_or_else(String::new, |n| n.to_string()),
        r.final_sector.index.to_string(),
        float(r.final_sector.energy),
        sigma(0),
        s_meter,
        s_final,
        float(r.sigma_total),
        float(r.work.drive),
        float(r.work.experimenter_readings),
        float(r.work.meter_reading),
        float(r.generalized_work),
    ]
}

pub const RUN_COLUMNS: [&str; 16] = [
    "run",
    "stream_id",
    "draw_id",
    "initial_index",
    "initial_energy",
    "event_outcome",
    "final_index",
    "final_energy",
    "sigma_initial",
    "sigma_meter",
    "sigma_final",
    "sigma_total",
    "work_drive",
    "work_experimenter",
    "work_meter",
    "generalized_work",
];

pub fn run(cfg: &SchemeConfig, verify: bool, out: &OutDir, format: Format) -> Result<Outcome> {
    let result = run_scheme(cfg, None)?;
    let round_trips = if verify {
        Some(verify_round_trips(cfg, cfg.seed)?)
    } else {
        None
    };
    let classes = ledger_classes(&result.records);
    let expected_gap = result.sigma_total / cfg.beta;
    let gap_ok = (result.mean_work_gap - expected_gap).abs() <= GAP_TOL;
    let passed = result.original.passed
        && result.modified.passed
        && result.ledger_balanced
        && result.trigger_equivalent
        && gap_ok
        && round_trips.as_ref().map_or(true, |r| r.passed);

    match format {
        Format::Json => {
            let mut buf = Vec::new();
            for r in &result.records {
                buf.extend(json_line(r)?);
            }
            out.write("scheme_runs.jsonl", &buf)?;
        }
        Format::Csv => {
            out.csv("scheme_runs.csv", &RUN_COLUMNS, result.records.iter().map(csv_row))?;
        }
    }
    if let Some(rt) = &round_trips {
        out.json("round_trips.json", rt)?;
    }
    out.json(
        "scheme_report.json",
        &Report {
            config: &result.config,
            delta_f: result.delta_f,
            original: &result.original,
            modified: &result.modified,
            mean_work_gap: result.mean_work_gap,
            expected_gap,
            gap_ok,
            sigma_total: result.sigma_total,
            trigger_equivalent: result.trigger_equivalent,
            ledger_balanced: result.ledger_balanced,
            ledger_classes: &classes,
            round_trips: round_trips.as_ref(),
            passed,
        },
    )?;

    let verdict = |b: bool| if b { "pass" } else { "FAIL" };
    println!("runs              {}", result.records.len());
    println!("delta_f           {}", float(result.delta_f));
    println!(
        "original          mean {} se {} {}",
        float(result.original.estimator_mean),
        float(result.original.standard_error),
        verdict(result.original.passed)
    );
    println!(
        "modified          mean {} se {} {}",
        float(result.modified.estimator_mean),
        float(result.modified.standard_error),
        verdict(result.modified.passed)
    );
    println!(
        "<W_gen> - <W>     {} (expected {}) {}",
        float(result.mean_work_gap),
        float(expected_gap),
        verdict(gap_ok)
    );
    println!("trigger           {}", verdict(result.trigger_equivalent));
    println!("ledger balanced   {}", verdict(result.ledger_balanced));
    println!("ledger per run class (nats):");
    for c in &classes {
        let sig: Vec<String> = c.sigmas.iter().map(|s| format!("{s}")).collect();
        println!(
            "  sigma=({}) runs={} experimenter={:+} M={:+} S={:+}",
            sig.join(","),
            c.runs,
            c.experimenter,
            c.meter_reader,
            c.measured
        );
    }
    if let Some(rt) = &round_trips {
        for s in &rt.stages {
            println!(
                "round trip ({})     max deviation {} over {} checks {}",
                s.stage,
                float(s.max_deviation),
                s.checks,
                verdict(s.passed)
            );
        }
    }
    Ok(if passed { Outcome::Pass } else { Outcome::Fail })
}
