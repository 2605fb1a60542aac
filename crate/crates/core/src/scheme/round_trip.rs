use serde::{Deserialize, Serialize};

use super::config::SchemeConfig;
use super::model::{Scheme, M_LABELS, PSI, S0, S_LABELS};
use crate::error::Result;
use crate::linalg::{max_abs, partial_trace, DensityMatrix, LocalOperator, Operator, ProjectorSet};
use crate::measurement::{branching, collapse, nonselective_measure, EntropyLedger};
use crate::policy::NumericPolicy;
use crate::sampling::stream_rng;

/// Largest deviation a stage may show.
pub const ROUND_TRIP_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTripStage {
    pub stage: String,
    pub description: String,
    pub max_deviation: f64,
    /// Branch states compared (one per initial sector for stage a).
    pub checks: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub tolerance: f64,
    pub stages: Vec<RoundTripStage>,
    /// Meter value read in stage d, per initial energy sector.
    pub event_outcomes: Vec<usize>,
    pub passed: bool,
}

#[derive(Default)]
struct Acc {
    dev: f64,
    checks: usize,
}

impl Acc {
    fn add(&mut self, dev: f64) {
        self.dev = self.dev.max(dev);
        self.checks += 1;
    }

    fn finish(self, stage: &str, description: &str) -> RoundTripStage {
        RoundTripStage {
            stage: stage.into(),
            description: description.into(),
            max_deviation: self.dev,
            checks: self.checks,
            passed: self.checks > 0 && self.dev <= ROUND_TRIP_TOL,
        }
    }
}

/// Branch-conditional pieces `U^{(n)}` of the step-IV entangler, acting on ψ,
/// and the largest entry outside the diagonal S0 blocks.
fn entangler_blocks(scheme: &Scheme) -> Result<(Vec<LocalOperator>, f64)> {
    let u = scheme.entangler().operator().matrix();
    let s0 = scheme.config().s0_dim;
    let m = scheme.config().meter_dim;
    let mut off = 0.0f64;
    let mut blocks = Vec::with_capacity(s0);
    for a in 0..s0 {
        for b in 0..s0 {
            let block = u.view((a * m, b * m), (m, m)).into_owned();
            if a == b {
                let op = Operator::unitary(block)?;
                blocks.push(LocalOperator::new(scheme.space(), &[PSI], op)?);
            } else {
                off = off.max(max_abs(&block));
            }
        }
    }
    Ok((blocks, off))
}

/// Undoes `undo` on every S0 branch `n` of `rho`, then `U^{(n)}`, and compares
/// with `σ_n ⊗ ρ_M0`.
fn branch_round_trip(
    rho: &DensityMatrix,
    s0_sectors: &ProjectorSet,
    blocks: &[LocalOperator],
    undo: Option<&LocalOperator>,
    m0: &DensityMatrix,
    acc: &mut Acc,
) -> Result<()> {
    let policy = NumericPolicy::DEFAULT;
    let space = blocks[0].space();
    let weight = rho.trace_weight();
    for (n, block) in blocks.iter().enumerate() {
        let p = s0_sectors.population(n, rho.matrix()) / weight;
        if p <= policy.outcome_support {
            continue;
        }
        let mut branch = collapse(rho, s0_sectors, n)?;
        if let Some(u) = undo {
            branch = u.conjugate_inverse(&branch)?;
        }
        branch = block.conjugate_inverse(&branch)?;
        let sigma_n = partial_trace(&branch, space, &S_LABELS)?;
        acc.add(branch.max_abs_diff(&sigma_n.tensor(m0)?));
    }
    Ok(())
}

/// Checks that the step-IV and step-V unitaries can be undone branch by
/// branch, leaving S untouched and M back in its ready state.
///
/// Stages: (a) S and M factor after step III; (b) undoing `U^{(n)}` after
/// step IV; (c) undoing `U_V` then `U^{(n)}` after the step-V coupling;
/// (d) the same on the branch selected by an actual meter reading. Every
/// initial energy sector is checked; `seed` drives the readings of stage d.
pub fn verify_round_trips(config: &SchemeConfig, seed: u64) -> Result<RoundTripReport> {
    verify_round_trips_with(&Scheme::new(config)?, seed)
}

/// [`verify_round_trips`] on an already built scheme.
pub fn verify_round_trips_with(scheme: &Scheme, seed: u64) -> Result<RoundTripReport> {
    let space = scheme.space();
    let prepared = scheme.step_i_prepare()?;
    let m0 = partial_trace(&prepared, space, &M_LABELS)?;
    let s0_sectors = ProjectorSet::computational(scheme.config().s0_dim)?.embed(space, &[S0])?;
    let (blocks, off_block) = entangler_blocks(scheme)?;

    let (mut a, mut b, mut c, mut d) = (Acc::default(), Acc::default(), Acc::default(), Acc::default());
    b.dev = off_block;
    let mut event_outcomes = Vec::new();

    let set = scheme.initial_outcomes();
    let dephased = nonselective_measure(&prepared, set)?;
    let initial = branching(&dephased, set)?;
    for (i, p) in initial.probabilities.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let rho = collapse(&dephased, set, i)?;
        let rho = scheme.step_ii_barrier(&rho)?;
        let rho = scheme.step_iii_nonselective(&rho)?;
        let s = partial_trace(&rho, space, &S_LABELS)?;
        let m = partial_trace(&rho, space, &M_LABELS)?;
        a.add(rho.max_abs_diff(&s.tensor(&m)?));

        let rho_iv = scheme.step_iv_entangle(&rho)?;
        branch_round_trip(&rho_iv, &s0_sectors, &blocks, None, &m0, &mut b)?;

        let u_v = scheme.step_v_unitary();
        let rho_v = scheme.step_v_unitary_part(&rho_iv)?;
        branch_round_trip(&rho_v, &s0_sectors, &blocks, Some(u_v), &m0, &mut c)?;

        let (coupled, _) = scheme.step_v_couple(&rho_iv)?;
        let mut rng = stream_rng(seed, i as u64);
        let read = scheme.step_v_event_read(&coupled, EntropyLedger::new(), &mut rng)?;
        event_outcomes.push(read.index);
        branch_round_trip(&read.collapsed, &s0_sectors, &blocks, Some(u_v), &m0, &mut d)?;
    }

    let stages = vec![
        a.finish("a", "S and M marginals factor after step III"),
        b.finish("b", "inverse branch entangler returns M to its ready state"),
        c.finish("c", "inverse step-V coupling then inverse branch entangler"),
        d.finish("d", "round trip on the branch selected by the meter reading"),
    ];
    let passed = stages.iter().all(|s| s.passed);
    Ok(RoundTripReport {
        tolerance: ROUND_TRIP_TOL,
        stages,
        event_outcomes,
        passed,
    })
}
