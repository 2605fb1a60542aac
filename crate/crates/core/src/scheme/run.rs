use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::SchemeConfig;
use super::model::{Scheme, EXPERIMENTER, MEASURED_S, READER_M};
use crate::error::Result;
use crate::jarzynski::{jarzynski_equality_check, modified_jarzynski_check_per_run, JarzynskiReport};
use crate::linalg::DensityMatrix;
use crate::measurement::{
    branching, cause_for, collapse, nonselective_measure, Branching, EntropyCause, EntropyLedger,
};
use crate::sampling::{pick_with, run_batched};

/// A density matrix after a named stage of one run.
#[derive(Clone, Debug)]
pub struct StageState {
    pub stage: &'static str,
    pub state: Arc<DensityMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorRecord {
    pub index: usize,
    pub label: String,
    pub energy: f64,
}

/// Parts of the generalized work `𝒲 = W + W_ER`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkComponents {
    /// `E_f - E_i` from the two energy readings.
    pub drive: f64,
    /// `k_BT·σ` of the experimenter's two energy readings.
    pub experimenter_readings: f64,
    /// `k_BT·σ` of M's reading of the meter.
    pub meter_reading: f64,
}

impl WorkComponents {
    pub fn generalized(&self) -> f64 {
        self.drive + self.experimenter_readings + self.meter_reading
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemeRunRecord {
    pub run: usize,
    pub stream_id: u64,
    pub draw_id: u64,
    pub initial: SectorRecord,
    /// Meter value read in step V; `None` when steps III–V are off.
    pub event_outcome: Option<usize>,
    #[serde(rename = "final")]
    pub final_sector: SectorRecord,
    /// Entropy of each reading in order: initial energy, meter, final energy.
    pub sigmas: Vec<f64>,
    pub sigma_total: f64,
    pub ledger: EntropyLedger,
    pub work: WorkComponents,
    pub generalized_work: f64,
    /// Intermediate states, filled only with `keep_states`.
    #[serde(skip)]
    pub states: Vec<StageState>,
}

/// Exact probability of one `(initial, final)` sector pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkOutcome {
    pub initial_sector: usize,
    pub final_sector: usize,
    pub work: f64,
    pub probability: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemeOutput {
    pub config: SchemeConfig,
    pub delta_f: f64,
    /// `⟨e^{-βW}⟩` with the drive work only.
    pub original: JarzynskiReport,
    /// `⟨e^{-β𝒲 + σ}⟩` with the generalized work.
    pub modified: JarzynskiReport,
    /// `⟨𝒲⟩ - ⟨W⟩`.
    pub mean_work_gap: f64,
    /// Mean of `Σ σ` over runs.
    pub sigma_total: f64,
    /// Every configured A displacement gives the same meter statistics.
    pub trigger_equivalent: bool,
    /// Every run ledger sums to zero.
    pub ledger_balanced: bool,
    pub records: Vec<SchemeRunRecord>,
}

/// After the final energy reading.
struct Leaf {
    collapsed: Option<Arc<DensityMatrix>>,
}

/// After the meter reading: final dephasing and its outcome distribution.
struct AfterEvent {
    states: Vec<StageState>,
    fin: Branching,
    leaves: Vec<Leaf>,
}

/// After the initial energy reading: steps II–V.
struct AfterInitial {
    states: Vec<StageState>,
    /// Meter distribution; `None` with steps III–V off.
    read: Option<Branching>,
    trigger: bool,
    children: Vec<Option<AfterEvent>>,
}

/// Every quantum branch of the protocol, evaluated once. A run only samples
/// a path through it, so the result matches sequential evolution per run.
struct Tree {
    prepared: Arc<DensityMatrix>,
    initial: Branching,
    children: Vec<Option<AfterInitial>>,
}

fn stage(stage: &'static str, state: &DensityMatrix) -> StageState {
    StageState {
        stage,
        state: Arc::new(state.clone()),
    }
}

impl Tree {
    fn build(scheme: &Scheme) -> Result<Self> {
        let keep = scheme.config().keep_states;
        let prepared = scheme.step_i_prepare()?;
        let dephased = nonselective_measure(&prepared, scheme.initial_outcomes())?;
        let initial = branching(&dephased, scheme.initial_outcomes())?;
        let mut children = Vec::with_capacity(initial.probabilities.len());
        for (i, &p) in initial.probabilities.iter().enumerate() {
            if p == 0.0 {
                children.push(None);
                continue;
            }
            let rho = collapse(&dephased, scheme.initial_outcomes(), i)?;
            children.push(Some(Self::after_initial(scheme, rho, keep)?));
        }
        Ok(Self {
            prepared: Arc::new(prepared),
            initial,
            children,
        })
    }

    fn after_initial(scheme: &Scheme, rho: DensityMatrix, keep: bool) -> Result<AfterInitial> {
        let mut states = Vec::new();
        if keep {
            states.push(stage("initial_energy_reading", &rho));
        }
        let rho = scheme.step_ii_barrier(&rho)?;
        if keep {
            states.push(stage("step_ii", &rho));
        }
        if !scheme.config().measure {
            let child = Self::after_event(scheme, &rho, keep)?;
            return Ok(AfterInitial {
                states,
                read: None,
                trigger: true,
                children: vec![Some(child)],
            });
        }
        let rho = scheme.step_iii_nonselective(&rho)?;
        if keep {
            states.push(stage("step_iii", &rho));
        }
        let rho = scheme.step_iv_entangle(&rho)?;
        if keep {
            states.push(stage("step_iv", &rho));
        }
        let (rho, trigger) = scheme.step_v_couple(&rho)?;
        if keep {
            states.push(stage("step_v", &rho));
        }
        let read = branching(&rho, scheme.meter_outcomes())?;
        let mut children = Vec::with_capacity(read.probabilities.len());
        for (n, &p) in read.probabilities.iter().enumerate() {
            if p == 0.0 {
                children.push(None);
                continue;
            }
            let collapsed = collapse(&rho, scheme.meter_outcomes(), n)?;
            let mut child = Self::after_event(scheme, &collapsed, keep)?;
            if keep {
                child.states.insert(0, stage("event_reading", &collapsed));
            }
            children.push(Some(child));
        }
        Ok(AfterInitial {
            states,
            read: Some(read),
            trigger,
            children,
        })
    }

    fn after_event(scheme: &Scheme, rho: &DensityMatrix, keep: bool) -> Result<AfterEvent> {
        let dephased = nonselective_measure(rho, scheme.final_outcomes())?;
        let fin = branching(&dephased, scheme.final_outcomes())?;
        let mut leaves = Vec::with_capacity(fin.probabilities.len());
        for (f, &p) in fin.probabilities.iter().enumerate() {
            let collapsed = if keep && p > 0.0 {
                Some(Arc::new(collapse(&dephased, scheme.final_outcomes(), f)?))
            } else {
                None
            };
            leaves.push(Leaf { collapsed });
        }
        let mut states = Vec::new();
        if keep {
            states.push(stage("final_dephased", &dephased));
        }
        Ok(AfterEvent { states, fin, leaves })
    }

    fn trigger_equivalent(&self) -> bool {
        self.children.iter().flatten().all(|c| c.trigger)
    }

    fn work_distribution(&self, scheme: &Scheme) -> Vec<WorkOutcome> {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, child) in self.children.iter().enumerate() {
            let Some(child) = child else { continue };
            let p_i = self.initial.probabilities[i];
            let read: Vec<f64> = match &child.read {
                Some(b) => b.probabilities.clone(),
                None => vec![1.0],
            };
            for (n, ev) in child.children.iter().enumerate() {
                let Some(ev) = ev else { continue };
                for (f, p_f) in ev.fin.probabilities.iter().enumerate() {
                    if *p_f > 0.0 {
                        *acc.entry((i, f)).or_default() += p_i * read[n] * p_f;
                    }
                }
            }
        }
        acc.into_iter()
            .map(|((i, f), probability)| WorkOutcome {
                initial_sector: i,
                final_sector: f,
                work: scheme.final_sectors()[f].energy - scheme.initial_sectors()[i].energy,
                probability,
            })
            .collect()
    }
}

fn sector(scheme: &Scheme, initial: bool, index: usize) -> SectorRecord {
    let (sectors, set) = if initial {
        (scheme.initial_sectors(), scheme.initial_outcomes())
    } else {
        (scheme.final_sectors(), scheme.final_outcomes())
    };
    SectorRecord {
        index,
        label: set.labels()[index].clone(),
        energy: sectors[index].energy,
    }
}

/// Exact distribution of `(initial, final)` energy-sector pairs over the whole protocol.
pub fn work_distribution(config: &SchemeConfig) -> Result<Vec<WorkOutcome>> {
    let scheme = Scheme::new(config)?;
    let tree = Tree::build(&scheme)?;
    Ok(tree.work_distribution(&scheme))
}

/// Runs `config.n_samples` realizations of the protocol.
///
/// Each run draws the initial energy sector, the meter value and the final
/// energy sector, in that order, from its own stream position.
pub fn run_scheme(config: &SchemeConfig, threads: Option<usize>) -> Result<SchemeOutput> {
    let scheme = Scheme::new(config)?;
    run_scheme_with(&scheme, threads)
}

/// [`run_scheme`] on an already built scheme (for custom entanglers).
pub fn run_scheme_with(scheme: &Scheme, threads: Option<usize>) -> Result<SchemeOutput> {
    let config = scheme.config();
    let tree = Tree::build(scheme)?;
    let temperature = 1.0 / config.beta;
    let records = run_batched(config.n_samples, config.seed, threads, |rng, id| {
        let mut ledger = EntropyLedger::new();
        let i = pick_with(&tree.initial.probabilities, rng).expect("initial distribution");
        let s0 = tree.initial.sigma;
        ledger.record_reading(
            EXPERIMENTER,
            MEASURED_S,
            s0,
            cause_for(s0, EntropyCause::EnergyEventReading),
        );
        let after_i = tree.children[i].as_ref().expect("sampled branch exists");

        let (n, s1) = match &after_i.read {
            Some(b) => {
                let n = pick_with(&b.probabilities, rng).expect("meter distribution");
                ledger.record_reading(
                    READER_M,
                    MEASURED_S,
                    b.sigma,
                    cause_for(b.sigma, EntropyCause::EventReading),
                );
                (Some(n), b.sigma)
            }
            None => (None, 0.0),
        };
        let after_n = after_i.children[n.unwrap_or(0)]
            .as_ref()
            .expect("sampled branch exists");

        let f = pick_with(&after_n.fin.probabilities, rng).expect("final distribution");
        let s2 = after_n.fin.sigma;
        ledger.record_reading(
            EXPERIMENTER,
            MEASURED_S,
            s2,
            cause_for(s2, EntropyCause::EnergyEventReading),
        );

        let initial = sector(scheme, true, i);
        let final_sector = sector(scheme, false, f);
        let work = WorkComponents {
            drive: final_sector.energy - initial.energy,
            experimenter_readings: temperature * (s0 + s2),
            meter_reading: temperature * s1,
        };
        let mut states = Vec::new();
        if config.keep_states {
            states.push(StageState {
                stage: "step_i",
                state: tree.prepared.clone(),
            });
            states.extend(after_i.states.iter().cloned());
            states.extend(after_n.states.iter().cloned());
            if let Some(rho) = &after_n.leaves[f].collapsed {
                states.push(StageState {
                    stage: "final_energy_reading",
                    state: rho.clone(),
                });
            }
        }
        Ok(SchemeRunRecord {
            run: id.stream_id as usize * crate::sampling::BATCH + id.draw_id as usize,
            stream_id: id.stream_id,
            draw_id: id.draw_id,
            initial,
            event_outcome: n,
            final_sector,
            sigmas: if n.is_some() { vec![s0, s1, s2] } else { vec![s0, s2] },
            sigma_total: s0 + s1 + s2,
            ledger,
            generalized_work: work.generalized(),
            work,
            states,
        })
    })?;

    let drive: Vec<f64> = records.iter().map(|r| r.work.drive).collect();
    let generalized: Vec<f64> = records.iter().map(|r| r.generalized_work).collect();
    let sigmas: Vec<f64> = records.iter().map(|r| r.sigma_total).collect();
    let delta_f = scheme.delta_f()?;
    let original = jarzynski_equality_check(&drive, config.beta, delta_f)?;
    let modified = modified_jarzynski_check_per_run(&generalized, &sigmas, config.beta, delta_f)?;
    Ok(SchemeOutput {
        config: config.clone(),
        delta_f,
        mean_work_gap: modified.mean_work - original.mean_work,
        sigma_total: modified.sigma_total,
        trigger_equivalent: tree.trigger_equivalent(),
        ledger_balanced: records.iter().all(|r| r.ledger.is_balanced()),
        original,
        modified,
        records,
    })
}
