use std::sync::Arc;

use rand::Rng;

use super::config::SchemeConfig;
use crate::error::{Error, Result};
use crate::jarzynski::{delta_f, thermal_state, ControlHamiltonian, DriveSchedule};
use crate::linalg::{
    max_abs, partial_trace, tensor, CMatrix, CompositeSpace, DensityMatrix, Ket, LocalOperator, Operator, ProjectorSet,
    C64,
};
use crate::measurement::{self, EntropyCause, EntropyLedger, EventOutcome, PointerModel};
use crate::policy::NumericPolicy;
use crate::superselection::{build_planck_basis, energy_sectors, sector_projector_set, EnergySector, PlanckCellBasis};

pub const S0: &str = "S0";
pub const A_PRIME: &str = "A'";
pub const PSI: &str = "psi";
pub const POINTER: &str = "A";
/// Subsystems forming the measured system S.
pub const S_LABELS: [&str; 2] = [S0, A_PRIME];
/// Subsystems forming the measuring system M.
pub const M_LABELS: [&str; 2] = [PSI, POINTER];

pub const EXPERIMENTER: &str = "experimenter";
pub const READER_M: &str = "M";
pub const MEASURED_S: &str = "S";

/// Largest change of the S marginal tolerated in step IV.
pub const STEP_IV_TOL: f64 = 1e-12;

/// `diag(n-1, n-3, ..., 1-n)`, the measured observable and the meter.
pub fn observable(n: usize) -> Operator {
    let v: Vec<f64> = (0..n).map(|k| (n as f64 - 1.0) - 2.0 * k as f64).collect();
    Operator::diagonal(&v).expect("n > 0")
}

/// Nearest-neighbour hopping `Σ |k⟩⟨k+1| + h.c.`.
pub fn hopping(n: usize) -> Operator {
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        m[(k, k + 1)] = C64::new(1.0, 0.0);
        m[(k + 1, k)] = C64::new(1.0, 0.0);
    }
    Operator::hermitian(m).expect("symmetric")
}

/// `|n, m⟩ → e^{iφ_{n,m}}|n, m + n mod meter⟩` on (S0, ψ).
pub fn controlled_shift(s0: usize, meter: usize, phases: &[f64]) -> Result<Operator> {
    let mut u = CMatrix::zeros(s0 * meter, s0 * meter);
    for n in 0..s0 {
        for m in 0..meter {
            let phase = phases.get(n * meter + m).copied().unwrap_or(0.0);
            u[(n * meter + (m + n) % meter, n * meter + m)] = C64::from_polar(1.0, phase);
        }
    }
    Operator::unitary(u)
}

/// Tight-binding double well: `H(λ) = -J(λ)/2·hop - b(λ)/2·O`, `J` and `b` linear in λ.
#[derive(Clone, Debug)]
pub struct BarrierDrive {
    hop: Operator,
    obs: Operator,
    j_start: f64,
    j_end: f64,
    bias: f64,
    bias_end: f64,
}

impl BarrierDrive {
    pub fn new(n: usize, j_start: f64, j_end: f64, bias: f64, bias_end: f64) -> Self {
        Self {
            hop: hopping(n),
            obs: observable(n),
            j_start,
            j_end,
            bias,
            bias_end,
        }
    }

    pub fn tunneling(&self, lambda: f64) -> f64 {
        self.j_start + lambda * (self.j_end - self.j_start)
    }

    pub fn bias_at(&self, lambda: f64) -> f64 {
        self.bias + lambda * (self.bias_end - self.bias)
    }
}

impl ControlHamiltonian for BarrierDrive {
    fn dim(&self) -> usize {
        self.hop.dim()
    }

    fn at(&self, lambda: f64) -> Result<Operator> {
        self.hop
            .scaled(-self.tunneling(lambda) / 2.0)
            .plus(&self.obs.scaled(-self.bias_at(lambda) / 2.0))
    }
}

/// The four-part composite `(S0, A')_S ⊗ (ψ, A)_M` with every operator the
/// protocol needs.
#[derive(Clone, Debug)]
pub struct Scheme {
    config: SchemeConfig,
    space: CompositeSpace,
    cells: PlanckCellBasis,
    drive: Arc<BarrierDrive>,
    schedule: DriveSchedule,
    nsm_pointer: PointerModel,
    event_pointer: PointerModel,
    u_ii: LocalOperator,
    u_iii: LocalOperator,
    s_cells: ProjectorSet,
    entangler: LocalOperator,
    u_v: LocalOperator,
    m_cells: ProjectorSet,
    meter_outcomes: ProjectorSet,
    initial_sectors: Vec<EnergySector>,
    final_sectors: Vec<EnergySector>,
    initial_outcomes: ProjectorSet,
    final_outcomes: ProjectorSet,
}

impl Scheme {
    pub fn new(config: &SchemeConfig) -> Result<Self> {
        let entangler = controlled_shift(config.s0_dim, config.meter_dim, &config.entangler_phases)?;
        Self::with_entangler(config, entangler)
    }

    /// Uses `entangler` (on S0 ⊗ ψ) for step IV instead of the controlled shift.
    pub fn with_entangler(config: &SchemeConfig, entangler: Operator) -> Result<Self> {
        config.validate()?;
        let n = config.s0_dim;
        let cells = build_planck_basis(config.cell_q_levels, config.cell_p_levels, config.cell_widths)?;
        let space = CompositeSpace::new([
            (S0, n),
            (A_PRIME, cells.dim()),
            (PSI, config.meter_dim),
            (POINTER, config.pointer_dim),
        ])?;

        let (j_start, j_end) = if config.eigenstate_prep {
            (0.0, 0.0)
        } else {
            (config.j_start, config.j_end)
        };
        let drive = Arc::new(BarrierDrive::new(
            n,
            j_start,
            j_end,
            config.bias,
            config.bias_end.unwrap_or(config.bias),
        ));
        let schedule = DriveSchedule::linear(drive.clone(), config.t_f, config.steps)?;
        let u_ii = if config.eigenstate_prep {
            Operator::identity(n)
        } else {
            schedule.total_propagator()?
        };

        let obs = observable(n);
        let meter = observable(config.meter_dim);
        let nsm_pointer = PointerModel::cyclic(cells.dim(), config.nsm_coupling, config.nsm_duration)?;
        let event_pointer = PointerModel::cyclic(config.pointer_dim, config.event_coupling, config.event_duration)?;

        let initial_sectors = s_sectors(&drive.at(schedule.path()[0])?, cells.dim())?;
        let final_sectors = s_sectors(&drive.at(schedule.path()[config.steps])?, cells.dim())?;
        let initial_outcomes = sector_projector_set(&initial_sectors)?.embed(&space, &S_LABELS)?;
        let final_outcomes = sector_projector_set(&final_sectors)?.embed(&space, &S_LABELS)?;

        Ok(Self {
            u_ii: LocalOperator::new(&space, &[S0], u_ii)?,
            u_iii: LocalOperator::new(&space, &S_LABELS, nsm_pointer.coupling_unitary(&obs)?)?,
            s_cells: ProjectorSet::computational(n * cells.dim())?.embed(&space, &S_LABELS)?,
            entangler: LocalOperator::new(&space, &[S0, PSI], entangler)?,
            u_v: LocalOperator::new(&space, &M_LABELS, event_pointer.coupling_unitary(&meter)?)?,
            m_cells: ProjectorSet::computational(config.meter_dim * config.pointer_dim)?.embed(&space, &M_LABELS)?,
            meter_outcomes: ProjectorSet::computational(config.meter_dim)?.embed(&space, &[PSI])?,
            config: config.clone(),
            space,
            cells,
            drive,
            schedule,
            nsm_pointer,
            event_pointer,
            initial_sectors,
            final_sectors,
            initial_outcomes,
            final_outcomes,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn cells(&self) -> &PlanckCellBasis {
        &self.cells
    }

    pub fn schedule(&self) -> &DriveSchedule {
        &self.schedule
    }

    pub fn nsm_pointer(&self) -> &PointerModel {
        &self.nsm_pointer
    }

    pub fn event_pointer(&self) -> &PointerModel {
        &self.event_pointer
    }

    pub fn entangler(&self) -> &LocalOperator {
        &self.entangler
    }

    pub fn step_v_unitary(&self) -> &LocalOperator {
        &self.u_v
    }

    pub fn initial_sectors(&self) -> &[EnergySector] {
        &self.initial_sectors
    }

    pub fn final_sectors(&self) -> &[EnergySector] {
        &self.final_sectors
    }

    pub fn initial_outcomes(&self) -> &ProjectorSet {
        &self.initial_outcomes
    }

    pub fn final_outcomes(&self) -> &ProjectorSet {
        &self.final_outcomes
    }

    pub fn meter_outcomes(&self) -> &ProjectorSet {
        &self.meter_outcomes
    }

    /// `H^S(λ) = H_{S0}(λ) ⊗ I_{A'}`.
    pub fn s_hamiltonian(&self, lambda: f64) -> Result<Operator> {
        tensor(&self.drive.at(lambda)?, &Operator::identity(self.cells.dim()))
    }

    /// Equilibrium `ΔF` between the endpoint Hamiltonians of S.
    pub fn delta_f(&self) -> Result<f64> {
        let path = self.schedule.path();
        delta_f(
            &self.s_hamiltonian(path[0])?,
            &self.s_hamiltonian(path[path.len() - 1])?,
            self.config.beta,
        )
    }

    /// Step I: S thermal (or in `|O_0⟩` for eigenstate preparation), M in
    /// `|𝔐_0⟩ ⊗ |0⟩_A`, no correlations.
    pub fn step_i_prepare(&self) -> Result<DensityMatrix> {
        let n = self.config.s0_dim;
        let s = if self.config.eigenstate_prep {
            Ket::basis(n, 0)?
                .to_density()
                .tensor(&DensityMatrix::maximally_mixed(self.cells.dim())?)?
        } else {
            thermal_state(&self.s_hamiltonian(self.schedule.path()[0])?, self.config.beta)?
        };
        let m = Ket::basis(self.config.meter_dim, 0)?
            .tensor(&self.event_pointer.ready_state())?
            .to_density();
        s.tensor(&m)
    }

    /// Step II: the barrier ramp on S0.
    pub fn step_ii_barrier(&self, state: &DensityMatrix) -> Result<DensityMatrix> {
        self.u_ii.conjugate(state)
    }

    /// Step III: S0–A' coupling, then dephasing in the joint (O, cell) sectors.
    pub fn step_iii_nonselective(&self, state: &DensityMatrix) -> Result<DensityMatrix> {
        measurement::nonselective_measure(&self.u_iii.conjugate(state)?, &self.s_cells)
    }

    /// Step IV with the configured entangler.
    pub fn step_iv_entangle(&self, state: &DensityMatrix) -> Result<DensityMatrix> {
        step_iv_entangle(state, &self.entangler)
    }

    /// Step V coupling: ψ–A interaction without the dephasing.
    pub fn step_v_unitary_part(&self, state: &DensityMatrix) -> Result<DensityMatrix> {
        self.u_v.conjugate(state)
    }

    /// Step V coupling and dephasing in the (𝔐, A cell) sectors. Also reports
    /// whether the trigger states of every configured displacement give the
    /// same meter statistics.
    pub fn step_v_couple(&self, state: &DensityMatrix) -> Result<(DensityMatrix, bool)> {
        let populations = measurement::outcome_probabilities(state, &self.meter_outcomes)?;
        let amplitudes: Vec<C64> = populations.iter().map(|p| C64::new(p.sqrt(), 0.0)).collect();
        let branches = self
            .config
            .displacements
            .iter()
            .enumerate()
            .map(|(k, d)| measurement::PhaseDisplacement::new(*d, format!("A{}", k + 1)))
            .collect::<Result<Vec<_>>>()?;
        let meter = observable(self.config.meter_dim);
        let values: Vec<f64> = (0..self.config.meter_dim).map(|k| meter.matrix()[(k, k)].re).collect();
        let trigger = measurement::phase_equivalence_trigger(&amplitudes, &branches, &values)?;
        let coupled = measurement::nonselective_measure(&self.u_v.conjugate(state)?, &self.m_cells)?;
        Ok((coupled, trigger))
    }

    /// Step V reading: M reads 𝔐 and S collapses with it.
    pub fn step_v_event_read<R: Rng + ?Sized>(
        &self,
        state: &DensityMatrix,
        ledger: EntropyLedger,
        rng: &mut R,
    ) -> Result<EventOutcome> {
        measurement::read(
            state,
            &self.meter_outcomes,
            rng,
            ledger,
            MEASURED_S,
            READER_M,
            EntropyCause::EventReading,
        )
    }

    /// Experimenter's projective energy measurement of S (`initial` selects the endpoint).
    pub fn tpm_read<R: Rng + ?Sized>(
        &self,
        state: &DensityMatrix,
        initial: bool,
        ledger: EntropyLedger,
        rng: &mut R,
    ) -> Result<EventOutcome> {
        let set = if initial {
            &self.initial_outcomes
        } else {
            &self.final_outcomes
        };
        let dephased = measurement::nonselective_measure(state, set)?;
        measurement::read(
            &dephased,
            set,
            rng,
            ledger,
            MEASURED_S,
            EXPERIMENTER,
            EntropyCause::EnergyEventReading,
        )
    }
}

/// Energy sectors of `h_s0 ⊗ I_cells`.
fn s_sectors(h_s0: &Operator, cells: usize) -> Result<Vec<EnergySector>> {
    let h = tensor(h_s0, &Operator::identity(cells))?;
    energy_sectors(&h, NumericPolicy::DEFAULT.grouping_tol)
}

/// Step IV: applies `entangler` (on S0 ⊗ ψ) and rejects it if the S marginal moved.
pub fn step_iv_entangle(state: &DensityMatrix, entangler: &LocalOperator) -> Result<DensityMatrix> {
    let space = entangler.space();
    entangler.operator().require_unitary("step IV entangler")?;
    let before = partial_trace(state, space, &S_LABELS)?;
    let after_state = entangler.conjugate(state)?;
    let after = partial_trace(&after_state, space, &S_LABELS)?;
    let deviation = max_abs(&(before.matrix() - after.matrix()));
    if deviation > STEP_IV_TOL {
        return Err(Error::SchemeConstraint {
            what: "step IV changed the state of S".into(),
            deviation,
            tolerance: STEP_IV_TOL,
        });
    }
    Ok(after_state)
}
