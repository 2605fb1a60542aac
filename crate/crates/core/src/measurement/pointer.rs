use std::f64::consts::PI;

use crate::error::{arg, Error, Result};
use crate::linalg::{eigh, evolve, hermitize, tensor, CMatrix, Ket, Operator, C64};
use crate::policy::NumericPolicy;

/// Cyclic pointer grid with a von Neumann coupling.
///
/// Grid index `k` has position `k` for `k < ⌈d/2⌉` and `k - d` above, so the
/// ready position 0 is index 0. The momentum generator satisfies
/// `exp(-i·s·P) = T^s` for integer `s`, where `T|k⟩ = |k+1 mod d⟩`.
#[derive(Clone, Debug)]
pub struct PointerModel {
    dim: usize,
    position_values: Vec<f64>,
    momentum: Operator,
    coupling: f64,
    duration: f64,
}

impl PointerModel {
    pub fn cyclic(dim: usize, coupling: f64, duration: f64) -> Result<Self> {
        if dim == 0 {
            return Err(arg("pointer dimension must be positive"));
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(arg(format!("coupling must be positive, got {coupling}")));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(arg(format!("duration must be positive, got {duration}")));
        }
        let half = dim.div_ceil(2);
        let position_values = (0..dim)
            .map(|k| if k < half { k as f64 } else { k as f64 - dim as f64 })
            .collect();
        Ok(Self {
            dim,
            position_values,
            momentum: momentum_generator(dim),
            coupling,
            duration,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn position_values(&self) -> &[f64] {
        &self.position_values
    }

    pub fn position_operator(&self) -> Operator {
        Operator::diagonal(&self.position_values).expect("dim > 0")
    }

    pub fn momentum_generator(&self) -> &Operator {
        &self.momentum
    }

    /// `|0⟩`, the pointer at the origin.
    pub fn ready_state(&self) -> Ket {
        Ket::basis(self.dim, 0).expect("dim > 0")
    }

    /// Grid index of an integer position.
    pub fn index_of(&self, position: i64) -> usize {
        position.rem_euclid(self.dim as i64) as usize
    }

    /// Integer grid shift `-μΛ·o` for eigenvalue `o`.
    pub fn shift_for(&self, eigenvalue: f64) -> Result<i64> {
        let shift = -self.duration * self.coupling * eigenvalue;
        let rounded = shift.round();
        if (shift - rounded).abs() > NumericPolicy::DEFAULT.commensurability_tol {
            return Err(Error::Commensurability { eigenvalue, shift });
        }
        Ok(rounded as i64)
    }

    /// Grid shifts for every eigenvalue of `obs`; distinct eigenvalues must land
    /// on distinct grid points.
    pub fn shifts(&self, obs: &Operator) -> Result<Vec<(f64, i64)>> {
        let spec = eigh(obs)?;
        let tol = NumericPolicy::DEFAULT.grouping_tol;
        let mut out: Vec<(f64, i64)> = Vec::new();
        for &e in &spec.values {
            if out.last().is_some_and(|(prev, _)| (e - prev).abs() <= tol) {
                continue;
            }
            out.push((e, self.shift_for(e)?));
        }
        for (a, (ea, sa)) in out.iter().enumerate() {
            for (eb, sb) in &out[a + 1..] {
                if self.index_of(*sa) == self.index_of(*sb) {
                    return Err(arg(format!(
                        "eigenvalues {ea} and {eb} map to the same pointer cell on a {}-point grid",
                        self.dim
                    )));
                }
            }
        }
        Ok(out)
    }

    /// `exp(iμΛ·obs⊗P)`, after the commensurability checks of [`shifts`](Self::shifts).
    pub fn coupling_unitary(&self, obs: &Operator) -> Result<Operator> {
        self.shifts(obs)?;
        let h = von_neumann_hamiltonian(obs, self)?;
        crate::linalg::propagator(&h, self.duration)
    }
}

/// `F·diag(-2πm/d)·F†` with centered integers `m`.
fn momentum_generator(d: usize) -> Operator {
    let n = d as f64;
    let mut p = CMatrix::zeros(d, d);
    for mi in 0..d {
        let m = if mi <= d / 2 { mi as f64 } else { mi as f64 - n };
        let value = -2.0 * PI * m / n;
        // eigenvector f_m(k) = e^{-2πi·m·k/d}/√d
        let f: Vec<C64> = (0..d)
            .map(|k| C64::from_polar(1.0 / n.sqrt(), -2.0 * PI * (mi * k % d) as f64 / n))
            .collect();
        for i in 0..d {
            for j in 0..d {
                p[(i, j)] += f[i] * f[j].conj() * value;
            }
        }
    }
    Operator::hermitian(hermitize(p)).expect("hermitian by construction")
}

/// `-Λ·obs⊗P` on (system, pointer).
pub fn von_neumann_hamiltonian(obs: &Operator, model: &PointerModel) -> Result<Operator> {
    obs.require_hermitian("measured observable")?;
    let obs = Operator::hermitian(hermitize(obs.matrix().clone()))?;
    Ok(tensor(&obs, model.momentum_generator())?.scaled(-model.coupling()))
}

/// Evolves `system ⊗ ready` for time μ under the coupling alone.
///
/// Each eigen-branch `|o⟩` ends with its pointer moved to `-μΛ·o`.
pub fn entangle_pointer(system: &Ket, ready_pointer: &Ket, obs: &Operator, model: &PointerModel) -> Result<Ket> {
    if ready_pointer.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: ready_pointer.dim(),
        });
    }
    if system.dim() != obs.dim() {
        return Err(Error::DimensionMismatch {
            expected: obs.dim(),
            found: system.dim(),
        });
    }
    let at_origin = ready_pointer.amplitudes()[0].norm_sqr();
    if (1.0 - at_origin) > NumericPolicy::DEFAULT.norm_tol {
        return Err(Error::Precondition(format!(
            "ready pointer must sit at the origin (weight there {at_origin})"
        )));
    }
    model.shifts(obs)?;
    let h = von_neumann_hamiltonian(obs, model)?;
    evolve(&system.tensor(ready_pointer)?, &h, model.duration())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, propagator};

    #[test]
    fn momentum_generates_translations() {
        for d in [1, 2, 5, 8] {
            let m = PointerModel::cyclic(d, 1.0, 1.0).unwrap();
            for s in [-3i64, -1, 1, 2] {
                let u = propagator(m.momentum_generator(), s as f64).unwrap();
                let mut t = CMatrix::zeros(d, d);
                for k in 0..d {
                    t[(m.index_of(k as i64 + s), k)] = C64::new(1.0, 0.0);
                }
                assert!(max_abs(&(u.matrix() - t)) < 1e-12, "d={d} s={s}");
            }
        }
    }

    #[test]
    fn positions_are_centered() {
        let m = PointerModel::cyclic(4, 1.0, 1.0).unwrap();
        assert_eq!(m.position_values(), &[0.0, 1.0, -2.0, -1.0]);
        assert_eq!(m.index_of(-1), 3);
    }

    #[test]
    fn fractional_shift_rejected() {
        let m = PointerModel::cyclic(8, 0.5, 1.0).unwrap();
        let obs = Operator::diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(m.shifts(&obs), Err(Error::Commensurability { .. })));
    }

    #[test]
    fn wrapped_collision_rejected() {
        let m = PointerModel::cyclic(2, 1.0, 1.0).unwrap();
        let obs = Operator::diagonal(&[1.0, -1.0]).unwrap();
        assert!(m.shifts(&obs).is_err());
    }

    #[test]
    fn zero_observable_gives_zero_hamiltonian() {
        let m = PointerModel::cyclic(4, 2.0, 1.0).unwrap();
        let h = von_neumann_hamiltonian(&Operator::zeros(2), &m).unwrap();
        assert_eq!(max_abs(h.matrix()), 0.0);
    }

    #[test]
    fn pointer_not_at_origin_rejected() {
        let m = PointerModel::cyclic(4, 1.0, 1.0).unwrap();
        let sys = Ket::basis(2, 0).unwrap();
        let obs = Operator::diagonal(&[1.0, -1.0]).unwrap();
        let off = Ket::basis(4, 1).unwrap();
        assert!(matches!(
            entangle_pointer(&sys, &off, &obs, &m),
            Err(Error::Precondition(_))
        ));
    }
}
