//! Elementary-gate circuits for the controlled shift, reflection and
//! momentum-shift operators, and for the controlled `2N·A(α)` they compose.
//!
//! Register layout of every [`GateSequence`]: qubit 0 is the control (the
//! probe), qubits `1..=n` are the system with qubit 1 most significant, and
//! `max(n − 2, 0)` clean work qubits follow. Multi-controlled NOTs with more
//! than two controls use a Toffoli V-chain on the work qubits, which are
//! returned to `|0⟩`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::circuit::{controlled, Circuit, GateOp};
use crate::error::{Error, Result};
use crate::linalg::{qubits_for_dim, ComplexMatrix, DensityMatrix, UnitaryOperator};
use crate::phasespace::{PhasePoint, WignerGrid};
use crate::scattering::scatter_through;

#[derive(Clone, Debug, PartialEq)]
pub struct GateSequence {
    num_system_qubits: usize,
    num_work_qubits: usize,
    circuit: Circuit,
}

impl GateSequence {
    pub fn new(num_system_qubits: usize) -> Result<Self> {
        if num_system_qubits == 0 {
            return Err(Error::InvalidArgument(
                "synthesis needs at least one system qubit".into(),
            ));
        }
        let work = num_system_qubits.saturating_sub(2);
        Ok(Self {
            num_system_qubits,
            num_work_qubits: work,
            circuit: Circuit::new(1 + num_system_qubits + work),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn num_system_qubits(&self) -> usize {
        self.num_system_qubits
    }

    pub fn num_work_qubits(&self) -> usize {
        self.num_work_qubits
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn gates(&self) -> &[GateOp] {
        self.circuit.gates()
    }

    pub fn len(&self) -> usize {
        self.circuit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuit.is_empty()
    }

    /// Gate count per kind name.
    pub fn counts(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for g in self.gates() {
            *counts.entry(g.kind.name()).or_insert(0) += 1;
        }
        counts
    }

    pub fn append(&mut self, other: &GateSequence) -> Result<()> {
        self.circuit.extend(&other.circuit)
    }

    fn push(&mut self, g: GateOp) {
        self.circuit
            .push(g)
            .expect("synthesised gate fits the register");
    }

    /// Qubit holding the bit of significance `j`.
    fn bit(&self, j: usize) -> usize {
        1 + (self.num_system_qubits - 1 - j)
    }

    fn work(&self, i: usize) -> usize {
        1 + self.num_system_qubits + i
    }

    /// NOT on `target` when every control is `|1⟩`.
    fn multi_controlled_x(&mut self, controls: &[usize], target: usize) {
        match controls {
            [] => self.push(GateOp::x(target)),
            [c] => self.push(GateOp::cnot(*c, target)),
            [a, b] => self.push(GateOp::toffoli(*a, *b, target)),
            _ => {
                let m = controls.len();
                assert!(
                    m - 2 <= self.num_work_qubits,
                    "not enough work qubits for {m} controls"
                );
                let mut compute = vec![GateOp::toffoli(controls[0], controls[1], self.work(0))];
                for (i, &c) in controls.iter().enumerate().take(m - 1).skip(2) {
                    compute.push(GateOp::toffoli(c, self.work(i - 2), self.work(i - 1)));
                }
                for g in &compute {
                    self.push(g.clone());
                }
                self.push(GateOp::toffoli(controls[m - 1], self.work(m - 3), target));
                for g in compute.into_iter().rev() {
                    self.push(g);
                }
            }
        }
    }

    /// Controlled `x → x + 2^low` on the system, carried from the top bit down.
    fn controlled_increment(&mut self, low: usize) {
        for j in (low..self.num_system_qubits).rev() {
            let mut controls = vec![0];
            controls.extend((low..j).map(|i| self.bit(i)));
            self.multi_controlled_x(&controls, self.bit(j));
        }
    }

    /// Full unitary over all qubits, including work qubits.
    pub fn composed(&self) -> UnitaryOperator {
        self.circuit.unitary()
    }

    /// The action on probe ⊗ system with the work qubits entering in `|0⟩`,
    /// and the largest amplitude left on a dirty work state.
    pub fn controlled_action(&self) -> (ComplexMatrix, f64) {
        let full = self.composed();
        let w = self.num_work_qubits;
        let dim = 1usize << (1 + self.num_system_qubits);
        let block = ComplexMatrix::from_fn(dim, |r, c| full.matrix()[(r << w, c << w)]);
        let mut leakage: f64 = 0.0;
        for c in 0..dim {
            for r in 0..dim {
                for dirty in 1..1usize << w {
                    leakage = leakage.max(full.matrix()[((r << w) | dirty, c << w)].norm());
                }
            }
        }
        (block, leakage)
    }

    /// Max-norm distance from the dense controlled-`target`, counting any
    /// leakage into the work register.
    pub fn verify_against(&self, target: &UnitaryOperator) -> Result<f64> {
        if target.dim() != 1 << self.num_system_qubits {
            return Err(Error::DimensionMismatch {
                left: target.dim(),
                right: 1 << self.num_system_qubits,
            });
        }
        let (action, leakage) = self.controlled_action();
        Ok(action
            .max_abs_diff(&controlled(target.matrix()))
            .max(leakage))
    }
}

/// Controlled `R`, with `R|x⟩ = |−x mod 2^n⟩`.
///
/// Bit `j` of `−x` is bit `j` of `x` flipped iff some lower bit is set.
/// Bits are processed top-down so the lower bits are still unchanged.
pub fn synth_controlled_reflection(n_sys_qubits: usize) -> Result<GateSequence> {
    let mut seq = GateSequence::new(n_sys_qubits)?;
    for j in (1..n_sys_qubits).rev() {
        let lower: Vec<usize> = (0..j).map(|i| seq.bit(i)).collect();
        if let [only] = lower[..] {
            seq.multi_controlled_x(&[0, only], seq.bit(j));
            continue;
        }
        // flip, then undo the flip when all lower bits are zero
        seq.push(GateOp::cnot(0, seq.bit(j)));
        for &q in &lower {
            seq.push(GateOp::x(q));
        }
        let mut controls = vec![0];
        controls.extend(&lower);
        seq.multi_controlled_x(&controls, seq.bit(j));
        for &q in &lower {
            seq.push(GateOp::x(q));
        }
    }
    Ok(seq)
}

/// Controlled `Ũ^power`, as one controlled adder of `2^k` per set bit `k`
/// of `power mod 2^n`.
pub fn synth_controlled_shift(n_sys_qubits: usize, power: usize) -> Result<GateSequence> {
    let mut seq = GateSequence::new(n_sys_qubits)?;
    let power = power % (1 << n_sys_qubits);
    for k in 0..n_sys_qubits {
        if (power >> k) & 1 == 1 {
            seq.controlled_increment(k);
        }
    }
    Ok(seq)
}

/// Controlled `Ṽ^(−power)`. `Ṽ^(−p)|x⟩ = exp(−2πi·p·x/N)|x⟩` factors into
/// one controlled phase per system bit.
pub fn synth_controlled_vshift(n_sys_qubits: usize, power: usize) -> Result<GateSequence> {
    let mut seq = GateSequence::new(n_sys_qubits)?;
    let n = 1usize << n_sys_qubits;
    let power = power % n;
    for j in 0..n_sys_qubits {
        // angle −2π·p·2^j/N, reduced to (−π, π]
        let k = (power << j) % n;
        if k == 0 {
            continue;
        }
        let mut theta = -2.0 * PI * k as f64 / n as f64;
        if theta <= -PI {
            theta += 2.0 * PI;
        }
        seq.push(GateOp::controlled_phase(0, seq.bit(j), theta));
    }
    Ok(seq)
}

/// Controlled `2N·A(α) = Ũ^q R Ṽ^(−p) · exp(iπpq/N)`: the momentum shift
/// first, then the reflection, then the position shift, with the scalar
/// phase kicked back onto the control qubit.
pub fn synth_phase_point_circuit(alpha: PhasePoint) -> Result<GateSequence> {
    let n_sys = qubits_for_dim(alpha.n)?;
    let mut seq = synth_controlled_vshift(n_sys, alpha.p)?;
    seq.append(&synth_controlled_reflection(n_sys)?)?;
    seq.append(&synth_controlled_shift(n_sys, alpha.q)?)?;
    let k = (alpha.p * alpha.q) % (2 * alpha.n);
    if k != 0 {
        let mut theta = PI * k as f64 / alpha.n as f64;
        if theta > PI {
            theta -= 2.0 * PI;
        }
        seq.push(GateOp::phase(0, theta));
    }
    Ok(seq)
}

/// The whole `2N×2N` grid read through the synthesized gate sequences.
pub fn wigner_grid_via_synthesis(rho: &DensityMatrix) -> Result<WignerGrid> {
    let n = rho.dim();
    qubits_for_dim(n)?;
    let side = 2 * n;
    let values = (0..side * side)
        .map(|i| {
            let seq = synth_phase_point_circuit(PhasePoint::new(i / side, i % side, n)?)?;
            Ok(scatter_through(rho, seq.circuit())?.sigma_z / side as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    WignerGrid::new(n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::phasespace::{phase_point_unitary, reflection, shift_u, shift_v};
    use crate::random::{random_density, seeded_rng};
    use crate::scattering::{scatter_through, scattering_circuit};

    #[test]
    fn reflection_on_two_qubits_is_one_toffoli() {
        let seq = synth_controlled_reflection(2).unwrap();
        assert_eq!(seq.gates(), &[GateOp::toffoli(0, 2, 1)]);
        assert!(seq.verify_against(&reflection(4)).unwrap() < 1e-12);
    }

    #[test]
    fn reflection_on_one_qubit_is_identity() {
        let seq = synth_controlled_reflection(1).unwrap();
        assert!(seq.is_empty());
        assert!(seq.verify_against(&reflection(2)).unwrap() < 1e-12);
    }

    #[test]
    fn reflection_larger_registers() {
        for n in 3..=4 {
            let seq = synth_controlled_reflection(n).unwrap();
            assert!(
                seq.verify_against(&reflection(1 << n)).unwrap() < 1e-12,
                "n = {n}"
            );
        }
    }

    #[test]
    fn shift_on_two_qubits() {
        // controlled (CNOT from the low bit, then X on the low bit)
        let seq = synth_controlled_shift(2, 1).unwrap();
        assert_eq!(seq.gates(), &[GateOp::toffoli(0, 2, 1), GateOp::cnot(0, 2)]);
        assert!(seq.verify_against(&shift_u(4)).unwrap() < 1e-12);
    }

    #[test]
    fn trivial_shift_powers_are_empty() {
        for n in 1..=3 {
            assert!(synth_controlled_shift(n, 0).unwrap().is_empty());
            assert!(synth_controlled_shift(n, 1 << n).unwrap().is_empty());
            assert!(synth_controlled_vshift(n, 0).unwrap().is_empty());
        }
    }

    #[test]
    fn all_shift_powers() {
        for n in 1..=4 {
            let dim = 1 << n;
            for power in 0..2 * dim {
                let seq = synth_controlled_shift(n, power).unwrap();
                let target = shift_u(dim).power(power as u64);
                assert!(
                    seq.verify_against(&target).unwrap() < 1e-12,
                    "n={n} power={power}"
                );
            }
        }
    }

    #[test]
    fn vshift_on_two_qubits() {
        // Ṽ^(−1) = diag(1, −i, −1, i): −π/2 on the low bit, π on the high bit
        let seq = synth_controlled_vshift(2, 1).unwrap();
        assert_eq!(
            seq.gates(),
            &[
                GateOp::controlled_phase(0, 2, -PI / 2.0),
                GateOp::controlled_phase(0, 1, PI)
            ]
        );
        assert!(seq.verify_against(&shift_v(4).dagger()).unwrap() < 1e-12);
    }

    #[test]
    fn vshift_powers() {
        let seq = synth_controlled_vshift(3, 5).unwrap();
        assert!(seq.verify_against(&shift_v(8).dagger().power(5)).unwrap() < 1e-12);
        assert!(seq
            .gates()
            .iter()
            .all(|g| matches!(g.kind, GateKind::ControlledPhase(_))));
        for n in 1..=3 {
            let dim = 1 << n;
            for power in 0..2 * dim {
                let seq = synth_controlled_vshift(n, power).unwrap();
                let target = shift_v(dim).dagger().power(power as u64);
                assert!(seq.verify_against(&target).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn origin_is_just_the_reflection() {
        let seq = synth_phase_point_circuit(PhasePoint::new(0, 0, 4).unwrap()).unwrap();
        assert_eq!(seq, synth_controlled_reflection(2).unwrap());
    }

    #[test]
    fn phase_point_circuits_for_n4() {
        for q in 0..8 {
            for p in 0..8 {
                let alpha = PhasePoint::new(q, p, 4).unwrap();
                let seq = synth_phase_point_circuit(alpha).unwrap();
                assert!(seq.verify_against(&phase_point_unitary(alpha)).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn work_qubits_come_back_clean() {
        let seq = synth_controlled_shift(4, 7).unwrap();
        assert_eq!(seq.num_work_qubits(), 2);
        let (_, leakage) = seq.controlled_action();
        assert!(leakage < 1e-12);
    }

    #[test]
    fn scalar_phase_on_control_equals_scaled_unitary() {
        let mut rng = seeded_rng(61);
        let alpha = PhasePoint::new(3, 5, 4).unwrap();
        let seq = synth_phase_point_circuit(alpha).unwrap();
        let bare = {
            let mut s = synth_controlled_vshift(2, 5).unwrap();
            s.append(&synth_controlled_reflection(2).unwrap()).unwrap();
            s.append(&synth_controlled_shift(2, 3).unwrap()).unwrap();
            s
        };
        let phase = alpha.phase();
        for _ in 0..20 {
            let rho = random_density(4, &mut rng);
            let with_gate = scatter_through(&rho, seq.circuit())
                .unwrap()
                .trace_estimate();
            let without = scatter_through(&rho, bare.circuit())
                .unwrap()
                .trace_estimate();
            assert!((with_gate - without * phase).norm() < 1e-12);
            let dense = scattering_circuit(&rho, &phase_point_unitary(alpha))
                .unwrap()
                .trace_estimate();
            assert!((with_gate - dense).norm() < 1e-12);
        }
    }

    #[test]
    fn synthesized_grid_matches_direct() {
        let rho = random_density(4, &mut seeded_rng(12));
        let direct = crate::phasespace::wigner_direct(&rho).unwrap();
        assert!(
            wigner_grid_via_synthesis(&rho)
                .unwrap()
                .max_abs_diff(&direct)
                < 1e-12
        );
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(synth_phase_point_circuit(PhasePoint::new(0, 0, 6).unwrap()).is_err());
        assert!(GateSequence::new(0).is_err());
    }
}
