//! Gate-level circuits evolved exactly on density matrices.
//!
//! Qubit 0 is the most significant bit of the computational-basis label:
//! on `n` qubits, `|q⟩` has `q = Σ_k bit_k · 2^(n−1−k)`. Gates act locally,
//! so a gate on `k` qubits costs `O(4^n · 2^k)` per application instead of a
//! full `2^n × 2^n` conjugation.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{qubits_for_dim, ComplexMatrix, DensityMatrix, UnitaryOperator, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitRegister {
    num_qubits: usize,
}

impl QubitRegister {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument(
                "a register needs at least one qubit".into(),
            ));
        }
        Ok(Self { num_qubits })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Hadamard,
    PauliX,
    PauliY,
    PauliZ,
    /// `diag(1, e^{iθ})`
    PhaseShift(f64),
    Cnot,
    Toffoli,
    /// `diag(1, 1, 1, e^{iθ})`
    ControlledPhase(f64),
    /// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U`, control first.
    ControlledUnitary(UnitaryOperator),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Hadamard => "hadamard",
            GateKind::PauliX => "pauli_x",
            GateKind::PauliY => "pauli_y",
            GateKind::PauliZ => "pauli_z",
            GateKind::PhaseShift(_) => "phase_shift",
            GateKind::Cnot => "cnot",
            GateKind::Toffoli => "toffoli",
            GateKind::ControlledPhase(_) => "controlled_phase",
            GateKind::ControlledUnitary(_) => "controlled_unitary",
        }
    }

    /// Number of qubits the gate touches.
    pub fn arity(&self) -> Result<usize> {
        Ok(match self {
            GateKind::Hadamard
            | GateKind::PauliX
            | GateKind::PauliY
            | GateKind::PauliZ
            | GateKind::PhaseShift(_) => 1,
            GateKind::Cnot | GateKind::ControlledPhase(_) => 2,
            GateKind::Toffoli => 3,
            GateKind::ControlledUnitary(u) => 1 + qubits_for_dim(u.dim())?,
        })
    }

    /// The gate's matrix on its own targets, first target most significant.
    pub fn local_matrix(&self) -> ComplexMatrix {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            GateKind::Hadamard => ComplexMatrix::from_entries(2, vec![h, h, h, -h]).unwrap(),
            GateKind::PauliX => ComplexMatrix::from_entries(2, vec![ZERO, ONE, ONE, ZERO]).unwrap(),
            GateKind::PauliY => ComplexMatrix::from_entries(2, vec![ZERO, -I, I, ZERO]).unwrap(),
            GateKind::PauliZ => ComplexMatrix::from_diagonal(&[ONE, -ONE]),
            GateKind::PhaseShift(theta) => {
                ComplexMatrix::from_diagonal(&[ONE, Complex64::from_polar(1.0, *theta)])
            }
            GateKind::Cnot => controlled(&GateKind::PauliX.local_matrix()),
            GateKind::Toffoli => controlled(&GateKind::Cnot.local_matrix()),
            GateKind::ControlledPhase(theta) => {
                controlled(&GateKind::PhaseShift(*theta).local_matrix())
            }
            GateKind::ControlledUnitary(u) => controlled(u.matrix()),
        }
    }

    pub fn dagger(&self) -> GateKind {
        match self {
            GateKind::PhaseShift(t) => GateKind::PhaseShift(-t),
            GateKind::ControlledPhase(t) => GateKind::ControlledPhase(-t),
            GateKind::ControlledUnitary(u) => GateKind::ControlledUnitary(u.dagger()),
            other => other.clone(),
        }
    }
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ m`
pub fn controlled(m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.dim();
    let mut out = ComplexMatrix::identity(2 * d);
    for r in 0..d {
        for c in 0..d {
            out[(d + r, d + c)] = m[(r, c)];
        }
    }
    out
}

/// A gate bound to qubit indices, controls first.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl GateOp {
    /// Checks arity and that the targets are distinct.
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self> {
        let expected = kind.arity()?;
        if targets.len() != expected {
            return Err(Error::Arity {
                kind: kind.name(),
                expected,
                got: targets.len(),
            });
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(Error::DuplicateTargets(targets));
            }
        }
        Ok(Self { kind, targets })
    }

    pub fn hadamard(q: usize) -> Self {
        Self {
            kind: GateKind::Hadamard,
            targets: vec![q],
        }
    }

    pub fn x(q: usize) -> Self {
        Self {
            kind: GateKind::PauliX,
            targets: vec![q],
        }
    }

    pub fn phase(q: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::PhaseShift(theta),
            targets: vec![q],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            targets: vec![control, target],
        }
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Toffoli,
            targets: vec![c0, c1, target],
        }
    }

    pub fn controlled_phase(control: usize, target: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::ControlledPhase(theta),
            targets: vec![control, target],
        }
    }

    /// Controlled-`u` with `control` followed by the contiguous block
    /// `first_target ..` of `log2(u.dim())` qubits.
    pub fn controlled_unitary(control: usize, targets: Vec<usize>, u: UnitaryOperator) -> Self {
        let mut t = vec![control];
        t.extend(targets);
        Self {
            kind: GateKind::ControlledUnitary(u),
            targets: t,
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        Self::new(self.kind.clone(), self.targets.clone())?;
        if let Some(&index) = self.targets.iter().find(|&&t| t >= num_qubits) {
            return Err(Error::QubitOutOfRange { index, num_qubits });
        }
        Ok(())
    }

    pub fn dagger(&self) -> GateOp {
        GateOp {
            kind: self.kind.dagger(),
            targets: self.targets.clone(),
        }
    }
}

/// Flat-index offsets of the `2^k` local basis states of `targets`, first
/// target most significant, and the mask of all target bits.
fn local_offsets(num_qubits: usize, targets: &[usize]) -> (Vec<usize>, usize) {
    let k = targets.len();
    let bits: Vec<usize> = targets
        .iter()
        .map(|&t| 1usize << (num_qubits - 1 - t))
        .collect();
    let mask = bits.iter().fold(0, |m, b| m | b);
    let offsets = (0..1usize << k)
        .map(|l| {
            bits.iter()
                .enumerate()
                .filter(|(j, _)| (l >> (k - 1 - j)) & 1 == 1)
                .fold(0, |acc, (_, b)| acc | b)
        })
        .collect();
    (offsets, mask)
}

/// `v ← G v` with `G` acting on `targets`.
pub(crate) fn apply_to_vector(
    v: &mut [Complex64],
    num_qubits: usize,
    targets: &[usize],
    local: &ComplexMatrix,
) {
    let (offsets, mask) = local_offsets(num_qubits, targets);
    let k = offsets.len();
    let mut buf = vec![ZERO; k];
    for base in (0..v.len()).filter(|i| i & mask == 0) {
        for (b, &o) in buf.iter_mut().zip(&offsets) {
            *b = v[base | o];
        }
        for (l, &o) in offsets.iter().enumerate() {
            v[base | o] = local.row(l).iter().zip(&buf).map(|(g, x)| g * x).sum();
        }
    }
}

/// `ρ ← G ρ G†` with `G` acting on `targets`.
pub(crate) fn conjugate_in_place(
    rho: &mut ComplexMatrix,
    num_qubits: usize,
    targets: &[usize],
    local: &ComplexMatrix,
) {
    let dim = rho.dim();
    let (offsets, mask) = local_offsets(num_qubits, targets);
    let k = offsets.len();
    let mut buf = vec![ZERO; k];
    let entries = rho.entries_mut();

    // left multiply: mixes rows within each group
    for base in (0..dim).filter(|i| i & mask == 0) {
        for col in 0..dim {
            for (b, &o) in buf.iter_mut().zip(&offsets) {
                *b = entries[(base | o) * dim + col];
            }
            for (l, &o) in offsets.iter().enumerate() {
                entries[(base | o) * dim + col] =
                    local.row(l).iter().zip(&buf).map(|(g, x)| g * x).sum();
            }
        }
    }
    // right multiply by G†: mixes columns with conj(G)
    for row in 0..dim {
        let r = &mut entries[row * dim..(row + 1) * dim];
        for base in (0..dim).filter(|i| i & mask == 0) {
            for (b, &o) in buf.iter_mut().zip(&offsets) {
                *b = r[base | o];
            }
            for (l, &o) in offsets.iter().enumerate() {
                r[base | o] = local
                    .row(l)
                    .iter()
                    .zip(&buf)
                    .map(|(g, x)| g.conj() * x)
                    .sum();
            }
        }
    }
}

/// Full `2^n`-dimensional unitary of `g`, identity on the other qubits.
pub fn gate_matrix(g: &GateOp, num_qubits: usize) -> Result<UnitaryOperator> {
    QubitRegister::new(num_qubits)?;
    g.validate(num_qubits)?;
    let dim = 1usize << num_qubits;
    let local = g.kind.local_matrix();
    let mut out = ComplexMatrix::zeros(dim);
    let mut column = vec![ZERO; dim];
    for c in 0..dim {
        column.iter_mut().for_each(|z| *z = ZERO);
        column[c] = ONE;
        apply_to_vector(&mut column, num_qubits, &g.targets, &local);
        for (r, &z) in column.iter().enumerate() {
            out[(r, c)] = z;
        }
    }
    Ok(UnitaryOperator::new_unchecked(out))
}

/// `G ρ G†`
pub fn apply(rho: &DensityMatrix, g: &GateOp) -> Result<DensityMatrix> {
    let n = qubits_for_dim(rho.dim())?;
    g.validate(n)?;
    let mut m = rho.matrix().clone();
    conjugate_in_place(&mut m, n, &g.targets, &g.kind.local_matrix());
    Ok(DensityMatrix::new_unchecked(m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// `Tr(ρ σ_axis)` with the Pauli embedded at `qubit`.
pub fn pauli_expectation(rho: &DensityMatrix, axis: PauliAxis, qubit: usize) -> Result<f64> {
    let n = qubits_for_dim(rho.dim())?;
    if qubit >= n {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            num_qubits: n,
        });
    }
    Ok(pauli_expectation_raw(rho.matrix(), n, axis, qubit))
}

pub(crate) fn pauli_expectation_raw(
    m: &ComplexMatrix,
    num_qubits: usize,
    axis: PauliAxis,
    qubit: usize,
) -> f64 {
    let bit = 1usize << (num_qubits - 1 - qubit);
    let mut acc = 0.0;
    for i in (0..m.dim()).filter(|i| i & bit == 0) {
        let j = i | bit;
        acc += match axis {
            PauliAxis::Z => m[(i, i)].re - m[(j, j)].re,
            PauliAxis::X => 2.0 * m[(i, j)].re,
            PauliAxis::Y => -2.0 * m[(i, j)].im,
        };
    }
    acc
}

/// `(1−p)ρ + p·I/N`
pub fn depolarize(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "depolarizing strength {p} outside [0, 1]"
        )));
    }
    rho.mix(&DensityMatrix::maximally_mixed(rho.dim()), 1.0 - p)
}

/// An ordered gate list on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<GateOp>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<GateOp>) -> Result<Self> {
        QubitRegister::new(num_qubits)?;
        for g in &gates {
            g.validate(num_qubits)?;
        }
        Ok(Self { num_qubits, gates })
    }

    pub fn push(&mut self, g: GateOp) -> Result<()> {
        g.validate(self.num_qubits)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Reversed circuit of daggered gates.
    pub fn dagger(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(GateOp::dagger).collect(),
        }
    }

    pub fn run(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let n = qubits_for_dim(rho.dim())?;
        if n != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: rho.dim(),
                right: 1 << self.num_qubits,
            });
        }
        let mut m = rho.matrix().clone();
        for g in &self.gates {
            conjugate_in_place(&mut m, n, &g.targets, &g.kind.local_matrix());
        }
        Ok(DensityMatrix::new_unchecked(m))
    }

    /// The composed unitary, last gate leftmost.
    pub fn unitary(&self) -> UnitaryOperator {
        let dim = 1usize << self.num_qubits;
        let locals: Vec<ComplexMatrix> = self.gates.iter().map(|g| g.kind.local_matrix()).collect();
        let mut out = ComplexMatrix::zeros(dim);
        let mut column = vec![ZERO; dim];
        for c in 0..dim {
            column.iter_mut().for_each(|z| *z = ZERO);
            column[c] = ONE;
            for (g, local) in self.gates.iter().zip(&locals) {
                apply_to_vector(&mut column, self.num_qubits, &g.targets, local);
            }
            for (r, &z) in column.iter().enumerate() {
                out[(r, c)] = z;
            }
        }
        UnitaryOperator::new_unchecked(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, random_density, seeded_rng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn all_kinds(rng: &mut rand_chacha::ChaCha8Rng) -> Vec<GateOp> {
        vec![
            GateOp::hadamard(1),
            GateOp::x(0),
            GateOp::new(GateKind::PauliY, vec![2]).unwrap(),
            GateOp::new(GateKind::PauliZ, vec![1]).unwrap(),
            GateOp::phase(2, 0.37),
            GateOp::cnot(2, 0),
            GateOp::toffoli(1, 2, 0),
            GateOp::controlled_phase(0, 2, -1.1),
            GateOp::controlled_unitary(1, vec![0, 2], haar_unitary(4, rng)),
        ]
    }

    #[test]
    fn hadamard_matrix() {
        let h = gate_matrix(&GateOp::hadamard(0), 1).unwrap();
        let s = FRAC_1_SQRT_2;
        let expected = ComplexMatrix::from_entries(1 << 1, vec![c(s), c(s), c(s), c(-s)]).unwrap();
        assert!(h.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn cnot_swaps_10_and_11() {
        let m = gate_matrix(&GateOp::cnot(0, 1), 2).unwrap();
        let expected = ComplexMatrix::from_fn(4, |r, col| {
            let image = match col {
                2 => 3,
                3 => 2,
                k => k,
            };
            if r == image {
                ONE
            } else {
                ZERO
            }
        });
        assert_eq!(m.matrix(), &expected);
    }

    #[test]
    fn controlled_sigma_x_is_cnot() {
        let x = UnitaryOperator::new(GateKind::PauliX.local_matrix()).unwrap();
        let cu = gate_matrix(&GateOp::controlled_unitary(0, vec![1], x), 2).unwrap();
        assert_eq!(cu, gate_matrix(&GateOp::cnot(0, 1), 2).unwrap());
    }

    #[test]
    fn non_adjacent_targets_embed_correctly() {
        // CNOT(2 → 0) on three qubits via explicit basis mapping
        let m = gate_matrix(&GateOp::cnot(2, 0), 3).unwrap();
        for col in 0..8usize {
            let image = if col & 1 == 1 { col ^ 0b100 } else { col };
            assert_eq!(m.matrix()[(image, col)], ONE);
        }
    }

    #[test]
    fn invalid_gates_are_rejected() {
        assert!(matches!(
            gate_matrix(&GateOp::x(3), 2),
            Err(Error::QubitOutOfRange {
                index: 3,
                num_qubits: 2
            })
        ));
        assert!(matches!(
            gate_matrix(&GateOp::cnot(1, 1), 2),
            Err(Error::DuplicateTargets(_))
        ));
        assert!(matches!(
            GateOp::new(GateKind::Toffoli, vec![0, 1]),
            Err(Error::Arity {
                expected: 3,
                got: 2,
                ..
            })
        ));
    }

    #[test]
    fn apply_examples() {
        let zero = DensityMatrix::basis_state(2, 0).unwrap();
        let flipped = apply(&zero, &GateOp::x(0)).unwrap();
        assert_eq!(flipped.matrix(), &ComplexMatrix::basis_projector(2, 1));

        let plus = apply(&zero, &GateOp::hadamard(0)).unwrap();
        let half = ComplexMatrix::from_entries(2, vec![c(0.5); 4]).unwrap();
        assert!(plus.matrix().max_abs_diff(&half) < 1e-15);

        let mixed = DensityMatrix::maximally_mixed(8);
        let mut rng = seeded_rng(1);
        for g in all_kinds(&mut rng) {
            let out = apply(&mixed, &g).unwrap();
            assert!(
                out.matrix().max_abs_diff(mixed.matrix()) < 1e-15,
                "{}",
                g.kind.name()
            );
        }
    }

    #[test]
    fn apply_matches_full_conjugation() {
        let mut rng = seeded_rng(2);
        let rho = random_density(8, &mut rng);
        for g in all_kinds(&mut rng) {
            let u = gate_matrix(&g, 3).unwrap();
            let dense = u
                .matrix()
                .matmul(rho.matrix())
                .unwrap()
                .matmul(&u.matrix().dagger())
                .unwrap();
            let local = apply(&rho, &g).unwrap();
            assert!(
                local.matrix().max_abs_diff(&dense) < 1e-14,
                "{}",
                g.kind.name()
            );
        }
    }

    #[test]
    fn apply_preserves_density_invariants() {
        let mut rng = seeded_rng(3);
        let gates = all_kinds(&mut rng);
        for g in &gates {
            for _ in 0..200 {
                let rho = random_density(8, &mut rng);
                let out = apply(&rho, g).unwrap();
                assert!(
                    DensityMatrix::new(out.into_matrix()).is_ok(),
                    "{}",
                    g.kind.name()
                );
            }
        }
    }

    #[test]
    fn gate_matrices_are_unitary() {
        let mut rng = seeded_rng(4);
        for g in all_kinds(&mut rng) {
            assert!(gate_matrix(&g, 3).unwrap().matrix().unitarity_error() < 1e-12);
        }
    }

    #[test]
    fn circuit_then_dagger_is_identity() {
        let mut rng = seeded_rng(5);
        for _ in 0..20 {
            let circuit = Circuit::from_gates(3, all_kinds(&mut rng)).unwrap();
            let rho = random_density(8, &mut rng);
            let there = circuit.run(&rho).unwrap();
            let back = circuit.dagger().run(&there).unwrap();
            assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-10);
        }
    }

    #[test]
    fn circuit_unitary_matches_gate_product() {
        let mut rng = seeded_rng(6);
        let circuit = Circuit::from_gates(3, all_kinds(&mut rng)).unwrap();
        let mut expected = ComplexMatrix::identity(8);
        for g in circuit.gates() {
            expected = gate_matrix(g, 3)
                .unwrap()
                .matrix()
                .matmul(&expected)
                .unwrap();
        }
        assert!(circuit.unitary().matrix().max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn pauli_expectation_examples() {
        let zero = DensityMatrix::basis_state(2, 0).unwrap();
        assert_eq!(pauli_expectation(&zero, PauliAxis::Z, 0).unwrap(), 1.0);
        assert_eq!(pauli_expectation(&zero, PauliAxis::X, 0).unwrap(), 0.0);
        let plus = apply(&zero, &GateOp::hadamard(0)).unwrap();
        assert!((pauli_expectation(&plus, PauliAxis::X, 0).unwrap() - 1.0).abs() < 1e-15);

        // S|+⟩ is the +1 eigenstate of σy
        let plus_i = apply(&plus, &GateOp::phase(0, std::f64::consts::FRAC_PI_2)).unwrap();
        assert!((pauli_expectation(&plus_i, PauliAxis::Y, 0).unwrap() - 1.0).abs() < 1e-15);

        assert!(pauli_expectation(&zero, PauliAxis::Z, 1).is_err());
    }

    #[test]
    fn pauli_expectation_matches_dense_trace() {
        let mut rng = seeded_rng(8);
        let rho = random_density(8, &mut rng);
        let paulis = [
            (PauliAxis::X, GateKind::PauliX),
            (PauliAxis::Y, GateKind::PauliY),
            (PauliAxis::Z, GateKind::PauliZ),
        ];
        for qubit in 0..3 {
            for (axis, kind) in &paulis {
                let sigma =
                    gate_matrix(&GateOp::new(kind.clone(), vec![qubit]).unwrap(), 3).unwrap();
                let dense = sigma.matrix().matmul(rho.matrix()).unwrap().trace();
                let fast = pauli_expectation(&rho, *axis, qubit).unwrap();
                assert!((dense.re - fast).abs() < 1e-14 && dense.im.abs() < 1e-14);
                assert!(fast.abs() <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn depolarize_examples() {
        let zero = DensityMatrix::basis_state(2, 0).unwrap();
        assert_eq!(depolarize(&zero, 0.0).unwrap(), zero);
        assert_eq!(
            depolarize(&zero, 1.0).unwrap(),
            DensityMatrix::maximally_mixed(2)
        );
        let half = depolarize(&zero, 0.5).unwrap();
        assert_eq!(
            half.matrix(),
            &ComplexMatrix::from_diagonal(&[c(0.75), c(0.25)])
        );
        assert!(depolarize(&zero, 1.5).is_err());
        assert!(depolarize(&zero, -0.1).is_err());
    }
}
