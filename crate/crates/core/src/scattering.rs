//! The probe–scatterer circuit: Hadamard on a probe qubit, controlled-`U`
//! on the system, Hadamard again, then read the probe polarisation.
//!
//! The probe is prepended as qubit 0. With the system in `ρ` the probe ends
//! with `⟨σz⟩ = Re Tr(Uρ)` and transverse polarisation `−Im Tr(Uρ)`.

use num_complex::Complex64;

use crate::circuit::{pauli_expectation_raw, Circuit, GateOp, PauliAxis};
use crate::error::{Error, Result};
use crate::linalg::{qubits_for_dim, ComplexMatrix, DensityMatrix, UnitaryOperator};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringResult {
    /// Probe `⟨σz⟩` after the final Hadamard.
    pub sigma_z: f64,
    /// Transverse probe polarisation, `−Im Tr(Uρ)`. After the final
    /// Hadamard this quadrature is the probe's `⟨σy⟩`.
    pub sigma_x: f64,
}

impl ScatteringResult {
    /// `σz − i·σx`
    pub fn trace_estimate(&self) -> Complex64 {
        Complex64::new(self.sigma_z, -self.sigma_x)
    }
}

fn check_dims(rho: &DensityMatrix, u: &UnitaryOperator) -> Result<()> {
    if rho.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: u.dim(),
        });
    }
    Ok(())
}

/// Runs the circuit on `|0⟩⟨0| ⊗ ρ` and reads out the probe.
pub fn scattering_circuit(rho: &DensityMatrix, u: &UnitaryOperator) -> Result<ScatteringResult> {
    check_dims(rho, u)?;
    let k = qubits_for_dim(rho.dim())?;
    let mut controlled = Circuit::new(k + 1);
    controlled.push(GateOp::controlled_unitary(0, (1..=k).collect(), u.clone()))?;
    scatter_through(rho, &controlled)
}

/// Same readout with the controlled block supplied as a gate list.
///
/// Qubit 0 of `controlled` is the probe, qubits `1..=k` hold `ρ`, and any
/// further qubits are work qubits that start (and must end) in `|0⟩`.
pub fn scatter_through(rho: &DensityMatrix, controlled: &Circuit) -> Result<ScatteringResult> {
    let k = qubits_for_dim(rho.dim())?;
    let total = controlled.num_qubits();
    if total < k + 1 {
        return Err(Error::DimensionMismatch {
            left: k + 1,
            right: total,
        });
    }
    let work_dim = 1usize << (total - k - 1);
    let probe = DensityMatrix::basis_state(2, 0)?;
    let work = DensityMatrix::basis_state(work_dim, 0)?;
    let joint = probe.kron(rho).kron(&work);

    let mut full = Circuit::new(total);
    full.push(GateOp::hadamard(0))?;
    full.extend(controlled)?;
    full.push(GateOp::hadamard(0))?;
    let out = full.run(&joint)?;

    Ok(ScatteringResult {
        sigma_z: pauli_expectation_raw(out.matrix(), total, PauliAxis::Z, 0),
        sigma_x: pauli_expectation_raw(out.matrix(), total, PauliAxis::Y, 0),
    })
}

/// `Tr(Uρ)` by plain matrix arithmetic. Works for any dimension.
pub fn direct_trace(rho: &DensityMatrix, u: &UnitaryOperator) -> Result<Complex64> {
    check_dims(rho, u)?;
    Ok(trace_of_product(u.matrix(), rho.matrix()))
}

/// `Tr(AB)` without forming the product.
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
