//! Spectral density and structure function of a unitary.
//!
//! With `M = 2^n1` counter states and the system maximally mixed, the
//! spectrometer circuit leaves the probe with
//!
//! ```text
//! g(E) = Re[ Σ_{t=0}^{M−1} exp(4πi·E·t/M) · Tr(U^t) ] / (N·M)
//! ```
//!
//! The doubled frequency comes from the counter passing through the
//! controlled Fourier transform on both sides of the controlled power
//! (`F[E][t]·F[t][E] = exp(4πi·Et/M)/M`). `g` is a sum of Dirichlet kernels
//! peaked at `φ = 4πE/M ≡ −θ_k (mod 2π)` for each eigenphase `θ_k`, and is
//! periodic in `E` with period `M/2`.
//!
//! The structure function uses `|Tr(U^t)|²` with the single-frequency
//! kernel `exp(2πi·Et/M)` and normalisation `1/(N²·M)`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::circuit::{apply_to_vector, Circuit, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::linalg::{
    dft_matrix, qubits_for_dim, root_of_unity, ComplexMatrix, DensityMatrix, UnitaryOperator, ZERO,
};

/// Largest register (probe + counter + system) the circuit path simulates.
pub const QUBIT_BUDGET: usize = 12;

/// Counter widths above this are refused even by the direct formula.
pub const MAX_COUNTER_QUBITS: usize = 24;

/// `Tr(U^t)` for `t = 0 ..= t_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSeries {
    values: Vec<Complex64>,
}

impl TraceSeries {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn t_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn max_abs_diff(&self, other: &TraceSeries) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_t_max(t_max: usize) -> Result<()> {
    if t_max < 1 {
        return Err(Error::InvalidArgument("t_max must be at least 1".into()));
    }
    Ok(())
}

/// Traces of powers by repeated multiplication.
pub fn trace_powers(u: &UnitaryOperator, t_max: usize) -> Result<TraceSeries> {
    check_t_max(t_max)?;
    let mut values = Vec::with_capacity(t_max + 1);
    let mut power = ComplexMatrix::identity(u.dim());
    values.push(power.trace());
    for _ in 0..t_max {
        power = power.matmul(u.matrix())?;
        values.push(power.trace());
    }
    Ok(TraceSeries { values })
}

/// Traces of powers as power sums of the eigenvalues.
pub fn trace_powers_from_eigenvalues(u: &UnitaryOperator, t_max: usize) -> Result<TraceSeries> {
    check_t_max(t_max)?;
    let eigenvalues = u.matrix().eigenvalues();
    let mut current = vec![Complex64::new(1.0, 0.0); eigenvalues.len()];
    let mut values = Vec::with_capacity(t_max + 1);
    for _ in 0..=t_max {
        values.push(current.iter().sum());
        for (c, l) in current.iter_mut().zip(&eigenvalues) {
            *c *= l;
        }
    }
    Ok(TraceSeries { values })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    SpectralDensity,
    StructureFunction,
}

/// A real series over the counter label `E ∈ [0, 2^n1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSeries {
    pub kind: SeriesKind,
    pub n1: usize,
    pub bins: Vec<f64>,
}

impl SpectralSeries {
    /// `M = 2^n1`, the number of bins and of summed powers.
    pub fn terms(&self) -> usize {
        1 << self.n1
    }

    /// Kernel phase of bin `e`: `4πE/M` for the spectral density, `2πE/M`
    /// for the structure function.
    pub fn phase(&self, e: usize) -> f64 {
        let turns = match self.kind {
            SeriesKind::SpectralDensity => 2.0,
            SeriesKind::StructureFunction => 1.0,
        };
        2.0 * std::f64::consts::PI * turns * e as f64 / self.terms() as f64
    }

    /// Bins covering one `2π` period of the kernel phase.
    pub fn period(&self) -> usize {
        match self.kind {
            SeriesKind::SpectralDensity => self.terms() / 2,
            SeriesKind::StructureFunction => self.terms(),
        }
    }

    /// Circular local maxima within one period whose height exceeds
    /// `fraction` of the period's maximum.
    pub fn peaks(&self, fraction: f64) -> Vec<usize> {
        let period = self.period();
        let window = &self.bins[..period];
        let top = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..period)
            .filter(|&e| {
                let v = window[e];
                let left = window[(e + period - 1) % period];
                let right = window[(e + 1) % period];
                v > fraction * top && v > left && v >= right
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &SpectralSeries) -> f64 {
        if self.bins.len() != other.bins.len() {
            return f64::INFINITY;
        }
        self.bins
            .iter()
            .zip(&other.bins)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_counter(n1: usize) -> Result<()> {
    if n1 < 2 {
        return Err(Error::InvalidArgument(format!(
            "counter register needs n1 >= 2, got {n1}"
        )));
    }
    if n1 > MAX_COUNTER_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "counter register of {n1} qubits exceeds the limit of {MAX_COUNTER_QUBITS}"
        )));
    }
    Ok(())
}

/// `g(E)` from the Fourier sum of `Tr(U^t)`.
pub fn spectral_density(u: &UnitaryOperator, n1: usize) -> Result<SpectralSeries> {
    check_counter(n1)?;
    let m = 1usize << n1;
    let traces = trace_powers(u, m - 1)?;
    let norm = 1.0 / (u.dim() * m) as f64;
    let bins = (0..m)
        .into_par_iter()
        .map(|e| {
            let sum: Complex64 = traces
                .values()
                .iter()
                .enumerate()
                .map(|(t, tr)| root_of_unity((2 * e * t % m) as i64, m) * tr)
                .sum();
            sum.re * norm
        })
        .collect();
    Ok(SpectralSeries {
        kind: SeriesKind::SpectralDensity,
        n1,
        bins,
    })
}

/// Structure function from the Fourier sum of `|Tr(U^t)|²`.
pub fn structure_function(u: &UnitaryOperator, n1: usize) -> Result<SpectralSeries> {
    check_counter(n1)?;
    let m = 1usize << n1;
    let traces = trace_powers(u, m - 1)?;
    let form: Vec<f64> = traces.values().iter().map(|z| z.norm_sqr()).collect();
    let norm = 1.0 / ((u.dim() * u.dim() * m) as f64);
    let bins = (0..m)
        .into_par_iter()
        .map(|e| {
            let sum: Complex64 = form
                .iter()
                .enumerate()
                .map(|(t, f)| root_of_unity((e * t % m) as i64, m) * f)
                .sum();
            sum.re * norm
        })
        .collect();
    Ok(SpectralSeries {
        kind: SeriesKind::StructureFunction,
        n1,
        bins,
    })
}

fn circuit_layout(u: &UnitaryOperator, n1: usize) -> Result<usize> {
    check_counter(n1)?;
    let k = qubits_for_dim(u.dim())?;
    let required = 1 + n1 + k;
    if required > QUBIT_BUDGET {
        return Err(Error::QubitBudget {
            required,
            budget: QUBIT_BUDGET,
        });
    }
    Ok(k)
}

/// `|t⟩|x⟩ → |t⟩U^t|x⟩` on counter ⊗ system.
pub fn controlled_power(u: &UnitaryOperator, n1: usize) -> UnitaryOperator {
    let (m, n) = (1usize << n1, u.dim());
    let mut w = ComplexMatrix::zeros(m * n);
    let mut power = ComplexMatrix::identity(n);
    for t in 0..m {
        for r in 0..n {
            for c in 0..n {
                w[(t * n + r, t * n + c)] = power[(r, c)];
            }
        }
        power = power.matmul(u.matrix()).expect("same dim");
    }
    UnitaryOperator::new_unchecked(w)
}

/// The spectrometer as an ordinary gate list on probe (qubit 0), counter
/// (`1..=n1`) and system qubits, with dense controlled blocks.
pub fn spectrometer_circuit(u: &UnitaryOperator, n1: usize) -> Result<Circuit> {
    let k = circuit_layout(u, n1)?;
    let counter: Vec<usize> = (1..=n1).collect();
    let everything: Vec<usize> = (1..=n1 + k).collect();
    let qft = dft_matrix(1 << n1);
    let mut c = Circuit::new(1 + n1 + k);
    c.push(GateOp::hadamard(0))?;
    c.push(GateOp::controlled_unitary(0, counter.clone(), qft.clone()))?;
    c.push(GateOp::controlled_unitary(
        0,
        everything,
        controlled_power(u, n1),
    ))?;
    c.push(GateOp::controlled_unitary(0, counter, qft))?;
    c.push(GateOp::hadamard(0))?;
    Ok(c)
}

/// `|0⟩⟨0| ⊗ |E⟩⟨E| ⊗ I/N`
pub fn spectrometer_input(n1: usize, n: usize, e: usize) -> Result<DensityMatrix> {
    let probe = DensityMatrix::basis_state(2, 0)?;
    let counter = DensityMatrix::basis_state(1 << n1, e)?;
    Ok(probe
        .kron(&counter)
        .kron(&DensityMatrix::maximally_mixed(n)))
}

/// `g(E)` read from the probe after simulating the spectrometer circuit.
///
/// The maximally mixed system is an equal mixture of basis states, so each
/// `E` runs `N` pure branches and averages their `⟨σz⟩`. The controlled
/// blocks are applied structurally: the Fourier transform by FFT along the
/// counter, the power block-diagonally per counter value.
pub fn spectral_density_via_circuit(u: &UnitaryOperator, n1: usize) -> Result<SpectralSeries> {
    let k = circuit_layout(u, n1)?;
    let (m, n) = (1usize << n1, u.dim());
    let half = m * n;
    let total_qubits = 1 + n1 + k;

    let mut powers = Vec::with_capacity(m);
    let mut power = ComplexMatrix::identity(n);
    for _ in 0..m {
        powers.push(power.clone());
        power = power.matmul(u.matrix())?;
    }
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(m);
    let fft_scale = 1.0 / (m as f64).sqrt();
    let hadamard = GateKind::Hadamard.local_matrix();

    let controlled_qft = |amps: &mut [Complex64], scratch: &mut Vec<Complex64>| {
        let upper = &mut amps[half..];
        for x in 0..n {
            scratch.clear();
            scratch.extend((0..m).map(|t| upper[t * n + x]));
            fft.process(scratch);
            for (t, z) in scratch.iter().enumerate() {
                upper[t * n + x] = z * fft_scale;
            }
        }
    };

    let bins = (0..m)
        .into_par_iter()
        .map(|e| {
            let mut amps = vec![ZERO; 2 * half];
            let mut scratch = Vec::with_capacity(m);
            let mut block = vec![ZERO; n];
            let mut sigma_z = 0.0;
            for x in 0..n {
                amps.iter_mut().for_each(|a| *a = ZERO);
                amps[e * n + x] = Complex64::new(1.0, 0.0);

                apply_to_vector(&mut amps, total_qubits, &[0], &hadamard);
                controlled_qft(&mut amps, &mut scratch);
                for (t, pw) in powers.iter().enumerate() {
                    let slot = &mut amps[half + t * n..half + (t + 1) * n];
                    for (r, b) in block.iter_mut().enumerate() {
                        *b = pw.row(r).iter().zip(slot.iter()).map(|(a, s)| a * s).sum();
                    }
                    slot.copy_from_slice(&block);
                }
                controlled_qft(&mut amps, &mut scratch);
                apply_to_vector(&mut amps, total_qubits, &[0], &hadamard);

                let p0: f64 = amps[..half].iter().map(|a| a.norm_sqr()).sum();
                let p1: f64 = amps[half..].iter().map(|a| a.norm_sqr()).sum();
                sigma_z += p0 - p1;
            }
            sigma_z / n as f64
        })
        .collect();
    Ok(SpectralSeries {
        kind: SeriesKind::SpectralDensity,
        n1,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{pauli_expectation, PauliAxis};
    use crate::linalg::{I, ONE};
    use crate::phasespace::shift_u;
    use crate::random::{haar_unitary, seeded_rng};

    fn sigma_z() -> UnitaryOperator {
        UnitaryOperator::new(GateKind::PauliZ.local_matrix()).unwrap()
    }

    #[test]
    fn trace_power_examples() {
        let id = trace_powers(&UnitaryOperator::identity(3), 5).unwrap();
        assert!(id.values().iter().all(|&z| z == Complex64::new(3.0, 0.0)));

        let z = trace_powers(&sigma_z(), 5).unwrap();
        let expected = [2.0, 0.0, 2.0, 0.0, 2.0, 0.0];
        for (v, e) in z.values().iter().zip(expected) {
            assert_eq!(*v, Complex64::new(e, 0.0));
        }

        // brute force: only multiples of 4 return the cycle to the identity
        let s = trace_powers(&shift_u(4), 12).unwrap();
        for (t, v) in s.values().iter().enumerate() {
            let expected = if t % 4 == 0 { 4.0 } else { 0.0 };
            assert_eq!(*v, Complex64::new(expected, 0.0), "t = {t}");
        }
        assert!(trace_powers(&sigma_z(), 0).is_err());
    }

    #[test]
    fn eigen_route_agrees_with_products() {
        let mut rng = seeded_rng(41);
        for dim in [2, 4, 8] {
            let u = haar_unitary(dim, &mut rng);
            let a = trace_powers(&u, 64).unwrap();
            let b = trace_powers_from_eigenvalues(&u, 64).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-9);
            assert_eq!(a.values()[0], Complex64::new(dim as f64, 0.0));
            assert!(a.values().iter().all(|z| z.norm() <= dim as f64 + 1e-10));
        }
    }

    #[test]
    fn identity_spectrum_peaks_at_origin() {
        for n1 in 2..=5 {
            let g = spectral_density(&UnitaryOperator::identity(2), n1).unwrap();
            let m = 1 << n1;
            for (e, v) in g.bins.iter().enumerate() {
                // geometric sum: M terms when 2E ≡ 0 (mod M), otherwise 0
                let expected = if (2 * e) % m == 0 { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-12);
            }
            assert_eq!(g.peaks(0.5), vec![0]);
        }
    }

    #[test]
    fn sigma_z_spectrum_has_two_equal_peaks_per_period() {
        let g = spectral_density(&sigma_z(), 3).unwrap();
        // (1/M) Σ_{s<M/2} exp(8πiEs/M): 1/2 for even E, 0 for odd E
        let expected = [0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0];
        for (v, e) in g.bins.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
        assert_eq!(g.peaks(0.5), vec![0, 2]);
        assert!((g.phase(2) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn quarter_turn_spectrum() {
        let u = UnitaryOperator::new(ComplexMatrix::from_diagonal(&[ONE, I])).unwrap();
        let g = spectral_density(&u, 4).unwrap();
        // peaks at φ = 0 and φ = −π/2 ≡ 3π/2, i.e. bins 0 and 6 of 8
        assert_eq!(g.peaks(0.5), vec![0, 6]);
        assert!((g.bins[0] - 0.5).abs() < 1e-12 && (g.bins[6] - 0.5).abs() < 1e-12);
        let area: f64 = g.bins[..g.period()].iter().sum();
        assert!((area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn structure_function_examples() {
        let s = structure_function(&UnitaryOperator::identity(4), 3).unwrap();
        assert!((s.bins[0] - 1.0).abs() < 1e-12);
        assert!(s.bins[1..].iter().all(|v| v.abs() < 1e-12));

        let s = structure_function(&sigma_z(), 3).unwrap();
        for (e, v) in s.bins.iter().enumerate() {
            let expected = if e % 4 == 0 { 0.5 } else { 0.0 };
            assert!((v - expected).abs() < 1e-12, "E = {e}");
        }
        assert_eq!(s.peaks(0.5), vec![0, 4]);
    }

    #[test]
    fn structure_function_is_spectrum_of_doubled_system() {
        // |Tr U^t|² = Tr((U ⊗ U*)^t)
        let mut rng = seeded_rng(43);
        let u = haar_unitary(4, &mut rng);
        let conj =
            UnitaryOperator::new(ComplexMatrix::from_fn(4, |r, c| u.matrix()[(r, c)].conj()))
                .unwrap();
        let doubled = u.kron(&conj);
        let s = structure_function(&u, 4).unwrap();
        let traces = trace_powers(&doubled, 15).unwrap();
        for (e, v) in s.bins.iter().enumerate() {
            let sum: Complex64 = traces
                .values()
                .iter()
                .enumerate()
                .map(|(t, tr)| {
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (e * t) as f64 / 16.0)
                        * tr
                })
                .sum();
            assert!((sum.re / (16.0 * 16.0) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn structured_simulation_matches_gate_level_circuit() {
        let mut rng = seeded_rng(44);
        for (u, n1) in [
            (sigma_z(), 2),
            (haar_unitary(2, &mut rng), 3),
            (haar_unitary(4, &mut rng), 2),
        ] {
            let fast = spectral_density_via_circuit(&u, n1).unwrap();
            let circuit = spectrometer_circuit(&u, n1).unwrap();
            for e in 0..1 << n1 {
                let out = circuit
                    .run(&spectrometer_input(n1, u.dim(), e).unwrap())
                    .unwrap();
                let sz = pauli_expectation(&out, PauliAxis::Z, 0).unwrap();
                assert!((sz - fast.bins[e]).abs() < 1e-12, "E = {e}");
            }
        }
    }

    #[test]
    fn circuit_matches_formula() {
        let mut rng = seeded_rng(45);
        let haar = haar_unitary(4, &mut rng);
        for u in [UnitaryOperator::identity(2), sigma_z(), shift_u(4), haar] {
            for n1 in 2..=4 {
                let a = spectral_density(&u, n1).unwrap();
                let b = spectral_density_via_circuit(&u, n1).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-9);
            }
        }
    }

    #[test]
    fn zero_bin_is_plain_trace_average() {
        let mut rng = seeded_rng(46);
        let u = haar_unitary(4, &mut rng);
        let traces = trace_powers(&u, 7).unwrap();
        let expected: f64 = traces.values().iter().map(|z| z.re).sum::<f64>() / (4.0 * 8.0);
        let g = spectral_density_via_circuit(&u, 3).unwrap();
        assert!((g.bins[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn budget_and_argument_errors() {
        let u = UnitaryOperator::identity(8);
        assert!(matches!(
            spectral_density_via_circuit(&u, 9),
            Err(Error::QubitBudget {
                required: 13,
                budget: 12
            })
        ));
        assert!(spectral_density(&u, 1).is_err());
        assert!(spectral_density_via_circuit(&UnitaryOperator::identity(3), 2).is_err());
        // the formula has no qubit budget
        assert!(spectral_density(&u, 9).is_ok());
    }
}
