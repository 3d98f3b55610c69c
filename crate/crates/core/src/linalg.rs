//! Dense complex matrices and the structural types built on them.
//!
//! Everything in this crate is at most a few thousand rows wide, so a plain
//! row-major `Vec<Complex64>` is the storage. The eigensolvers and the QR
//! factorisation used for random unitaries come from `nalgebra`; the rest is
//! written out directly.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Max-norm tolerance for Hermiticity, unit trace and unitarity checks.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Lower bound accepted for density-matrix eigenvalues.
pub const PSD_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// `exp(2πi k / m)`, exact at quarter turns.
pub fn root_of_unity(k: i64, m: usize) -> Complex64 {
    let m = m as i64;
    let k = k.rem_euclid(m);
    if (4 * k) % m == 0 {
        return match 4 * k / m {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)
}

/// Dense `dim × dim` complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// # Panics
    /// If `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![ONE; dim])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = d;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong counts and
    /// non-finite values.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "matrix dimension must be at least 1".into(),
            ));
        }
        if entries.len() != dim * dim {
            return Err(Error::Parse(format!(
                "expected {} entries for dim {}, got {}",
                dim * dim,
                dim,
                entries.len()
            )));
        }
        if let Some(pos) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Parse(format!(
                "entry {} ({}, {}) is not finite",
                pos,
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { dim, entries })
    }

    /// `|k⟩⟨k|`
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(k, k)] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|k| self[(k, k)]).collect()
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            let row = self.row(r);
            let dst = &mut out.entries[r * n..(r + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Tensor product with `self` as the most significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let (m, n) = (self.dim, other.dim);
        let mut out = Self::zeros(m * n);
        for ar in 0..m {
            for ac in 0..m {
                let a = self[(ar, ac)];
                if a == ZERO {
                    continue;
                }
                for br in 0..n {
                    for bc in 0..n {
                        out[(ar * n + br, ac * n + bc)] = a * other[(br, bc)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    /// Integer power by repeated squaring; `power(0)` is the identity.
    pub fn power(&self, mut exp: u64) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.matmul(&base).expect("same dim");
            }
            exp >>= 1;
            if exp > 0 {
                base = base.matmul(&base).expect("same dim");
            }
        }
        result
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖self − other‖_max`, or infinity when the dimensions differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                err = err.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `‖M†M − I‖_max`
    pub fn unitarity_error(&self) -> f64 {
        let gram = self.dagger().matmul(self).expect("same dim");
        gram.max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Hilbert–Schmidt inner product `Tr(self† · other)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |r, c| m[(r, c)])
    }

    /// Eigenvalues of a general square matrix via complex Schur form.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let schur = nalgebra::Schur::new(self.to_nalgebra());
        let (_, t) = schur.unpack();
        (0..self.dim).map(|k| t[(k, k)]).collect()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .to_nalgebra()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[r * self.dim + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.trace()
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

/// `dim` as a qubit count, if it is a power of two.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::NotPowerOfTwo(dim))
    }
}

/// A matrix known to satisfy `‖U†U − I‖_max ≤ 1e-12`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator(ComplexMatrix);

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let err = matrix.unitarity_error();
        if err > STRUCTURE_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self(matrix))
    }

    /// For matrices unitary by construction (permutations, products of
    /// unitaries).
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.unitarity_error() < 1e-9);
        Self(matrix)
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.dagger())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.matmul(&other.0)?))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kron(&other.0))
    }

    pub fn power(&self, exp: u64) -> Self {
        Self(self.0.power(exp))
    }

    /// Multiplies by a unit-modulus scalar.
    pub fn with_phase(&self, phase: Complex64) -> Self {
        debug_assert!((phase.norm() - 1.0).abs() < 1e-12);
        Self(self.0.scale(phase))
    }
}

impl AsRef<ComplexMatrix> for UnitaryOperator {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// A Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_error();
        if herm > STRUCTURE_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "not Hermitian (max deviation {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > STRUCTURE_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "trace is {} {:+}i, expected 1",
                tr.re, tr.im
            )));
        }
        let min_ev = matrix.hermitian_eigenvalues()[0];
        if min_ev < -PSD_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(Self(matrix))
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    /// `|k⟩⟨k|`
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis label {k} out of range for dimension {dim}"
            )));
        }
        Ok(Self(ComplexMatrix::basis_projector(dim, k)))
    }

    /// `I/N`
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)))
    }

    /// `|ψ⟩⟨ψ|` for a normalised state vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "state vector has norm² {norm}"
            )));
        }
        Ok(Self(ComplexMatrix::from_fn(amplitudes.len(), |r, c| {
            amplitudes[r] * amplitudes[c].conj()
        })))
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidArgument(format!(
                "mixing weight {w} outside [0, 1]"
            )));
        }
        let m = self
            .0
            .scale(Complex64::new(w, 0.0))
            .add(&other.0.scale(Complex64::new(1.0 - w, 0.0)))?;
        Ok(Self(m))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kron(&other.0))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        self.0.inner(&self.0).expect("same dim").re
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// DFT matrix `F[p][q] = exp(+2πi·pq/n)/√n`.
///
/// The `+` sign is paired with `Ṽ = F Ũ F†` in [`crate::phasespace`]; that
/// pair yields `Ṽ = diag(ω^k)` with `ω = exp(2πi/n)`.
pub fn dft_matrix(n: usize) -> UnitaryOperator {
    let s = 1.0 / (n as f64).sqrt();
    UnitaryOperator::new_unchecked(ComplexMatrix::from_fn(n, |p, q| {
        root_of_unity((p * q % n) as i64, n) * s
    }))
}
