//! Discrete phase space of an `N`-level system on a `2N × 2N` grid.
//!
//! The phase-point operators are
//!
//! ```text
//! A(q, p) = (1/2N) · Ũ^q · R · Ṽ^(−p) · exp(iπ·pq/N)
//! ```
//!
//! with `Ũ|x⟩ = |x+1⟩`, `Ṽ = F Ũ F† = diag(ω^x)`, `R|x⟩ = |−x⟩` (all mod
//! `N`). `2N·A(q,p)` is a Hermitian unitary, so `W(q,p) = Tr(A(q,p)ρ)` can be
//! measured by the scattering circuit and is bounded by `1/2N`.
//!
//! Shifting `q` or `p` by `N` only flips the sign of `A`
//! (`A(q+N,p) = (−1)^p A(q,p)`, `A(q,p+N) = (−1)^q A(q,p)`), so the `N × N`
//! subgrid is an orthogonal basis with `Tr(A(α)A(β)) = δ_αβ / 4N`, and each
//! quadrant contributes the same `W·A` term. Expansions over the full grid
//! therefore carry the prefactor `N`:
//!
//! ```text
//! ρ = N · Σ_{2N×2N} W(α) A(α)        Tr(ρ₁ρ₂) = N · Σ_{2N×2N} W₁(α) W₂(α)
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    root_of_unity, ComplexMatrix, DensityMatrix, UnitaryOperator, ONE, PSD_TOL, STRUCTURE_TOL, ZERO,
};
use crate::scattering::{scattering_circuit, trace_of_product};

/// A point `(q, p)` of the `2N × 2N` grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhasePoint {
    pub q: usize,
    pub p: usize,
    pub n: usize,
}

impl PhasePoint {
    pub fn new(q: usize, p: usize, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "phase space needs N >= 2, got {n}"
            )));
        }
        if q >= 2 * n || p >= 2 * n {
            return Err(Error::InvalidArgument(format!(
                "phase point ({q}, {p}) outside the {0}x{0} grid",
                2 * n
            )));
        }
        Ok(Self { q, p, n })
    }

    /// `exp(iπ·pq/N)` with `pq` reduced mod `2N` first.
    pub fn phase(&self) -> Complex64 {
        root_of_unity(((self.p * self.q) % (2 * self.n)) as i64, 2 * self.n)
    }
}

/// Cyclic shift `Ũ|x⟩ = |x+1 mod n⟩`.
pub fn shift_u(n: usize) -> UnitaryOperator {
    UnitaryOperator::new_unchecked(ComplexMatrix::from_fn(n, |r, c| {
        if r == (c + 1) % n {
            ONE
        } else {
            ZERO
        }
    }))
}

/// Momentum shift `Ṽ = F Ũ F†`, which is `diag(exp(2πi·x/n))`.
pub fn shift_v(n: usize) -> UnitaryOperator {
    let diag: Vec<Complex64> = (0..n).map(|x| root_of_unity(x as i64, n)).collect();
    UnitaryOperator::new_unchecked(ComplexMatrix::from_diagonal(&diag))
}

/// Reflection `R|x⟩ = |n−x mod n⟩`; fixes `|0⟩`.
pub fn reflection(n: usize) -> UnitaryOperator {
    UnitaryOperator::new_unchecked(ComplexMatrix::from_fn(n, |r, c| {
        if r == (n - c) % n {
            ONE
        } else {
            ZERO
        }
    }))
}

/// `2N·A(α)`: a monomial matrix mapping `|x⟩` to `|q−x⟩` with phase
/// `exp(iπ(pq − 2px)/N)`.
pub fn phase_point_unitary(alpha: PhasePoint) -> UnitaryOperator {
    let PhasePoint { q, p, n } = alpha;
    let two_n = 2 * n;
    let mut m = ComplexMatrix::zeros(n);
    for x in 0..n {
        let row = (q + n - x % n) % n;
        let k = (p * q + two_n * n - (2 * p * x) % two_n) % two_n;
        m[(row, x)] = root_of_unity(k as i64, two_n);
    }
    UnitaryOperator::new_unchecked(m)
}

/// `A(α)`
pub fn phase_point_operator(alpha: PhasePoint) -> ComplexMatrix {
    phase_point_unitary(alpha)
        .into_matrix()
        .scale(Complex64::new(1.0 / (2 * alpha.n) as f64, 0.0))
}

/// Real-valued Wigner function on the `2N × 2N` grid, indexed `[q][p]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    n: usize,
    values: Vec<f64>,
    imag_residue: f64,
}

impl WignerGrid {
    /// `values` is `q`-major: `values[q * 2N + p]`.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "phase space needs N >= 2, got {n}"
            )));
        }
        if values.len() != 4 * n * n {
            return Err(Error::Parse(format!(
                "a grid for N = {n} has {} values, got {}",
                4 * n * n,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("grid contains non-finite values".into()));
        }
        Ok(Self {
            n,
            values,
            imag_residue: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid side length `2N`.
    pub fn side(&self) -> usize {
        2 * self.n
    }

    pub fn get(&self, q: usize, p: usize) -> f64 {
        self.values[q * self.side() + p]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest `|Im Tr(A(α)ρ)|` seen while building the grid.
    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let side = self.side();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &w)| (i / side, i % side, w))
    }

    /// Pointwise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &WignerGrid, b: f64) -> Result<WignerGrid> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        WignerGrid::new(self.n, values)
    }

    /// `N · Σ W₁(α) W₂(α)` over the full grid; equals `Tr(ρ₁ρ₂)`.
    pub fn overlap(&self, other: &WignerGrid) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let dot: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x * y)
            .sum();
        Ok(self.n as f64 * dot)
    }

    pub fn max_abs_diff(&self, other: &WignerGrid) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Output of [`reconstruct`]; `valid` records whether the matrix passed the
/// density-matrix checks.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub matrix: ComplexMatrix,
    pub valid: bool,
}

impl Reconstruction {
    pub fn into_density(self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix)
    }
}

/// All `4N²` phase-point operators of one dimension, built once.
#[derive(Clone, Debug)]
pub struct PhaseSpace {
    n: usize,
    operators: Vec<ComplexMatrix>,
}

impl PhaseSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || n % 2 == 1 {
            return Err(Error::InvalidArgument(format!(
                "discrete phase space is implemented for even N >= 2, got {n}"
            )));
        }
        let side = 2 * n;
        let operators = (0..side * side)
            .map(|i| {
                phase_point_operator(PhasePoint {
                    q: i / side,
                    p: i % side,
                    n,
                })
            })
            .collect();
        Ok(Self { n, operators })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn operator(&self, q: usize, p: usize) -> &ComplexMatrix {
        &self.operators[q * 2 * self.n + p]
    }

    pub fn wigner(&self, rho: &DensityMatrix) -> Result<WignerGrid> {
        if rho.dim() != self.n {
            return Err(Error::DimensionMismatch {
                left: rho.dim(),
                right: self.n,
            });
        }
        let mut residue: f64 = 0.0;
        let values = self
            .operators
            .iter()
            .map(|a| {
                let w = trace_of_product(a, rho.matrix());
                residue = residue.max(w.im.abs());
                w.re
            })
            .collect();
        Ok(WignerGrid {
            n: self.n,
            values,
            imag_residue: residue,
        })
    }

    pub fn reconstruct(&self, w: &WignerGrid) -> Result<Reconstruction> {
        if w.n != self.n {
            return Err(Error::DimensionMismatch {
                left: w.n,
                right: self.n,
            });
        }
        let mut m = ComplexMatrix::zeros(self.n);
        let scale = self.n as f64;
        for (a, &value) in self.operators.iter().zip(&w.values) {
            if value == 0.0 {
                continue;
            }
            for (dst, src) in m.entries_mut().iter_mut().zip(a.entries()) {
                *dst += src * (scale * value);
            }
        }
        let valid = m.hermiticity_error() <= STRUCTURE_TOL
            && (m.trace() - ONE).norm() <= STRUCTURE_TOL
            && m.hermitian_eigenvalues()[0] >= -PSD_TOL;
        Ok(Reconstruction { matrix: m, valid })
    }
}

/// `W(q,p) = Re Tr(A(q,p)ρ)` on the whole grid.
pub fn wigner_direct(rho: &DensityMatrix) -> Result<WignerGrid> {
    PhaseSpace::new(rho.dim())?.wigner(rho)
}

/// `W(α)` read from the scattering circuit run with `U = 2N·A(α)`.
pub fn wigner_via_circuit(rho: &DensityMatrix, alpha: PhasePoint) -> Result<f64> {
    if rho.dim() != alpha.n {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: alpha.n,
        });
    }
    let result = scattering_circuit(rho, &phase_point_unitary(alpha))?;
    Ok(result.sigma_z / (2 * alpha.n) as f64)
}

/// Every grid point through the circuit.
pub fn wigner_grid_via_circuit(rho: &DensityMatrix) -> Result<WignerGrid> {
    let n = rho.dim();
    let side = 2 * n;
    let values = (0..side * side)
        .map(|i| wigner_via_circuit(rho, PhasePoint::new(i / side, i % side, n)?))
        .collect::<Result<Vec<f64>>>()?;
    WignerGrid::new(n, values)
}

/// `ρ = N · Σ_{2N×2N} W(α) A(α)`
pub fn reconstruct(w: &WignerGrid) -> Result<Reconstruction> {
    PhaseSpace::new(w.n)?.reconstruct(w)
}

/// Sum of `w` over the line `{(q,p) : a·p − b·q ≡ c (mod 2N)}`.
///
/// `(0, 1, c)` is the vertical line `q ≡ −c`; `(1, 0, c)` is the horizontal
/// line `p ≡ c`. Their sums are the position and momentum marginals.
pub fn line_sum(w: &WignerGrid, a: i64, b: i64, c: i64) -> Result<f64> {
    let side = w.side() as i64;
    if a.rem_euclid(side) == 0 && b.rem_euclid(side) == 0 {
        return Err(Error::DegenerateLine);
    }
    Ok(w.points()
        .filter(|&(q, p, _)| (a * p as i64 - b * q as i64 - c).rem_euclid(side) == 0)
        .map(|(_, _, v)| v)
        .sum())
}

/// Sum over the column at `q`.
pub fn vertical_line_sum(w: &WignerGrid, q: usize) -> f64 {
    (0..w.side()).map(|p| w.get(q, p)).sum()
}

/// Sum over the row at `p`.
pub fn horizontal_line_sum(w: &WignerGrid, p: usize) -> f64 {
    (0..w.side()).map(|q| w.get(q, p)).sum()
}
