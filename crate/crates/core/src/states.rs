//! Input states for the tomographer and spectrometer.

use crate::circuit::depolarize;
use crate::error::Result;
use crate::linalg::DensityMatrix;

/// Ideal limit of a pseudo-pure preparation: `|label⟩⟨label|`, optionally
/// depolarized with strength `noise`.
pub fn pseudo_pure(label: usize, n: usize, noise: Option<f64>) -> Result<DensityMatrix> {
    let rho = DensityMatrix::basis_state(n, label)?;
    match noise {
        Some(p) => depolarize(&rho, p),
        None => Ok(rho),
    }
}

/// `I/N`, the spectrometer's input.
pub fn maximally_mixed(n: usize) -> DensityMatrix {
    DensityMatrix::maximally_mixed(n)
}
