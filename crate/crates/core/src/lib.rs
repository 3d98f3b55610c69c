//! Exact simulation of the probe–scatterer quantum circuit in its two dual
//! roles: as a tomographer that reads the discrete Wigner function of a
//! state point by point, and as a spectrometer that reads the smoothed
//! spectral density of a unitary.
//!
//! # Modules
//!
//! - [`linalg`]: dense complex matrices, density matrices, unitaries, DFT.
//! - [`circuit`]: gates, circuits and exact density-matrix evolution.
//! - [`scattering`]: the controlled-`U` probe circuit and its trace oracle.
//! - [`phasespace`]: shift/reflection/phase-point operators, Wigner grids,
//!   reconstruction and line sums.
//! - [`spectrometer`]: spectral density and structure function, by formula
//!   and by circuit simulation.
//! - [`synthesis`]: elementary-gate circuits for the controlled
//!   phase-point operators.
//! - [`states`]: state factory (basis, pseudo-pure, maximally mixed).
//! - [`format`]: JSON/CSV/ASCII interchange formats.
//!
//! # Example
//!
//! ```
//! use qscatter::phasespace::wigner_direct;
//! use qscatter::states::pseudo_pure;
//!
//! let rho = pseudo_pure(1, 4, None).unwrap();
//! let w = wigner_direct(&rho).unwrap();
//! assert!((w.get(2, 0) - 0.125).abs() < 1e-12);
//! ```

pub mod circuit;
pub mod error;
pub mod format;
pub mod linalg;
pub mod phasespace;
pub mod random;
pub mod scattering;
pub mod spectrometer;
pub mod states;
pub mod synthesis;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, UnitaryOperator};
pub use num_complex::Complex64;
