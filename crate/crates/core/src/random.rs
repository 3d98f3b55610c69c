//! Seeded random states and unitaries for property suites and CLI fixtures.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, DensityMatrix, UnitaryOperator};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix of independent standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryOperator {
    let g = ginibre(dim, rng).to_nalgebra();
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    UnitaryOperator::new_unchecked(ComplexMatrix::from_nalgebra(&q))
}

/// Full-rank random state `GG†/Tr(GG†)`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, rng);
    let ggd = g.matmul(&g.dagger()).expect("same dim");
    let tr = ggd.trace().re;
    DensityMatrix::new_unchecked(ggd.scale(Complex64::new(1.0 / tr, 0.0)))
}

/// Random pure state `|ψ⟩⟨ψ|`.
pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let mut psi: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|a| *a /= norm);
    DensityMatrix::pure(&psi).expect("normalised")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = seeded_rng(7);
        for dim in [1, 2, 4, 8, 16] {
            let u = haar_unitary(dim, &mut rng);
            assert!(u.matrix().unitarity_error() < 1e-12, "dim {dim}");
        }
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = seeded_rng(11);
        for dim in [2, 4, 8] {
            let rho = random_density(dim, &mut rng);
            assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
            let psi = random_pure(dim, &mut rng);
            assert!((psi.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_draw() {
        let a = haar_unitary(4, &mut seeded_rng(3));
        let b = haar_unitary(4, &mut seeded_rng(3));
        assert_eq!(a, b);
    }
}
