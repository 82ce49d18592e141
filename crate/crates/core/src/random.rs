//! Seeded generators: Haar-distributed unitaries via QR of a complex Ginibre
//! matrix, and direction-uniform skew-Hermitians rescaled to a norm bound.
//!
//! All randomness flows through `ChaCha8`, so identical (dim, seed) inputs
//! produce bit-identical matrices on every platform.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::{Complex64, Matrix, SkewHermitianMatrix, UnitaryMatrix};
use crate::norm::op_norm_raw;

/// The workspace-wide deterministic generator.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A generator on an independent stream of the same seed, for batch splitting.
pub fn seeded_stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; consumes two uniforms deterministically.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre(dim: usize, rng: &mut impl Rng) -> Matrix {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    })
}

/// Haar-distributed random unitary, deterministic per (dim, seed).
pub fn random_unitary(dim: usize, seed: u64) -> UnitaryMatrix {
    let mut rng = seeded_rng(seed);
    random_unitary_with(dim, &mut rng)
}

/// Haar-distributed random unitary drawn from an existing generator.
pub fn random_unitary_with(dim: usize, rng: &mut impl Rng) -> UnitaryMatrix {
    assert!(dim >= 1, "dim must be >= 1");
    let g = ginibre(dim, rng);
    // QR with the R diagonal rotated positive gives the Haar distribution.
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let modulus = rjj.norm();
        if modulus > 0.0 {
            let phase = rjj / modulus;
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    UnitaryMatrix::new_unchecked(q)
}

/// Skew-Hermitian with uniform random direction and `||h|| <= norm_bound`
/// (equality unless the draw degenerates), deterministic per (dim, seed).
pub fn random_skew(dim: usize, seed: u64, norm_bound: f64) -> SkewHermitianMatrix {
    let mut rng = seeded_rng(seed);
    random_skew_with(dim, norm_bound, &mut rng)
}

/// Skew-Hermitian drawn from an existing generator.
pub fn random_skew_with(dim: usize, norm_bound: f64, rng: &mut impl Rng) -> SkewHermitianMatrix {
    assert!(dim >= 1, "dim must be >= 1");
    assert!(norm_bound >= 0.0, "norm_bound must be >= 0");
    let g = ginibre(dim, rng);
    let h = (&g - g.adjoint()).map(|z| z * 0.5);
    let norm = op_norm_raw(&h);
    if norm == 0.0 || norm_bound == 0.0 {
        return SkewHermitianMatrix::zeros(dim);
    }
    SkewHermitianMatrix::new_unchecked(h.map(|z| z * (norm_bound / norm)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary(3, 42);
        assert!(u.unitarity_residual() < 1e-12);
        let u = random_unitary(8, 7);
        assert!(u.unitarity_residual() < 1e-12);
    }

    #[test]
    fn random_unitary_deterministic() {
        let a = random_unitary(5, 123);
        let b = random_unitary(5, 123);
        assert_eq!(a.matrix(), b.matrix());
        let c = random_unitary(5, 124);
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn random_skew_respects_bound() {
        let h = random_skew(4, 7, 0.5);
        let n = op_norm_raw(h.matrix());
        assert!(n <= 0.5 + 1e-12, "norm {n}");
        assert!(n > 0.49, "should rescale to the bound, got {n}");
    }

    #[test]
    fn random_skew_zero_bound() {
        let h = random_skew(3, 1, 0.0);
        assert!(h.matrix().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn stream_rngs_are_independent() {
        let mut a = seeded_stream_rng(9, 1);
        let mut b = seeded_stream_rng(9, 2);
        let xa: u64 = a.gen();
        let xb: u64 = b.gen();
        assert_ne!(xa, xb);
        let mut a2 = seeded_stream_rng(9, 1);
        let xa2: u64 = a2.gen();
        assert_eq!(xa, xa2);
    }
}
