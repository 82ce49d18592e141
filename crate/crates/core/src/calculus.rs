//! The d-calculus on unitaries: `d(x) = |1 - e^{ix}| = 2 sin(x/2)`, principal
//! logarithms, skew exponentials, the multiplicative commutator, and
//! eigenangle extraction.

use std::f64::consts::PI;

use crate::eig::UnitaryEigen;
use crate::error::CoreError;
use crate::matrix::{Complex64, Matrix, SkewHermitianMatrix, UnitaryMatrix, UnitaryPair};
use crate::norm::op_norm_raw;
use crate::tolerance::ToleranceConfig;

/// Distance `|1 - e^{ix}|` between unitaries differing by a rotation of angle x.
pub fn d_func(x: f64) -> Result<f64, CoreError> {
    if !(0.0..=PI).contains(&x) {
        return Err(CoreError::DomainViolation(format!(
            "d is defined on [0, pi], got {x}"
        )));
    }
    Ok(2.0 * (x / 2.0).sin())
}

/// Inverse of `d` on [0, 2]: the rotation angle realizing a given distance.
pub fn d_inv(y: f64) -> Result<f64, CoreError> {
    if !(0.0..=2.0).contains(&y) {
        return Err(CoreError::DomainViolation(format!(
            "d_inv is defined on [0, 2], got {y}"
        )));
    }
    Ok(2.0 * (y / 2.0).asin())
}

/// `||uv - vu||` in operator norm.
pub fn commutator_norm(p: &UnitaryPair) -> f64 {
    let uv = p.u.matrix() * p.v.matrix();
    let vu = p.v.matrix() * p.u.matrix();
    op_norm_raw(&(uv - vu))
}

/// Multiplicative commutator `uvu⁻¹v⁻¹`, a special-unitary matrix.
pub fn gamma(p: &UnitaryPair) -> UnitaryMatrix {
    let m = p.u.matrix() * p.v.matrix() * p.u.matrix().adjoint() * p.v.matrix().adjoint();
    UnitaryMatrix::new_unchecked(m)
}

/// Principal-branch logarithm of a unitary: the skew-Hermitian `h` with
/// `e^h = u` and `||h|| <= pi - angle_tol`.
///
/// Fails with `SpectrumContainsMinusOne` when some eigenangle is within
/// `angle_tol` of the branch cut at ±pi.
pub fn principal_log(u: &UnitaryMatrix, tol: &ToleranceConfig) -> Result<SkewHermitianMatrix, CoreError> {
    let eig = UnitaryEigen::new(u.matrix(), tol.angle_tol)?;
    for &angle in &eig.angles {
        if PI - angle.abs() < tol.angle_tol {
            return Err(CoreError::SpectrumContainsMinusOne {
                angle,
                tol: tol.angle_tol,
            });
        }
    }
    let n = eig.dim();
    let scaled = Matrix::from_fn(n, n, |r, c| {
        eig.vectors[(r, c)] * Complex64::new(0.0, eig.angles[c])
    });
    let h = scaled * eig.vectors.adjoint();
    // re-skew to kill rounding asymmetry
    let h = (&h - h.adjoint()).map(|z| z * 0.5);
    Ok(SkewHermitianMatrix::new_unchecked(h))
}

/// Exponential of a skew-Hermitian matrix, computed spectrally: `-ih` is
/// Hermitian, so `e^h = V diag(e^{i mu}) V*`.
pub fn exp_skew(h: &SkewHermitianMatrix) -> Result<UnitaryMatrix, CoreError> {
    let hermitian = h.matrix().map(|z| z * Complex64::new(0.0, -1.0));
    let (vals, vecs) = crate::eig::hermitian_eigen(&hermitian)?;
    let n = h.dim();
    let scaled = Matrix::from_fn(n, n, |r, c| {
        vecs[(r, c)] * Complex64::new(vals[c].cos(), vals[c].sin())
    });
    Ok(UnitaryMatrix::new_unchecked(scaled * vecs.adjoint()))
}

/// Eigenangles of a unitary in (-pi, pi], sorted ascending; eigenvalues near
/// the negative real axis are reported as +pi.
pub fn unitary_angles(w: &UnitaryMatrix, tol: &ToleranceConfig) -> Result<Vec<f64>, CoreError> {
    Ok(UnitaryEigen::new(w.matrix(), tol.angle_tol)?.angles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::block_diag;
    use crate::random::{random_skew, random_unitary};
    use nalgebra::DVector;

    fn cn(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tols() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn d_endpoints() {
        assert_eq!(d_func(0.0).unwrap(), 0.0);
        assert!((d_func(PI).unwrap() - 2.0).abs() < 1e-15);
        assert!(d_func(-0.1).is_err());
        assert!(d_inv(2.1).is_err());
    }

    #[test]
    fn d_inv_of_sqrt3() {
        let y = 3.0_f64.sqrt();
        assert!((d_inv(y).unwrap() - 2.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn d_mutually_inverse() {
        for k in 0..=100 {
            let x = PI * k as f64 / 100.0;
            let y = d_func(x).unwrap();
            assert!((d_inv(y).unwrap() - x).abs() < 1e-14);
        }
    }

    #[test]
    fn commutator_of_identity_pair_is_zero() {
        let p = UnitaryPair::new(UnitaryMatrix::identity(4), UnitaryMatrix::identity(4)).unwrap();
        assert_eq!(commutator_norm(&p), 0.0);
        let g = gamma(&p);
        assert!(g.matrix().eq(&Matrix::identity(4, 4)));
    }

    #[test]
    fn sign_flip_and_swap_have_commutator_two() {
        // u = diag(1, -1), v = [[0,1],[1,0]]: uv - vu = [[0,2],[-2,0]]
        let u = UnitaryMatrix::new(Matrix::from_diagonal(&DVector::from_vec(vec![
            cn(1.0, 0.0),
            cn(-1.0, 0.0),
        ])))
        .unwrap();
        let v = UnitaryMatrix::new(Matrix::from_row_slice(
            2,
            2,
            &[cn(0.0, 0.0), cn(1.0, 0.0), cn(1.0, 0.0), cn(0.0, 0.0)],
        ))
        .unwrap();
        let p = UnitaryPair::new(u, v).unwrap();
        assert!((commutator_norm(&p) - 2.0).abs() < 1e-12);
        // gamma = -I here
        let g = gamma(&p);
        let err = (g.matrix() + Matrix::identity(2, 2))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn principal_log_of_identity_is_zero() {
        let h = principal_log(&UnitaryMatrix::identity(3), &tols()).unwrap();
        assert!(h.matrix().iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn principal_log_scalar_i() {
        let u = UnitaryMatrix::new(Matrix::from_diagonal_element(1, 1, cn(0.0, 1.0))).unwrap();
        let h = principal_log(&u, &tols()).unwrap();
        assert!((h.matrix()[(0, 0)] - cn(0.0, PI / 2.0)).norm() < 1e-14);
    }

    #[test]
    fn principal_log_rejects_minus_one() {
        let u = UnitaryMatrix::new(Matrix::from_diagonal_element(2, 2, cn(-1.0, 0.0))).unwrap();
        assert!(matches!(
            principal_log(&u, &tols()),
            Err(CoreError::SpectrumContainsMinusOne { .. })
        ));
    }

    #[test]
    fn exp_skew_scalar() {
        let h = SkewHermitianMatrix::new(Matrix::from_diagonal_element(1, 1, cn(0.0, PI / 2.0)))
            .unwrap();
        let u = exp_skew(&h).unwrap();
        assert!((u.matrix()[(0, 0)] - cn(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn exp_skew_distance_matches_d() {
        // || I - e^h || = d(||h||) for ||h|| <= pi
        for seed in 0..20 {
            let bound = 0.15 + 0.14 * seed as f64; // up to ~2.8 < pi
            let h = random_skew(4, seed, bound);
            let u = exp_skew(&h).unwrap();
            let dist = op_norm_raw(&(Matrix::identity(4, 4) - u.matrix()));
            let hn = op_norm_raw(h.matrix());
            let expected = d_func(hn).unwrap();
            assert!(
                (dist - expected).abs() < 1e-10,
                "seed {seed}: {dist} vs {expected}"
            );
        }
    }

    #[test]
    fn log_exp_round_trip() {
        for seed in 0..30 {
            let h = random_skew(5, seed, PI - 0.02);
            let u = exp_skew(&h).unwrap();
            let h2 = principal_log(&u, &tols()).unwrap();
            let u2 = exp_skew(&h2).unwrap();
            let err = op_norm_raw(&(u.matrix() - u2.matrix()));
            assert!(err < 1e-9, "seed {seed}: round trip error {err}");
        }
    }

    #[test]
    fn angles_of_identity_and_sign_pair() {
        let t = tols();
        let a = unitary_angles(&UnitaryMatrix::identity(2), &t).unwrap();
        assert!(a.iter().all(|x| x.abs() < 1e-14));
        let w = UnitaryMatrix::new(Matrix::from_diagonal(&DVector::from_vec(vec![
            cn(1.0, 0.0),
            cn(-1.0, 0.0),
        ])))
        .unwrap();
        let a = unitary_angles(&w, &t).unwrap();
        assert!((a[0] - 0.0).abs() < 1e-14);
        assert!((a[1] - PI).abs() < 1e-14);
    }

    #[test]
    fn angles_of_scalar_omega() {
        let th = 2.0 * PI / 3.0;
        let w =
            UnitaryMatrix::new(Matrix::from_diagonal_element(3, 3, cn(th.cos(), th.sin()))).unwrap();
        let a = unitary_angles(&w, &tols()).unwrap();
        for x in a {
            assert!((x - th).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_product_matches_determinant() {
        let t = tols();
        for seed in 0..20 {
            let w = random_unitary(4, seed);
            let angles = unitary_angles(&w, &t).unwrap();
            let total: f64 = angles.iter().sum();
            let det = crate::matrix::determinant(w.matrix()).unwrap();
            let prod = cn(total.cos(), total.sin());
            assert!((det - prod).norm() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn gamma_has_unit_determinant() {
        for seed in 0..20 {
            let p = UnitaryPair::new(random_unitary(4, seed), random_unitary(4, seed + 1000)).unwrap();
            let g = gamma(&p);
            let det = crate::matrix::determinant(g.matrix()).unwrap();
            assert!((det - cn(1.0, 0.0)).norm() < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn commutator_norm_matches_gamma_distance() {
        for seed in 0..20 {
            let p = UnitaryPair::new(random_unitary(5, seed), random_unitary(5, seed + 77)).unwrap();
            let lhs = commutator_norm(&p);
            let g = gamma(&p);
            let rhs = op_norm_raw(&(g.matrix() - Matrix::identity(5, 5)));
            assert!((lhs - rhs).abs() < 1e-10, "seed {seed}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn op_norm_submultiplicative_and_unitarily_invariant() {
        for seed in 0..10 {
            let a = random_skew(4, seed, 1.5).into_matrix();
            let b = random_skew(4, seed + 500, 2.5).into_matrix();
            let na = op_norm_raw(&a);
            let nb = op_norm_raw(&b);
            let nab = op_norm_raw(&(&a * &b));
            assert!(nab <= na * nb + 1e-10, "seed {seed}");
            let u = random_unitary(4, seed + 1);
            let v = random_unitary(4, seed + 2);
            let sandwich = u.matrix() * &a * v.matrix();
            assert!((op_norm_raw(&sandwich) - na).abs() < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn block_diag_norm_is_max_of_blocks() {
        let a = Matrix::from_diagonal_element(2, 2, cn(0.5, 0.0));
        let b = Matrix::from_diagonal_element(1, 1, cn(0.0, 1.5));
        let m = block_diag(&a, &b);
        assert!((op_norm_raw(&m) - 1.5).abs() < 1e-12);
    }
}
