use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use unitary_core::matrix::determinant;
use unitary_core::{
    commutator_norm, gamma, op_norm, unitary_angles, Complex64, Matrix, ToleranceConfig,
    UnitaryPair,
};

use crate::error::VariationalError;

/// Residual under which gamma counts as a scalar multiple of the identity.
pub const SCALAR_RESIDUAL: f64 = 1e-8;

/// The scalar lambda with `gamma(p) = lambda I`, when one exists within
/// residual 1e-8; lambda is read off as trace/n.
pub fn scalar_commutator(p: &UnitaryPair) -> Option<Complex64> {
    let g = gamma(p);
    let n = p.dim();
    let lambda = g.matrix().trace() / Complex64::new(n as f64, 0.0);
    let residual = op_norm(&(g.matrix() - Matrix::from_diagonal_element(n, n, lambda)))
        .expect("square");
    (residual < SCALAR_RESIDUAL).then_some(lambda)
}

/// Certificate that a scalar-commutator pair is a local minimum: the scalar,
/// the certified bound `|lambda - 1| = ||uv - vu||`, the eigenangle sum of
/// gamma (a multiple of 2π), and the determinant check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalMinCertificate {
    pub lambda: Complex64,
    /// `|lambda - 1|`; every pair in a neighborhood has commutator norm >= this.
    pub bound: f64,
    /// Sum of gamma's eigenangles, pinned to 2π·Z by det(gamma) = 1.
    pub angle_sum: f64,
    pub det_check: Complex64,
    pub n: usize,
}

/// Issue the local-minimum certificate for a pair whose multiplicative
/// commutator is a scalar other than -1.
pub fn certify_scalar_min(
    p: &UnitaryPair,
    tol: &ToleranceConfig,
) -> Result<LocalMinCertificate, VariationalError> {
    let g = gamma(p);
    let n = p.dim();
    let lambda = g.matrix().trace() / Complex64::new(n as f64, 0.0);
    let residual =
        op_norm(&(g.matrix() - Matrix::from_diagonal_element(n, n, lambda))).expect("square");
    if residual >= SCALAR_RESIDUAL {
        return Err(VariationalError::NotScalarCommutator { residual });
    }
    if (lambda + Complex64::new(1.0, 0.0)).norm() <= tol.angle_tol {
        return Err(VariationalError::MinusOneScalar);
    }
    let bound = (lambda - Complex64::new(1.0, 0.0)).norm();
    let angle_sum: f64 = unitary_angles(&g, tol)?.iter().sum();
    let det_check = determinant(g.matrix())?;

    // certificate-side invariants
    if (lambda.norm() - 1.0).abs() > 1e-9 {
        return Err(VariationalError::Internal(format!(
            "scalar lambda has modulus {}",
            lambda.norm()
        )));
    }
    let turns = angle_sum / (2.0 * PI);
    if (turns - turns.round()).abs() * 2.0 * PI > 1e-6 {
        return Err(VariationalError::Internal(format!(
            "angle sum {angle_sum} is not a multiple of 2 pi"
        )));
    }
    if (det_check - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
        return Err(VariationalError::Internal(format!(
            "det(gamma) = {det_check} is not 1"
        )));
    }
    let cert = LocalMinCertificate {
        lambda,
        bound,
        angle_sum,
        det_check,
        n,
    };
    // the certified bound must reproduce the commutator norm
    let norm = commutator_norm(p);
    if (cert.bound - norm).abs() > 1e-9 {
        return Err(VariationalError::Internal(format!(
            "bound {} differs from commutator norm {norm}",
            cert.bound
        )));
    }
    Ok(cert)
}
