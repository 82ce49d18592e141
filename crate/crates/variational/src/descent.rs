//! Constructive descent for irreducible pairs with non-scalar commutator.
//!
//! For an irreducible pair the differential L is onto su(n), so gamma is
//! locally open: any special unitary near gamma(u, v) is reachable. The step
//! builds a target w* from gamma by shrinking the extremal eigenangles and
//! redistributing the deficit (keeping det = 1), pulls the difference back
//! through L in least squares, and backtracks along the resulting tangent
//! until the commutator norm strictly decreases.

use serde::{Deserialize, Serialize};
use unitary_core::{
    commutator_norm, exp_skew, gamma, Complex64, Matrix, SkewHermitianMatrix, ToleranceConfig,
    UnitaryEigen, UnitaryMatrix, UnitaryPair,
};

use crate::certificate::scalar_commutator;
use crate::dgamma::{dgamma_operator, regularity_report};
use crate::error::VariationalError;

/// Fraction by which extremal eigenangles shrink when building the target.
const TARGET_SHRINK: f64 = 0.1;
/// Angles within this of the maximum modulus count as extremal.
const EXTREMAL_TOL: f64 = 1e-9;

/// A successful descent move.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescentOutcome {
    pub pair: UnitaryPair,
    pub old_norm: f64,
    pub new_norm: f64,
    /// Backtracking scale at which the strict decrease appeared.
    pub step_scale: f64,
}

/// One commutator-decreasing move on an irreducible pair with non-scalar
/// gamma. Errors with `PreconditionViolated` when the pair is reducible, has
/// scalar gamma, or already commutes; `NoDecrease` when backtracking runs out.
pub fn descent_step(
    p: &UnitaryPair,
    max_backtracks: usize,
    tol: &ToleranceConfig,
) -> Result<DescentOutcome, VariationalError> {
    let reg = regularity_report(p)?;
    if !reg.irreducible {
        return Err(VariationalError::PreconditionViolated(format!(
            "pair is reducible (commutant dimension {})",
            reg.commutant_dim
        )));
    }
    if scalar_commutator(p).is_some() {
        return Err(VariationalError::PreconditionViolated(
            "gamma is scalar: the pair is a certified local minimum".into(),
        ));
    }
    let old_norm = commutator_norm(p);
    if old_norm <= 0.0 {
        return Err(VariationalError::PreconditionViolated(
            "pair already commutes".into(),
        ));
    }

    let g = gamma(p);
    let eig = UnitaryEigen::new(g.matrix(), tol.angle_tol)?;
    let shrunk = shrink_angles(&eig.angles)?;

    // difference generator in gamma's eigenbasis: log(gamma⁻¹ w*)
    let n = p.dim();
    let mut diff = Matrix::zeros(n, n);
    for (k, (&a, &b)) in eig.angles.iter().zip(shrunk.iter()).enumerate() {
        let col = eig.vectors.column(k);
        let delta = Complex64::new(0.0, b - a);
        for i in 0..n {
            for j in 0..n {
                diff[(i, j)] += col[i] * col[j].conj() * delta;
            }
        }
    }

    // first-order matching: gamma(u e^{sh}, v e^{sk}) ≈ gamma e^{s Ad_{vu}(L(h,k))},
    // so the L-equation target is the pullback (vu)^H log(gamma⁻¹ w*) (vu)
    let vu = p.v.matrix() * p.u.matrix();
    let target = vu.adjoint() * &diff * &vu;

    let op = dgamma_operator(p);
    let b = op.codomain_coords(&target);
    let svd = op.matrix().clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let pinv_eps = sigma_max * (n * n) as f64 * f64::EPSILON * 100.0;
    let coords = svd
        .solve(&b, pinv_eps)
        .map_err(|e| VariationalError::Internal(format!("least squares failed: {e}")))?;
    let (h, k) = op.domain_matrices(&coords);

    let mut scale = 1.0_f64;
    for _ in 0..max_backtracks.max(1) {
        let uh = exp_skew(&SkewHermitianMatrix::new_unchecked(h.map(|z| z * scale)))?;
        let vk = exp_skew(&SkewHermitianMatrix::new_unchecked(k.map(|z| z * scale)))?;
        let candidate = UnitaryPair::new(
            UnitaryMatrix::new_unchecked(p.u.matrix() * uh.matrix()),
            UnitaryMatrix::new_unchecked(p.v.matrix() * vk.matrix()),
        )
        .expect("dims");
        let new_norm = commutator_norm(&candidate);
        if new_norm < old_norm {
            return Ok(DescentOutcome {
                pair: candidate,
                old_norm,
                new_norm,
                step_scale: scale,
            });
        }
        scale *= 0.5;
    }
    Err(VariationalError::NoDecrease {
        backtracks: max_backtracks,
    })
}

/// Shrink every extremal angle by `TARGET_SHRINK` and spread the deficit over
/// the rest so the sum (hence the determinant) is unchanged. When every angle
/// is extremal, or spreading would create a new maximum, fall back to a
/// uniform shift of all angles, which also preserves the sum.
fn shrink_angles(angles: &[f64]) -> Result<Vec<f64>, VariationalError> {
    let n = angles.len();
    let max_abs = angles.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    if max_abs <= 0.0 {
        return Err(VariationalError::PreconditionViolated(
            "gamma has no angle to shrink".into(),
        ));
    }
    let extremal: Vec<bool> = angles
        .iter()
        .map(|a| a.abs() >= max_abs - EXTREMAL_TOL)
        .collect();
    let n_ext = extremal.iter().filter(|&&e| e).count();

    if n_ext < n {
        let deficit: f64 = angles
            .iter()
            .zip(&extremal)
            .filter(|(_, &e)| e)
            .map(|(a, _)| a * TARGET_SHRINK)
            .sum();
        let share = deficit / (n - n_ext) as f64;
        let shrunk: Vec<f64> = angles
            .iter()
            .zip(&extremal)
            .map(|(a, &e)| if e { a * (1.0 - TARGET_SHRINK) } else { a + share })
            .collect();
        let new_max = shrunk.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        if new_max < max_abs {
            return Ok(shrunk);
        }
    }

    // uniform fallback: theta_k (1 - s) + s (sum/n) keeps the sum and strictly
    // shrinks the maximum modulus unless gamma is scalar (excluded upstream)
    let mean: f64 = angles.iter().sum::<f64>() / n as f64;
    let shrunk: Vec<f64> = angles
        .iter()
        .map(|a| a * (1.0 - TARGET_SHRINK) + TARGET_SHRINK * mean)
        .collect();
    let new_max = shrunk.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    if new_max >= max_abs {
        return Err(VariationalError::Internal(format!(
            "target construction failed to shrink the extremal angle {max_abs}"
        )));
    }
    Ok(shrunk)
}
