//! Antipodality and maximal-commutator perturbation.
//!
//! Two unitaries are at maximal distance, `||w1 - w2|| = 2`, exactly when
//! `det(w1 + w2) = 0`. For a pair with `||uv - vu|| = 2` this turns the
//! search for a strictly-smaller commutator into a zero-avoidance problem
//! for the analytic function `f(t) = det(u(t)v + v u(t))` along the path
//! `u(t) = u e^{-th}` with `u = e^h`: `f(0) = 0`, `f(1) = det(2v) != 0`, and
//! zeros of `f` are isolated, so a fine enough one-dimensional scan finds an
//! arbitrarily small `t` with `f(t) != 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use unitary_core::matrix::{determinant, row_norm_product};
use unitary_core::{
    commutator_norm, op_norm, Complex64, CoreError, Matrix, ToleranceConfig, UnitaryEigen,
    UnitaryMatrix, UnitaryPair,
};

#[derive(Debug, Error)]
pub enum AntipodalError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("pair is not at the maximal commutator: ||uv - vu|| = {0}, need 2 within 1e-6")]
    NotAtMaximum(f64),

    #[error("scan of {grid} points up to t_max = {t_max} found no nonzero determinant; refine the grid")]
    ScanExhausted { grid: usize, t_max: f64 },

    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Verdict of the antipodality test `det(w1 + w2) = 0  <=>  ||w1 - w2|| = 2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AntipodalReport {
    pub det_value: Complex64,
    pub norm_value: f64,
    /// True when |det| falls under the scale-normalized zero tolerance.
    pub verdict: bool,
    /// Set when the determinant verdict and the norm cross-check disagree,
    /// which signals tolerance misconfiguration rather than a math failure.
    pub warning: Option<String>,
}

/// Determinant-side antipodality test with a norm cross-check.
pub fn is_antipodal(
    w1: &UnitaryMatrix,
    w2: &UnitaryMatrix,
    tol: &ToleranceConfig,
) -> Result<AntipodalReport, AntipodalError> {
    if w1.dim() != w2.dim() {
        return Err(AntipodalError::DimensionMismatch {
            left: w1.dim(),
            right: w2.dim(),
        });
    }
    let sum = w1.matrix() + w2.matrix();
    let det_value = determinant(&sum)?;
    // Hadamard bound: |det| <= product of row norms, so the ratio is in [0,1].
    let scale = row_norm_product(&sum);
    let verdict = det_value.norm() <= tol.zero_tol * scale;
    let norm_value = op_norm(&(w1.matrix() - w2.matrix()))?;
    let norm_says = norm_value > 2.0 - 1e-6;
    let warning = if verdict != norm_says {
        Some(format!(
            "determinant verdict {verdict} disagrees with norm test ({norm_value})"
        ))
    } else {
        None
    };
    Ok(AntipodalReport {
        det_value,
        norm_value,
        verdict,
        warning,
    })
}

/// The analytic path u(t) = u e^{-th} out of a maximal pair, together with
/// the determinant function whose zeros mark antipodality.
pub struct PerturbationPath {
    eig: UnitaryEigen,
    v: Matrix,
    h_norm: f64,
    f_scale: f64,
    dim: usize,
}

impl PerturbationPath {
    /// Writes u = e^h spectrally; eigenvalues at -1 get angle exactly pi
    /// (no principal-branch requirement here).
    pub fn new(p: &UnitaryPair, tol: &ToleranceConfig) -> Result<Self, AntipodalError> {
        let eig = UnitaryEigen::new(p.u.matrix(), tol.angle_tol)?;
        let h_norm = eig.angles.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        let f1 = determinant(&p.v.matrix().map(|z| z * 2.0))?;
        Ok(Self {
            eig,
            v: p.v.matrix().clone(),
            h_norm,
            f_scale: f1.norm().max(1.0),
            dim: p.dim(),
        })
    }

    /// ||h|| = the largest eigenangle modulus.
    pub fn h_norm(&self) -> f64 {
        self.h_norm
    }

    /// u(t) = u e^{-th}: every eigenangle scaled by (1 - t).
    pub fn u_of_t(&self, t: f64) -> UnitaryMatrix {
        UnitaryMatrix::new_unchecked(self.eig.synthesize(|angle| angle * (1.0 - t)))
    }

    /// f(t) = det(u(t) v + v u(t)).
    pub fn f(&self, t: f64) -> Complex64 {
        let ut = self.u_of_t(t);
        let m = ut.matrix() * &self.v + &self.v * ut.matrix();
        determinant(&m).expect("square")
    }

    /// Scale-free zero threshold: zero_tol * max(1, |det(2v)|).
    pub fn zero_threshold(&self, tol: &ToleranceConfig) -> f64 {
        tol.zero_tol * self.f_scale
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Outcome of a successful maximal-pair perturbation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationResult {
    pub u_prime: UnitaryMatrix,
    pub t_star: f64,
    pub new_commutator: f64,
    pub displacement: f64,
}

/// Perturb the first factor of a maximal pair strictly below commutator
/// norm 2, moving it less than `delta`. Scans `grid` points of
/// `t in (0, t_max]` with `t_max = min(1, delta / ||h||)` in order and
/// returns the first t whose determinant clears the scaled zero threshold
/// and whose verified norms satisfy both strict inequalities.
pub fn perturb_off_max(
    p: &UnitaryPair,
    delta: f64,
    grid: usize,
    tol: &ToleranceConfig,
) -> Result<PerturbationResult, AntipodalError> {
    let baseline = commutator_norm(p);
    if (baseline - 2.0).abs() > 1e-6 {
        return Err(AntipodalError::NotAtMaximum(baseline));
    }
    if delta <= 0.0 || grid == 0 {
        return Err(AntipodalError::Core(CoreError::DomainViolation(
            "delta must be positive and grid nonempty".into(),
        )));
    }
    let path = PerturbationPath::new(p, tol)?;
    let t_max = (delta / (path.h_norm() + 1e-300)).min(1.0);
    let dt = t_max / grid as f64;
    let threshold = path.zero_threshold(tol);
    for k in 1..=grid {
        let t = k as f64 * dt;
        if path.f(t).norm() <= threshold {
            continue;
        }
        let u_prime = path.u_of_t(t);
        let new_commutator =
            commutator_norm(&UnitaryPair::new(u_prime.clone(), UnitaryMatrix::new_unchecked(path.v.clone())).expect("dims"));
        let displacement = op_norm(&(u_prime.matrix() - p.u.matrix()))?;
        if new_commutator < 2.0 && displacement < delta {
            return Ok(PerturbationResult {
                u_prime,
                t_star: t,
                new_commutator,
                displacement,
            });
        }
    }
    Err(AntipodalError::ScanExhausted { grid, t_max })
}

/// Deterministic pair with `||uv - vu|| = 2`: a sign-flip/swap block padded
/// with a random pair and conjugated by a random unitary.
pub fn max_commutator_pair(dim: usize, seed: u64) -> UnitaryPair {
    use unitary_core::random_unitary;
    assert!(dim >= 2, "maximal pairs need dim >= 2");
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let base_u =
        UnitaryMatrix::new_unchecked(Matrix::from_row_slice(2, 2, &[one, zero, zero, -one]));
    let base_v =
        UnitaryMatrix::new_unchecked(Matrix::from_row_slice(2, 2, &[zero, one, one, zero]));
    let base = UnitaryPair::new(base_u, base_v).expect("dims");
    let pair = if dim == 2 {
        base
    } else {
        let pad = UnitaryPair::new(
            random_unitary(dim - 2, seed ^ 0x11),
            random_unitary(dim - 2, seed ^ 0x22),
        )
        .expect("dims");
        base.direct_sum(&pad)
    };
    let q = random_unitary(dim, seed ^ 0x33);
    pair.conjugate(&q)
}
