use serde::{Deserialize, Serialize};

/// Numerical tolerances shared across all procedures.
///
/// Defaults leave double-precision headroom at the dimensions we work with
/// (a few dozen): unitarity 1e-10, zero decisions 1e-9, angles 1e-6 rad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Bound on `||U*U - I||` accepted when validating a unitary.
    pub unitarity_tol: f64,
    /// Threshold for determinant / rank zero decisions (scale-normalized at use sites).
    pub zero_tol: f64,
    /// Angular resolution in radians, e.g. distance of eigenangles from the branch cut.
    pub angle_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            unitarity_tol: 1e-10,
            zero_tol: 1e-9,
            angle_tol: 1e-6,
        }
    }
}

impl ToleranceConfig {
    /// All tolerances must be strictly positive and less than one.
    pub fn validate(&self) -> bool {
        let ok = |t: f64| t > 0.0 && t < 1.0;
        ok(self.unitarity_tol) && ok(self.zero_tol) && ok(self.angle_tol)
    }
}
