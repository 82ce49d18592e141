use std::f64::consts::PI;

use unitary_core::{Complex64, Matrix, UnitaryMatrix, UnitaryPair};

use crate::error::VariationalError;

/// The clock-and-shift pair: `u = diag(w, w², ..., wⁿ)` with `w = e^{2πi/n}`
/// and `v` the cyclic shift with 1 in the top-right corner. Its
/// multiplicative commutator is exactly `w·I`, making it the canonical
/// scalar-commutator local minimum.
///
/// Callers usually want n >= 3; n = 2 is accepted (the matrices are well
/// defined) but its gamma is -I, outside the certificate's scope.
pub fn voiculescu_pair(n: usize) -> Result<UnitaryPair, VariationalError> {
    if n < 2 {
        return Err(VariationalError::NTooSmall(n));
    }
    let clock = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            let t = 2.0 * PI * (i as f64 + 1.0) / n as f64;
            Complex64::new(t.cos(), t.sin())
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let shift = Matrix::from_fn(n, n, |i, j| {
        if (j + 1) % n == i {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(UnitaryPair::new(
        UnitaryMatrix::new_unchecked(clock),
        UnitaryMatrix::new_unchecked(shift),
    )
    .expect("equal dims"))
}
