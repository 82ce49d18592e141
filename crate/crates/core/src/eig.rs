//! Eigendecompositions used across the workspace.
//!
//! Unitary (normal) matrices are decomposed by reducing to the two commuting
//! Hermitian parts: eigenvectors of Re(w) are refined within degenerate
//! clusters (gap < 1e-8) by diagonalizing the compression of Im(w), which
//! yields a stable orthonormal eigenbasis even for repeated eigenvalues.

use nalgebra::{DMatrix, DVector};

use crate::error::CoreError;
use crate::matrix::{Complex64, Matrix};

/// Gap below which two real eigenvalues are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-8;

/// Eigendecomposition of a Hermitian matrix: real eigenvalues ascending,
/// columns of the returned matrix are the matching orthonormal eigenvectors.
pub fn hermitian_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix), CoreError> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(CoreError::NonSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    let se = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| CoreError::DomainViolation("hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigendecomposition of a unitary matrix.
///
/// Angles live in (-pi, pi], with eigenvalues within `angle_tol` of the
/// negative real axis assigned to the +pi side.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    /// Eigenangles sorted ascending.
    pub angles: Vec<f64>,
    /// Orthonormal eigenvectors, column k matching `angles[k]`.
    pub vectors: Matrix,
}

impl UnitaryEigen {
    /// Decompose a unitary (or any normal) matrix.
    pub fn new(w: &Matrix, angle_tol: f64) -> Result<Self, CoreError> {
        let n = w.nrows();
        if n != w.ncols() {
            return Err(CoreError::NonSquare {
                rows: n,
                cols: w.ncols(),
            });
        }
        let half = Complex64::new(0.5, 0.0);
        let minus_half_i = Complex64::new(0.0, -0.5);
        let wa = w.adjoint();
        let re_part: Matrix = (w + &wa).map(|z| z * half);
        let im_part: Matrix = (w - &wa).map(|z| z * minus_half_i);

        let (re_vals, re_vecs) = hermitian_eigen(&re_part)?;

        // Refine each degenerate cluster of Re(w) with the compression of Im(w).
        let mut vectors = Matrix::zeros(n, n);
        let mut col = 0;
        for cluster in cluster_ranges(&re_vals, CLUSTER_GAP) {
            let width = cluster.len();
            let q = re_vecs.columns(cluster.start, width).into_owned();
            if width == 1 {
                vectors.column_mut(col).copy_from(&q.column(0));
                col += 1;
                continue;
            }
            let compressed = q.ad_mul(&(&im_part * &q));
            let (_, sub_vecs) = hermitian_eigen(&compressed)?;
            let refined = &q * &sub_vecs;
            vectors
                .columns_mut(col, width)
                .copy_from(&refined.columns(0, width));
            col += width;
        }

        // Rayleigh quotients against w itself give the most accurate
        // eigenvalues; normalize to unit modulus before taking angles.
        let mut pairs: Vec<(f64, usize)> = (0..n)
            .map(|k| {
                let q = vectors.column(k);
                let wq = w * &q;
                let mut lambda: Complex64 = q.iter().zip(wq.iter()).map(|(a, b)| a.conj() * b).sum();
                let modulus = lambda.norm();
                if modulus > 0.0 {
                    lambda /= modulus;
                }
                let mut angle = lambda.im.atan2(lambda.re);
                if angle < -std::f64::consts::PI + angle_tol {
                    angle += 2.0 * std::f64::consts::PI;
                }
                (angle, k)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let angles: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let sorted = Matrix::from_fn(n, n, |r, c| vectors[(r, pairs[c].1)]);
        Ok(Self {
            angles,
            vectors: sorted,
        })
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    /// Rebuild the matrix `V diag(e^{i f(angle)}) V*` for a transformed angle set.
    pub fn synthesize(&self, angle_map: impl Fn(f64) -> f64) -> Matrix {
        let n = self.dim();
        let phases = DVector::from_fn(n, |k, _| {
            let t = angle_map(self.angles[k]);
            Complex64::new(t.cos(), t.sin())
        });
        let scaled = Matrix::from_fn(n, n, |r, c| self.vectors[(r, c)] * phases[c]);
        scaled * self.vectors.adjoint()
    }
}

/// Split an ascending list into maximal runs with successive gaps < `gap`.
pub fn cluster_ranges(sorted: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] >= gap {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Singular values (descending) and right singular vectors of a complex
/// matrix; column k of the returned matrix pairs with value k.
pub fn complex_svd(m: &Matrix) -> Result<(Vec<f64>, Matrix), CoreError> {
    let svd = m
        .clone()
        .try_svd(false, true, f64::EPSILON, 0)
        .ok_or_else(|| CoreError::DomainViolation("svd did not converge".into()))?;
    let v_t = svd.v_t.expect("v_t requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .unwrap()
    });
    let values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    // rows of v_t are conjugated right singular vectors
    let v = DMatrix::from_fn(m.ncols(), k, |r, c| v_t[(order[c], r)].conj());
    Ok((values, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cn(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const TOL: f64 = 1e-6;

    #[test]
    fn hermitian_eigen_of_pauli_x() {
        let m = Matrix::from_row_slice(
            2,
            2,
            &[cn(0.0, 0.0), cn(1.0, 0.0), cn(1.0, 0.0), cn(0.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        // reconstruct
        let d = Matrix::from_diagonal(&DVector::from_vec(vec![cn(vals[0], 0.0), cn(vals[1], 0.0)]));
        let rec = &vecs * d * vecs.adjoint();
        assert!((rec - m).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn unitary_eigen_diagonal_phases() {
        let m = Matrix::from_diagonal(&DVector::from_vec(vec![
            cn(0.0, 1.0),
            cn(1.0, 0.0),
            cn(0.0, -1.0),
        ]));
        let eig = UnitaryEigen::new(&m, TOL).unwrap();
        let expected = [-std::f64::consts::FRAC_PI_2, 0.0, std::f64::consts::FRAC_PI_2];
        for (a, e) in eig.angles.iter().zip(expected.iter()) {
            assert!((a - e).abs() < 1e-12, "angle {a} vs {e}");
        }
    }

    #[test]
    fn minus_one_maps_to_plus_pi() {
        let m = Matrix::from_diagonal(&DVector::from_vec(vec![cn(1.0, 0.0), cn(-1.0, 0.0)]));
        let eig = UnitaryEigen::new(&m, TOL).unwrap();
        assert!((eig.angles[0] - 0.0).abs() < 1e-12);
        assert!((eig.angles[1] - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn degenerate_spectrum_gets_orthonormal_basis() {
        // omega * I has a single eigenvalue with full multiplicity.
        let omega = cn((2.0 * std::f64::consts::PI / 3.0).cos(), (2.0 * std::f64::consts::PI / 3.0).sin());
        let m = Matrix::from_diagonal_element(3, 3, omega);
        let eig = UnitaryEigen::new(&m, TOL).unwrap();
        for a in &eig.angles {
            assert!((a - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        }
        let gram = eig.vectors.ad_mul(&eig.vectors);
        let err = (gram - Matrix::identity(3, 3))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn synthesize_reconstructs() {
        // a non-diagonal unitary: 2x2 rotation
        let c = (0.3_f64).cos();
        let s = (0.3_f64).sin();
        let m = Matrix::from_row_slice(2, 2, &[cn(c, 0.0), cn(-s, 0.0), cn(s, 0.0), cn(c, 0.0)]);
        let eig = UnitaryEigen::new(&m, TOL).unwrap();
        let rec = eig.synthesize(|t| t);
        let err = (&rec - &m).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "reconstruction error {err}");
    }

    #[test]
    fn cluster_ranges_splits_on_gaps() {
        let vals = [0.0, 1e-10, 1.0, 1.0 + 5e-9, 2.0];
        let ranges = cluster_ranges(&vals, 1e-8);
        assert_eq!(ranges, vec![0..2, 2..4, 4..5]);
    }

    #[test]
    fn svd_descending_with_null_vector() {
        // rank-1 matrix: second singular value is 0
        let m = Matrix::from_row_slice(
            2,
            2,
            &[cn(1.0, 0.0), cn(1.0, 0.0), cn(1.0, 0.0), cn(1.0, 0.0)],
        );
        let (vals, v) = complex_svd(&m).unwrap();
        assert!(vals[0] > vals[1]);
        assert!((vals[0] - 2.0).abs() < 1e-12);
        assert!(vals[1].abs() < 1e-12);
        // null vector maps to ~0
        let null = v.column(1).into_owned();
        let image = &m * &null;
        assert!(image.norm() < 1e-12);
    }
}
