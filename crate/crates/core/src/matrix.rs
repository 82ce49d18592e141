//! Domain types: validated unitary and skew-Hermitian matrices, ordered
//! pairs, and the repo-wide JSON matrix format
//! `{"dim": n, "data": [[re, im], ...]}` (row-major, n² entries).

use nalgebra::DMatrix;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CoreError;
use crate::norm::op_norm_raw;
use crate::tolerance::ToleranceConfig;

pub type Complex64 = num_complex::Complex<f64>;
pub type Matrix = DMatrix<Complex64>;

/// Serialized form shared by every matrix kind.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    data: Vec<[f64; 2]>,
}

fn matrix_to_repr(m: &Matrix) -> MatrixRepr {
    let dim = m.nrows();
    let mut data = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let z = m[(i, j)];
            data.push([z.re, z.im]);
        }
    }
    MatrixRepr { dim, data }
}

fn repr_to_matrix(repr: MatrixRepr) -> Result<Matrix, CoreError> {
    if repr.dim < 1 {
        return Err(CoreError::MalformedMatrix("dim must be >= 1".into()));
    }
    if repr.data.len() != repr.dim * repr.dim {
        return Err(CoreError::MalformedMatrix(format!(
            "expected {} entries for dim {}, got {}",
            repr.dim * repr.dim,
            repr.dim,
            repr.data.len()
        )));
    }
    for (k, [re, im]) in repr.data.iter().enumerate() {
        if !re.is_finite() || !im.is_finite() {
            return Err(CoreError::MalformedMatrix(format!(
                "entry {k} is not finite: [{re}, {im}]"
            )));
        }
    }
    let dim = repr.dim;
    Ok(Matrix::from_fn(dim, dim, |i, j| {
        let [re, im] = repr.data[i * dim + j];
        Complex64::new(re, im)
    }))
}

/// Serialize any complex square matrix in the repo-wide JSON format.
pub fn serialize_matrix<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
    matrix_to_repr(m).serialize(s)
}

/// Deserialize a complex square matrix, rejecting NaN/Inf and wrong lengths.
pub fn deserialize_matrix<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
    let repr = MatrixRepr::deserialize(d)?;
    repr_to_matrix(repr).map_err(D::Error::custom)
}

/// Square complex matrix satisfying `||U*U - I|| <= unitarity_tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    inner: Matrix,
}

impl UnitaryMatrix {
    /// Validate against the default unitarity tolerance (1e-10).
    pub fn new(m: Matrix) -> Result<Self, CoreError> {
        Self::with_tol(m, ToleranceConfig::default().unitarity_tol)
    }

    pub fn with_tol(m: Matrix, unitarity_tol: f64) -> Result<Self, CoreError> {
        if m.nrows() != m.ncols() {
            return Err(CoreError::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() < 1 {
            return Err(CoreError::MalformedMatrix("dim must be >= 1".into()));
        }
        let residual = unitarity_residual(&m);
        if residual > unitarity_tol {
            return Err(CoreError::InvariantViolation {
                dim: m.nrows(),
                invariant: "||U*U - I|| <= unitarity_tol",
                residual,
                tol: unitarity_tol,
            });
        }
        Ok(Self { inner: m })
    }

    /// Wrap a matrix that is unitary by construction (e.g. a product of
    /// validated unitaries or an eigenbasis). The caller asserts the invariant.
    pub fn new_unchecked(m: Matrix) -> Self {
        debug_assert!(m.is_square());
        Self { inner: m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: Matrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    /// Conjugate transpose, which is also the inverse.
    pub fn inverse(&self) -> UnitaryMatrix {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    /// `||U*U - I||` in operator norm.
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.inner)
    }
}

impl std::ops::Mul<&UnitaryMatrix> for &UnitaryMatrix {
    type Output = UnitaryMatrix;

    fn mul(self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix::new_unchecked(&self.inner * &rhs.inner)
    }
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_matrix(&self.inner, s)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = deserialize_matrix(d)?;
        UnitaryMatrix::new(m).map_err(D::Error::custom)
    }
}

fn unitarity_residual(m: &Matrix) -> f64 {
    let n = m.nrows();
    let gram = m.adjoint() * m - Matrix::identity(n, n);
    op_norm_raw(&gram)
}

/// Square complex matrix satisfying `||H + H*|| <= unitarity_tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewHermitianMatrix {
    inner: Matrix,
}

impl SkewHermitianMatrix {
    pub fn new(m: Matrix) -> Result<Self, CoreError> {
        Self::with_tol(m, ToleranceConfig::default().unitarity_tol)
    }

    pub fn with_tol(m: Matrix, tol: f64) -> Result<Self, CoreError> {
        if m.nrows() != m.ncols() {
            return Err(CoreError::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let residual = op_norm_raw(&(&m + m.adjoint()));
        if residual > tol {
            return Err(CoreError::InvariantViolation {
                dim: m.nrows(),
                invariant: "||H + H*|| <= unitarity_tol",
                residual,
                tol,
            });
        }
        Ok(Self { inner: m })
    }

    pub fn new_unchecked(m: Matrix) -> Self {
        debug_assert!(m.is_square());
        Self { inner: m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: Matrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    /// Scale by a real factor; skewness is preserved.
    pub fn scale(&self, t: f64) -> SkewHermitianMatrix {
        Self {
            inner: self.inner.map(|z| z * t),
        }
    }
}

impl Serialize for SkewHermitianMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_matrix(&self.inner, s)
    }
}

impl<'de> Deserialize<'de> for SkewHermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = deserialize_matrix(d)?;
        SkewHermitianMatrix::new(m).map_err(D::Error::custom)
    }
}

/// Ordered pair (u, v) acting on the same dimension: the variational variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryPair {
    pub u: UnitaryMatrix,
    pub v: UnitaryMatrix,
}

impl UnitaryPair {
    pub fn new(u: UnitaryMatrix, v: UnitaryMatrix) -> Result<Self, CoreError> {
        if u.dim() != v.dim() {
            return Err(CoreError::DimensionMismatch {
                left: u.dim(),
                right: v.dim(),
            });
        }
        Ok(Self { u, v })
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// Direct sum: block-diagonal pair ((u1 ⊕ u2), (v1 ⊕ v2)).
    pub fn direct_sum(&self, other: &UnitaryPair) -> UnitaryPair {
        UnitaryPair {
            u: UnitaryMatrix::new_unchecked(block_diag(self.u.matrix(), other.u.matrix())),
            v: UnitaryMatrix::new_unchecked(block_diag(self.v.matrix(), other.v.matrix())),
        }
    }

    /// Conjugate both factors by a unitary: (q u q*, q v q*).
    pub fn conjugate(&self, q: &UnitaryMatrix) -> UnitaryPair {
        let qa = q.matrix().adjoint();
        UnitaryPair {
            u: UnitaryMatrix::new_unchecked(q.matrix() * self.u.matrix() * &qa),
            v: UnitaryMatrix::new_unchecked(q.matrix() * self.v.matrix() * &qa),
        }
    }
}

/// Block-diagonal direct sum of two square matrices.
pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut out = Matrix::zeros(na + nb, na + nb);
    out.view_mut((0, 0), (na, na)).copy_from(a);
    out.view_mut((na, na), (nb, nb)).copy_from(b);
    out
}

/// Determinant via the pivoted LU factorization.
pub fn determinant(m: &Matrix) -> Result<Complex64, CoreError> {
    if m.nrows() != m.ncols() {
        return Err(CoreError::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.clone().lu().determinant())
}

/// Product of Euclidean row norms: the Hadamard bound for `|det|`, used to
/// normalize determinant zero-tests.
pub fn row_norm_product(m: &Matrix) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .product()
}
