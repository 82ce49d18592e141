//! The differential of gamma as a concrete real matrix.
//!
//! `L(h, k) = v⁻¹hv - h + k - u⁻¹ku` maps skew ⊕ skew (real dimension 2n²)
//! into the traceless skews su(n) (real dimension n² - 1). Its rank, together
//! with the nullity of the joint commutant system `x ↦ (xu - ux, xv - vx)`,
//! decides regularity: the pair is irreducible exactly when the commutant is
//! one-dimensional, equivalently when L is onto.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use unitary_core::eig::complex_svd;
use unitary_core::{Complex64, Matrix, UnitaryPair};

use crate::error::VariationalError;

/// Real orthonormal basis of the skew-Hermitian n×n matrices (dimension n²):
/// i·E_jj, then (E_jk - E_kj)/√2 and i(E_jk + E_kj)/√2 for j < k.
pub fn skew_basis(n: usize) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(n * n);
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    for j in 0..n {
        let mut m = Matrix::zeros(n, n);
        m[(j, j)] = Complex64::new(0.0, 1.0);
        out.push(m);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut a = Matrix::zeros(n, n);
            a[(j, k)] = Complex64::new(inv_sqrt2, 0.0);
            a[(k, j)] = Complex64::new(-inv_sqrt2, 0.0);
            out.push(a);
            let mut s = Matrix::zeros(n, n);
            s[(j, k)] = Complex64::new(0.0, inv_sqrt2);
            s[(k, j)] = Complex64::new(0.0, inv_sqrt2);
            out.push(s);
        }
    }
    out
}

/// Real orthonormal basis of su(n), the traceless skews (dimension n² - 1):
/// the diagonal family is the staircase i·diag(1,...,1,-j,0,...)/√(j(j+1)),
/// which spans the same space as the successive differences and is mutually
/// orthogonal; off-diagonal elements as in [`skew_basis`].
pub fn su_basis(n: usize) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 1..n {
        let scale = 1.0 / ((j * (j + 1)) as f64).sqrt();
        let mut m = Matrix::zeros(n, n);
        for d in 0..j {
            m[(d, d)] = Complex64::new(0.0, scale);
        }
        m[(j, j)] = Complex64::new(0.0, -(j as f64) * scale);
        out.push(m);
    }
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    for j in 0..n {
        for k in (j + 1)..n {
            let mut a = Matrix::zeros(n, n);
            a[(j, k)] = Complex64::new(inv_sqrt2, 0.0);
            a[(k, j)] = Complex64::new(-inv_sqrt2, 0.0);
            out.push(a);
            let mut s = Matrix::zeros(n, n);
            s[(j, k)] = Complex64::new(0.0, inv_sqrt2);
            s[(k, j)] = Complex64::new(0.0, inv_sqrt2);
            out.push(s);
        }
    }
    out
}

/// Frobenius inner product Re Tr(a b*); real-valued on the skews.
pub fn frobenius_re(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

/// `L(h, k)` evaluated on raw matrices.
pub fn dgamma_apply(p: &UnitaryPair, h: &Matrix, k: &Matrix) -> Matrix {
    let u = p.u.matrix();
    let v = p.v.matrix();
    let vh = v.adjoint() * h * v;
    let uk = u.adjoint() * k * u;
    vh - h + k - uk
}

/// The materialized differential: an (n² - 1) × 2n² real matrix in the fixed
/// bases above, h-side columns first.
#[derive(Debug, Clone)]
pub struct DGammaOperator {
    matrix: DMatrix<f64>,
    n: usize,
}

impl DGammaOperator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Coordinates of a traceless skew in the su(n) basis.
    pub fn codomain_coords(&self, target: &Matrix) -> nalgebra::DVector<f64> {
        let basis = su_basis(self.n);
        nalgebra::DVector::from_fn(basis.len(), |i, _| frobenius_re(target, &basis[i]))
    }

    /// Reassemble a coordinate vector into the pair of skew matrices (h, k).
    pub fn domain_matrices(&self, coords: &nalgebra::DVector<f64>) -> (Matrix, Matrix) {
        let basis = skew_basis(self.n);
        let nn = basis.len();
        let mut h = Matrix::zeros(self.n, self.n);
        let mut k = Matrix::zeros(self.n, self.n);
        for (i, b) in basis.iter().enumerate() {
            if coords[i] != 0.0 {
                h += b.map(|z| z * coords[i]);
            }
            if coords[nn + i] != 0.0 {
                k += b.map(|z| z * coords[nn + i]);
            }
        }
        (h, k)
    }
}

/// Materialize L at a pair.
pub fn dgamma_operator(p: &UnitaryPair) -> DGammaOperator {
    let n = p.dim();
    let dom = skew_basis(n);
    let cod = su_basis(n);
    let zero = Matrix::zeros(n, n);
    let mut m = DMatrix::zeros(cod.len(), 2 * dom.len());
    for (col, b) in dom.iter().enumerate() {
        let img_h = dgamma_apply(p, b, &zero);
        let img_k = dgamma_apply(p, &zero, b);
        for (row, c) in cod.iter().enumerate() {
            m[(row, col)] = frobenius_re(&img_h, c);
            m[(row, dom.len() + col)] = frobenius_re(&img_k, c);
        }
    }
    DGammaOperator { matrix: m, n }
}

/// Rank threshold from the spec: sigma_max · n² · eps · 100.
fn rank_threshold(sigma_max: f64, n: usize) -> f64 {
    sigma_max * (n * n) as f64 * f64::EPSILON * 100.0
}

/// Count values >= threshold; flag any value within a factor 10 of it.
fn thresholded_rank(values: &[f64], thr: f64) -> (usize, Option<f64>) {
    let rank = values.iter().filter(|&&s| s >= thr).count();
    let ambiguous = values
        .iter()
        .find(|&&s| s > thr / 10.0 && s < thr * 10.0)
        .copied();
    (rank, ambiguous)
}

/// Stacked commutation system `x ↦ (xu - ux, xv - vx)` on vec(x), a
/// 2n² × n² complex matrix; x is vectorized row-major.
pub fn commutant_system(p: &UnitaryPair) -> Matrix {
    let n = p.dim();
    let u = p.u.matrix();
    let v = p.v.matrix();
    let mut m = Matrix::zeros(2 * n * n, n * n);
    // (E_ab w)[i,j] = delta_{ia} w[b,j]; (w E_ab)[i,j] = w[i,a] delta_{jb}
    for a in 0..n {
        for b in 0..n {
            let col = a * n + b;
            for j in 0..n {
                // rows for xu - ux at (i = a, j)
                m[(a * n + j, col)] += u[(b, j)];
                m[(n * n + a * n + j, col)] += v[(b, j)];
            }
            for i in 0..n {
                m[(i * n + b, col)] -= u[(i, a)];
                m[(n * n + i * n + b, col)] -= v[(i, a)];
            }
        }
    }
    m
}

/// Nullity and an orthonormal null-space basis (as matrices) of the
/// commutation system, with the smallest ambiguous singular value if any.
pub fn commutant_nullspace(
    p: &UnitaryPair,
) -> Result<(usize, Vec<Matrix>, Option<f64>), VariationalError> {
    let n = p.dim();
    let system = commutant_system(p);
    let (values, v) = complex_svd(&system)?;
    let thr = rank_threshold(values[0].max(f64::MIN_POSITIVE), n);
    let (rank, ambiguous) = thresholded_rank(&values, thr);
    let nullity = n * n - rank;
    let mut basis = Vec::with_capacity(nullity);
    for col in rank..n * n {
        let vec = v.column(col);
        basis.push(Matrix::from_fn(n, n, |i, j| vec[i * n + j]));
    }
    Ok((nullity, basis, ambiguous))
}

/// Complex dimension of `{x : xu = ux, xv = vx}`.
pub fn commutant_dim(p: &UnitaryPair) -> Result<usize, VariationalError> {
    Ok(commutant_nullspace(p)?.0)
}

/// Regularity verdict for gamma at a pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityReport {
    pub rank_l: usize,
    pub commutant_dim: usize,
    pub irreducible: bool,
    pub n: usize,
}

/// Materialize L, compute its numerical rank and the commutant dimension,
/// and check the dimension identity `rank L + dim commutant = n²`.
pub fn regularity_report(p: &UnitaryPair) -> Result<RegularityReport, VariationalError> {
    let n = p.dim();
    if n == 1 {
        return Ok(RegularityReport {
            rank_l: 0,
            commutant_dim: 1,
            irreducible: true,
            n,
        });
    }
    let op = dgamma_operator(p);
    let svd = op.matrix().clone().svd(false, false);
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let thr = rank_threshold(values[0].max(f64::MIN_POSITIVE), n);
    let (rank_l, ambiguous_l) = thresholded_rank(&values, thr);
    if let Some(s) = ambiguous_l {
        return Err(VariationalError::RankAmbiguous(format!(
            "singular value {s:.3e} of dgamma within a factor 10 of threshold {thr:.3e}"
        )));
    }
    let (commutant, _, ambiguous_c) = commutant_nullspace(p)?;
    if let Some(s) = ambiguous_c {
        return Err(VariationalError::RankAmbiguous(format!(
            "singular value {s:.3e} of the commutant system near its threshold"
        )));
    }
    if rank_l + commutant != n * n {
        return Err(VariationalError::RankAmbiguous(format!(
            "rank identity failed: rank L = {rank_l}, commutant dim = {commutant}, n² = {}",
            n * n
        )));
    }
    Ok(RegularityReport {
        rank_l,
        commutant_dim: commutant,
        irreducible: commutant == 1,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voiculescu::voiculescu_pair;
    use unitary_core::{random_skew, random_unitary, UnitaryMatrix};

    #[test]
    fn bases_are_orthonormal() {
        for n in [2, 3, 5] {
            let skews = skew_basis(n);
            assert_eq!(skews.len(), n * n);
            for (i, a) in skews.iter().enumerate() {
                for (j, b) in skews.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((frobenius_re(a, b) - want).abs() < 1e-14, "skew {i},{j}");
                }
            }
            let su = su_basis(n);
            assert_eq!(su.len(), n * n - 1);
            for (i, a) in su.iter().enumerate() {
                // traceless
                assert!(a.trace().norm() < 1e-14);
                for (j, b) in su.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((frobenius_re(a, b) - want).abs() < 1e-14, "su {i},{j}");
                }
            }
        }
    }

    #[test]
    fn l_vanishes_at_identity_pair() {
        let p = UnitaryPair::new(UnitaryMatrix::identity(3), UnitaryMatrix::identity(3)).unwrap();
        let op = dgamma_operator(&p);
        assert!(op.matrix().iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn image_is_traceless() {
        let p = UnitaryPair::new(random_unitary(4, 3), random_unitary(4, 4)).unwrap();
        for seed in 0..10 {
            let h = random_skew(4, seed, 1.0).into_matrix();
            let k = random_skew(4, seed + 100, 1.0).into_matrix();
            let img = dgamma_apply(&p, &h, &k);
            assert!(img.trace().norm() < 1e-12);
            // and skew
            let skew_defect = (&img + img.adjoint())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(skew_defect < 1e-12);
        }
    }

    #[test]
    fn image_orthogonal_to_commutant() {
        // reducible pair: the commutant is larger than scalars, and the image
        // of L must be Frobenius-orthogonal to its traceless skew part
        let block = voiculescu_pair(3).unwrap();
        let pad = UnitaryPair::new(UnitaryMatrix::identity(1), UnitaryMatrix::identity(1)).unwrap();
        let p = block.direct_sum(&pad);
        let (nullity, basis, _) = commutant_nullspace(&p).unwrap();
        assert_eq!(nullity, 2);
        for seed in 0..6 {
            let h = random_skew(4, seed, 1.0).into_matrix();
            let k = random_skew(4, seed + 50, 1.0).into_matrix();
            let img = dgamma_apply(&p, &h, &k);
            for c in &basis {
                // traceless skew part of the commutant element
                let skew = (c - c.adjoint()).map(|z| z * 0.5);
                let tr = skew.trace() / Complex64::new(4.0, 0.0);
                let skew = skew - Matrix::from_diagonal_element(4, 4, tr);
                let overlap = frobenius_re(&img, &skew);
                assert!(overlap.abs() < 1e-10, "overlap {overlap}");
            }
        }
    }

    #[test]
    fn commutant_of_identity_pair_is_everything() {
        let p = UnitaryPair::new(UnitaryMatrix::identity(3), UnitaryMatrix::identity(3)).unwrap();
        assert_eq!(commutant_dim(&p).unwrap(), 9);
        let rep = regularity_report(&p).unwrap();
        assert_eq!(rep.rank_l, 0);
        assert_eq!(rep.commutant_dim, 9);
        assert!(!rep.irreducible);
    }

    #[test]
    fn clock_shift_is_irreducible() {
        let p = voiculescu_pair(3).unwrap();
        assert_eq!(commutant_dim(&p).unwrap(), 1);
        let rep = regularity_report(&p).unwrap();
        assert_eq!(rep.rank_l, 8);
        assert!(rep.irreducible);
    }

    #[test]
    fn padded_clock_shift_has_two_dim_commutant() {
        let block = voiculescu_pair(3).unwrap();
        let pad = UnitaryPair::new(UnitaryMatrix::identity(1), UnitaryMatrix::identity(1)).unwrap();
        let p = block.direct_sum(&pad);
        assert_eq!(commutant_dim(&p).unwrap(), 2);
        let rep = regularity_report(&p).unwrap();
        assert_eq!(rep.rank_l, 14);
        assert!(!rep.irreducible);
    }

    #[test]
    fn rank_identity_on_random_pairs() {
        for seed in 0..25u64 {
            let dim = 2 + (seed % 5) as usize;
            let p = UnitaryPair::new(
                random_unitary(dim, seed),
                random_unitary(dim, seed + 31_337),
            )
            .unwrap();
            let rep = regularity_report(&p).unwrap();
            assert_eq!(rep.rank_l + rep.commutant_dim, dim * dim, "seed {seed}");
            assert_eq!(rep.irreducible, rep.commutant_dim == 1);
            assert_eq!(rep.irreducible, rep.rank_l == dim * dim - 1);
        }
    }

    #[test]
    fn null_vectors_really_commute() {
        let block = voiculescu_pair(3).unwrap();
        let pad = UnitaryPair::new(UnitaryMatrix::identity(2), UnitaryMatrix::identity(2)).unwrap();
        let p = block.direct_sum(&pad);
        let (nullity, basis, _) = commutant_nullspace(&p).unwrap();
        // scalars on the 3-block plus full M_2 on the pad: 1 + 4 = 5
        assert_eq!(nullity, 5);
        for c in &basis {
            let r1 = (c * p.u.matrix() - p.u.matrix() * c)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            let r2 = (c * p.v.matrix() - p.v.matrix() * c)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(r1 < 1e-10 && r2 < 1e-10, "residuals {r1}, {r2}");
        }
    }

    #[test]
    fn dgamma_matches_finite_differences() {
        // directional derivative of gamma against the materialized operator
        use unitary_core::{exp_skew, gamma, op_norm, SkewHermitianMatrix};
        let p = UnitaryPair::new(random_unitary(3, 21), random_unitary(3, 22)).unwrap();
        let h = random_skew(3, 1, 1.0);
        let k = random_skew(3, 2, 1.0);
        let eps = 1e-6;
        let us = exp_skew(&SkewHermitianMatrix::new_unchecked(h.matrix().map(|z| z * eps)))
            .unwrap();
        let vs = exp_skew(&SkewHermitianMatrix::new_unchecked(k.matrix().map(|z| z * eps)))
            .unwrap();
        let perturbed = UnitaryPair::new(
            UnitaryMatrix::new_unchecked(p.u.matrix() * us.matrix()),
            UnitaryMatrix::new_unchecked(p.v.matrix() * vs.matrix()),
        )
        .unwrap();
        let fd = (gamma(&perturbed).into_matrix() - gamma(&p).into_matrix()).map(|z| z / eps);
        // analytic: uv L(h,k) u⁻¹ v⁻¹
        let l = dgamma_apply(&p, h.matrix(), k.matrix());
        let uv = p.u.matrix() * p.v.matrix();
        let u_inv_v_inv = p.u.matrix().adjoint() * p.v.matrix().adjoint();
        let analytic = &uv * l * u_inv_v_inv;
        let err = op_norm(&(fd - analytic)).unwrap();
        assert!(err < 1e-5, "finite difference mismatch {err}");
    }
}
