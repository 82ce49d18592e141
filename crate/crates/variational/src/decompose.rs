//! Splitting a pair into irreducible diagonal blocks.
//!
//! The joint commutant of (u, v) is a *-closed algebra (both matrices are
//! unitary), so whenever it is larger than the scalars it contains a
//! non-scalar Hermitian element whose eigenspaces reduce the pair. A random
//! commutant element is sampled from the null space of the commutation
//! system, its Hermitian part eigendecomposed, eigenvalues clustered, and the
//! pair conjugated into block form; blocks recurse until irreducible.

use rand::Rng;
use serde::{Deserialize, Serialize};
use unitary_core::eig::{cluster_ranges, hermitian_eigen};
use unitary_core::random::seeded_stream_rng;
use unitary_core::{commutator_norm, op_norm, Complex64, Matrix, UnitaryMatrix, UnitaryPair};

use crate::certificate::scalar_commutator;
use crate::dgamma::commutant_nullspace;
use crate::error::VariationalError;

/// Eigenvalue gap needed to split on a commutant element's spectrum.
const SPLIT_GAP: f64 = 1e-7;
/// Random redraws before giving up on a degenerate commutant sample.
const SPLIT_ATTEMPTS: usize = 8;
/// Blocks whose commutator norm is within this of the maximum count as
/// attaining it.
const ATTAIN_TOL: f64 = 1e-9;

/// A pair split into irreducible blocks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDecomposition {
    /// Irreducible block pairs with their dimensions, in basis order.
    pub blocks: Vec<(UnitaryPair, usize)>,
    /// Change of basis: `basis* · (⊕ blocks) · basis` reproduces the input.
    pub basis: UnitaryMatrix,
    /// `max_j ||u_j v_j - v_j u_j||`, which equals the commutator norm of the
    /// input pair.
    pub max_commutator: f64,
    /// Indices of blocks attaining the maximum.
    pub attaining_indices: Vec<usize>,
}

/// Decompose a pair into irreducible blocks, verifying the reconstruction.
pub fn decompose_pair(p: &UnitaryPair, seed: u64) -> Result<PairDecomposition, VariationalError> {
    let mut stream = 0u64;
    let (blocks, q) = split_recursive(p, seed, &mut stream)?;

    // reconstruction: q (⊕ blocks) q^H = input, i.e. basis = q^H satisfies
    // the stated invariant basis* (⊕ blocks) basis = input
    let n = p.dim();
    let mut direct_u = Matrix::zeros(n, n);
    let mut direct_v = Matrix::zeros(n, n);
    let mut at = 0;
    for b in &blocks {
        let d = b.dim();
        direct_u.view_mut((at, at), (d, d)).copy_from(b.u.matrix());
        direct_v.view_mut((at, at), (d, d)).copy_from(b.v.matrix());
        at += d;
    }
    let rec_u = &q * &direct_u * q.adjoint();
    let rec_v = &q * &direct_v * q.adjoint();
    let err_u = op_norm(&(rec_u - p.u.matrix())).expect("square");
    let err_v = op_norm(&(rec_v - p.v.matrix())).expect("square");
    if err_u > 1e-8 || err_v > 1e-8 {
        return Err(VariationalError::Internal(format!(
            "block reconstruction residual {err_u:.3e}/{err_v:.3e} exceeds 1e-8"
        )));
    }

    let norms: Vec<f64> = blocks.iter().map(commutator_norm).collect();
    let max_commutator = norms.iter().cloned().fold(0.0, f64::max);
    let attaining_indices: Vec<usize> = norms
        .iter()
        .enumerate()
        .filter(|(_, &x)| x >= max_commutator - ATTAIN_TOL)
        .map(|(i, _)| i)
        .collect();
    let dims: Vec<usize> = blocks.iter().map(|b| b.dim()).collect();
    Ok(PairDecomposition {
        blocks: blocks.into_iter().zip(dims).collect(),
        basis: UnitaryMatrix::new_unchecked(q.adjoint()),
        max_commutator,
        attaining_indices,
    })
}

/// Returns irreducible blocks plus the unitary q with q^H p q = ⊕ blocks.
fn split_recursive(
    p: &UnitaryPair,
    seed: u64,
    stream: &mut u64,
) -> Result<(Vec<UnitaryPair>, Matrix), VariationalError> {
    let n = p.dim();
    let (nullity, null_basis, _) = commutant_nullspace(p)?;
    if nullity <= 1 {
        return Ok((vec![p.clone()], Matrix::identity(n, n)));
    }

    for _attempt in 0..SPLIT_ATTEMPTS {
        *stream += 1;
        let mut rng = seeded_stream_rng(seed, *stream);
        let c = random_combination(&null_basis, &mut rng);
        // the commutant is *-closed, so both Hermitian components of c are
        // commutant elements; try each
        let herm = (&c + c.adjoint()).map(|z| z * 0.5);
        let skew_herm = (&c - c.adjoint()).map(|z| z * Complex64::new(0.0, -0.5));
        for candidate in [herm, skew_herm] {
            let (vals, vecs) = hermitian_eigen(&candidate)?;
            let clusters = cluster_ranges(&vals, SPLIT_GAP);
            if clusters.len() < 2 {
                continue;
            }
            // eigenspaces of a commutant element are jointly invariant
            let u_rot = vecs.ad_mul(&(p.u.matrix() * &vecs));
            let v_rot = vecs.ad_mul(&(p.v.matrix() * &vecs));
            let mut blocks = Vec::new();
            let mut q_blocks: Vec<Matrix> = Vec::new();
            for r in &clusters {
                let d = r.len();
                let ub = nearest_unitary(&u_rot.view((r.start, r.start), (d, d)).into_owned())?;
                let vb = nearest_unitary(&v_rot.view((r.start, r.start), (d, d)).into_owned())?;
                let sub = UnitaryPair::new(
                    UnitaryMatrix::new_unchecked(ub),
                    UnitaryMatrix::new_unchecked(vb),
                )
                .expect("dims");
                let (sub_blocks, sub_q) = split_recursive(&sub, seed, stream)?;
                blocks.extend(sub_blocks);
                q_blocks.push(sub_q);
            }
            // overall basis: rotate by vecs, then refine block-wise
            let mut refine = Matrix::zeros(n, n);
            let mut at = 0;
            for qb in &q_blocks {
                let d = qb.nrows();
                refine.view_mut((at, at), (d, d)).copy_from(qb);
                at += d;
            }
            return Ok((blocks, vecs * refine));
        }
    }
    Err(VariationalError::DegenerateSplit {
        attempts: SPLIT_ATTEMPTS,
    })
}

fn random_combination(basis: &[Matrix], rng: &mut impl Rng) -> Matrix {
    let n = basis[0].nrows();
    let mut out = Matrix::zeros(n, n);
    for b in basis {
        let coeff = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        out += b.map(|z| z * coeff);
    }
    out
}

/// Polar projection to the nearest unitary: m (m*m)^{-1/2}.
fn nearest_unitary(m: &Matrix) -> Result<Matrix, VariationalError> {
    let gram = m.ad_mul(m);
    let (vals, vecs) = hermitian_eigen(&gram)?;
    let n = m.nrows();
    let inv_sqrt = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(1.0 / vals[i].max(1e-300).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(m * (&vecs * inv_sqrt * vecs.adjoint()))
}

/// Per-block verdict for the necessary-condition analyzer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockVerdict {
    pub index: usize,
    pub dim: usize,
    pub commutator: f64,
    pub attaining: bool,
    /// The scalar value of the block's multiplicative commutator, when scalar.
    pub scalar: Option<Complex64>,
}

/// Outcome of the necessary condition: a local minimum must have some
/// norm-attaining block whose multiplicative commutator is a scalar.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NecessaryConditionReport {
    pub blocks: Vec<BlockVerdict>,
    pub max_commutator: f64,
    pub holds: bool,
}

/// Decompose and test every norm-attaining block for a scalar commutator.
pub fn necessary_condition_5_4(
    p: &UnitaryPair,
    seed: u64,
) -> Result<NecessaryConditionReport, VariationalError> {
    let decomposition = decompose_pair(p, seed)?;
    let mut blocks = Vec::with_capacity(decomposition.blocks.len());
    let mut holds = false;
    for (i, (pair, dim)) in decomposition.blocks.iter().enumerate() {
        let commutator = commutator_norm(pair);
        let attaining = decomposition.attaining_indices.contains(&i);
        let scalar = scalar_commutator(pair);
        if attaining && scalar.is_some() {
            holds = true;
        }
        blocks.push(BlockVerdict {
            index: i,
            dim: *dim,
            commutator,
            attaining,
            scalar,
        });
    }
    Ok(NecessaryConditionReport {
        blocks,
        max_commutator: decomposition.max_commutator,
        holds,
    })
}

/// Direct sum of pairs conjugated by a seeded random unitary, hiding the
/// block structure; used by tests and experiment drivers.
pub fn hidden_direct_sum(pairs: &[UnitaryPair], seed: u64) -> UnitaryPair {
    assert!(!pairs.is_empty());
    let mut acc = pairs[0].clone();
    for p in &pairs[1..] {
        acc = acc.direct_sum(p);
    }
    let q = unitary_core::random_unitary(acc.dim(), seed);
    acc.conjugate(&q)
}
