//! Variational analysis of the commutator norm on pairs of unitary matrices.
//!
//! The multiplicative commutator `gamma(u, v) = uvu⁻¹v⁻¹` organizes
//! everything here:
//!
//! - pairs whose gamma is a scalar (other than -I) are certified local minima
//!   through the eigenangle-sum argument ([`certify_scalar_min`]);
//! - the differential of gamma, materialized as a real linear operator,
//!   detects irreducibility: the pair is regular exactly when the joint
//!   commutant is trivial ([`regularity_report`]);
//! - reducible pairs are split into irreducible diagonal blocks by
//!   eigenspaces of random commutant elements ([`decompose_pair`]);
//! - irreducible pairs with non-scalar gamma admit an explicit
//!   commutator-decreasing move ([`descent_step`]), which combined with the
//!   decomposition yields the necessary-condition analyzer
//!   ([`necessary_condition_5_4`]).

mod certificate;
mod decompose;
mod descent;
mod dgamma;
mod error;
mod voiculescu;

pub use certificate::{certify_scalar_min, scalar_commutator, LocalMinCertificate};
pub use decompose::{
    decompose_pair, hidden_direct_sum, necessary_condition_5_4, BlockVerdict,
    NecessaryConditionReport, PairDecomposition,
};
pub use descent::{descent_step, DescentOutcome};
pub use dgamma::{
    commutant_dim, commutant_nullspace, dgamma_operator, regularity_report, skew_basis, su_basis,
    DGammaOperator, RegularityReport,
};
pub use error::VariationalError;
pub use voiculescu::voiculescu_pair;
