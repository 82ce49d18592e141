//! Complex dense matrix substrate for numerical experiments on pairs of
//! unitary matrices: unitary-specific linear algebra, the `d`-calculus
//! (principal logarithms and skew exponentials), commutator quantities, and
//! seeded random generators.
//!
//! Everything here is a pure function of its inputs; values are immutable
//! after construction and safe to share between threads.

pub mod calculus;
pub mod eig;
pub mod error;
pub mod matrix;
pub mod norm;
pub mod random;
pub mod tolerance;

pub use calculus::{commutator_norm, d_func, d_inv, exp_skew, gamma, principal_log, unitary_angles};
pub use eig::UnitaryEigen;
pub use error::CoreError;
pub use matrix::{Complex64, Matrix, SkewHermitianMatrix, UnitaryMatrix, UnitaryPair};
pub use norm::op_norm;
pub use random::{random_skew, random_unitary, seeded_rng};
pub use tolerance::ToleranceConfig;
