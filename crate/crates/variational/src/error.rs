use thiserror::Error;
use unitary_core::CoreError;

#[derive(Debug, Error)]
pub enum VariationalError {
    #[error("clock-and-shift pairs need n >= 2, got {0}")]
    NTooSmall(usize),

    #[error("gamma(u, v) is not a scalar multiple of the identity (residual {residual:.3e})")]
    NotScalarCommutator { residual: f64 },

    #[error("gamma(u, v) = -I: the scalar certificate excludes -1; the maximal pair is perturbable instead")]
    MinusOneScalar,

    #[error("rank decision ambiguous: {0}")]
    RankAmbiguous(String),

    #[error("no commutant eigenvalue gap above 1e-7 after {attempts} random draws")]
    DegenerateSplit { attempts: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no strict decrease found after {backtracks} backtracking halvings")]
    NoDecrease { backtracks: usize },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}
