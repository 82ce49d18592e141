//! Constructive smoothing of unitary chains.
//!
//! A chain u_0..u_n with successive gaps `||u_{k-1} - u_k|| <= eps < 2` is
//! replaced by a nearby chain v_0..v_n whose gaps are strictly below eps,
//! with every `||v_k - u_k|| <= delta`. The construction takes the principal
//! logarithm h_k of each step ratio and damps it by a schedule
//! `t_k = 1 - 2^k sigma / m^k`, where `theta = d^{-1}(eps)`,
//! `m = cos(theta/2)` and `sigma < (m/2)^n`.
//!
//! A windowed variant smooths only indices -n..n of a longer chain and clamps
//! everything outside to the window-edge values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use unitary_core::{
    d_inv, exp_skew, op_norm, principal_log, CoreError, ToleranceConfig, UnitaryMatrix,
};

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("eps must lie in (0, 2), got {0}; at eps = 2 the step logarithms do not exist")]
    EpsOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("chain invariant violated: gap {gap} at step {k} exceeds eps {eps}")]
    GapTooLarge { k: usize, gap: f64, eps: f64 },

    #[error("postcondition failed: {0}")]
    PostconditionFailed(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Finite sequence u_0..u_n of same-dimension unitaries with successive gaps
/// bounded by eps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitaryChain {
    matrices: Vec<UnitaryMatrix>,
    eps: f64,
}

impl UnitaryChain {
    pub fn new(
        matrices: Vec<UnitaryMatrix>,
        eps: f64,
        tol: &ToleranceConfig,
    ) -> Result<Self, ChainError> {
        if !(0.0..2.0).contains(&eps) || eps == 0.0 {
            return Err(ChainError::EpsOutOfRange(eps));
        }
        if matrices.is_empty() {
            return Err(ChainError::InvalidParameter("chain must be nonempty".into()));
        }
        let dim = matrices[0].dim();
        for m in &matrices {
            if m.dim() != dim {
                return Err(ChainError::InvalidParameter(
                    "all chain entries must share one dimension".into(),
                ));
            }
        }
        for k in 1..matrices.len() {
            let gap = gap_between(&matrices[k - 1], &matrices[k]);
            if gap > eps + tol.unitarity_tol {
                return Err(ChainError::GapTooLarge { k, gap, eps });
            }
        }
        Ok(Self { matrices, eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn matrices(&self) -> &[UnitaryMatrix] {
        &self.matrices
    }

    /// Successive gaps `||u_{k-1} - u_k||`, length `len() - 1`.
    pub fn gaps(&self) -> Vec<f64> {
        (1..self.matrices.len())
            .map(|k| gap_between(&self.matrices[k - 1], &self.matrices[k]))
            .collect()
    }
}

fn gap_between(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
    op_norm(&(a.matrix() - b.matrix())).expect("same dims")
}

/// The damping schedule of a smoothing run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingSchedule {
    /// theta = d^{-1}(eps), the largest step-log norm.
    pub theta: f64,
    /// m = cos(theta/2), the lower derivative bound of d on [0, theta].
    pub m: f64,
    /// sigma, chosen below (m/2)^n and small enough for the delta bound.
    pub sigma: f64,
    /// t_1..t_n, each in (0, 1).
    pub t: Vec<f64>,
}

/// Build the schedule for a chain of n steps: sigma is half the smaller of
/// the two closed-form bounds (the paper-side constraint `(m/2)^n` and the
/// displacement constraint `delta * m^n / (2^n theta)`), so both the strict
/// gap decrease and `||v_k - u_k|| <= delta` hold with margin.
pub fn build_schedule(n: usize, eps: f64, delta: f64) -> Result<SmoothingSchedule, ChainError> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(ChainError::EpsOutOfRange(eps));
    }
    if n < 1 {
        return Err(ChainError::InvalidParameter("n must be >= 1".into()));
    }
    if delta <= 0.0 {
        return Err(ChainError::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let theta = d_inv(eps).expect("eps in (0,2)");
    let m = (theta / 2.0).cos();
    let half_m_pow = (m / 2.0).powi(n as i32);
    let displacement_bound = delta * m.powi(n as i32) / (2f64.powi(n as i32) * theta);
    let sigma = 0.5 * half_m_pow.min(displacement_bound);
    let t = (1..=n)
        .map(|k| 1.0 - 2f64.powi(k as i32) * sigma / m.powi(k as i32))
        .collect::<Vec<_>>();
    debug_assert!(t.iter().all(|&tk| tk > 0.0 && tk < 1.0));
    Ok(SmoothingSchedule { theta, m, sigma, t })
}

/// One row of the smoothing report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingRow {
    pub k: usize,
    /// `||u_{k-1} - u_k||`; 0 for k = 0.
    pub gap_before: f64,
    /// `||v_{k-1} - v_k||`; 0 for k = 0.
    pub gap_after: f64,
    /// `||v_k - u_k||`.
    pub displacement: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub rows: Vec<SmoothingRow>,
    /// eps minus the largest output gap; strictly positive on success.
    pub margin: f64,
    pub max_displacement: f64,
    pub schedule: Option<SmoothingSchedule>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingOutcome {
    pub chain: UnitaryChain,
    pub report: SmoothingReport,
}

/// Smooth the whole chain: v_0 = u_0, v_k = e^{t_k h_k} u_{k-1} with
/// h_k = log(u_k u_{k-1}^{-1}).
pub fn smooth_chain(
    chain: &UnitaryChain,
    delta: f64,
    tol: &ToleranceConfig,
) -> Result<SmoothingOutcome, ChainError> {
    let n = chain.len() - 1;
    let eps = chain.eps();
    if n == 0 {
        let report = SmoothingReport {
            rows: vec![SmoothingRow {
                k: 0,
                gap_before: 0.0,
                gap_after: 0.0,
                displacement: 0.0,
            }],
            margin: eps,
            max_displacement: 0.0,
            schedule: None,
        };
        return Ok(SmoothingOutcome {
            chain: chain.clone(),
            report,
        });
    }
    let schedule = build_schedule(n, eps, delta)?;
    let u = chain.matrices();
    let mut v: Vec<UnitaryMatrix> = Vec::with_capacity(n + 1);
    v.push(u[0].clone());
    for k in 1..=n {
        let ratio = UnitaryMatrix::new_unchecked(u[k].matrix() * u[k - 1].matrix().adjoint());
        let h = principal_log(&ratio, tol)?;
        let step = exp_skew(&h.scale(schedule.t[k - 1]))?;
        v.push(UnitaryMatrix::new_unchecked(
            step.matrix() * u[k - 1].matrix(),
        ));
    }
    let outcome = finish_outcome(u, v, eps, Some(schedule))?;
    verify_contract(&outcome, delta, 0..outcome.report.rows.len())?;
    Ok(outcome)
}

/// Smooth only the centered window of half-width `window` in a chain of odd
/// length 2N+1 (indices -N..N) and clamp outside it: entries below the window
/// become v_{-n}, entries above become v_n.
pub fn windowed_smooth(
    chain: &UnitaryChain,
    window: usize,
    delta: f64,
    tol: &ToleranceConfig,
) -> Result<SmoothingOutcome, ChainError> {
    let len = chain.len();
    if len % 2 == 0 {
        return Err(ChainError::InvalidParameter(format!(
            "windowed chain must have odd length 2N+1, got {len}"
        )));
    }
    let big_n = len / 2;
    if window > big_n {
        return Err(ChainError::InvalidParameter(format!(
            "window {window} exceeds half-width {big_n}"
        )));
    }
    let lo = big_n - window;
    let hi = big_n + window;
    let sub = UnitaryChain::new(chain.matrices()[lo..=hi].to_vec(), chain.eps(), tol)?;
    let smoothed = smooth_chain(&sub, delta, tol)?;
    let sv = smoothed.chain.matrices();
    let mut out: Vec<UnitaryMatrix> = Vec::with_capacity(len);
    for k in 0..len {
        let clamped = if k < lo {
            &sv[0]
        } else if k > hi {
            &sv[sv.len() - 1]
        } else {
            &sv[k - lo]
        };
        out.push(clamped.clone());
    }
    let outcome = finish_outcome(chain.matrices(), out, chain.eps(), smoothed.report.schedule)?;
    // clamped entries may legitimately sit further than delta from the
    // original chain; the delta bound is owed only inside the window
    verify_contract(&outcome, delta, lo..hi + 1)?;
    Ok(outcome)
}

fn finish_outcome(
    u: &[UnitaryMatrix],
    v: Vec<UnitaryMatrix>,
    eps: f64,
    schedule: Option<SmoothingSchedule>,
) -> Result<SmoothingOutcome, ChainError> {
    let mut rows = Vec::with_capacity(v.len());
    let mut max_gap = 0.0_f64;
    let mut max_disp = 0.0_f64;
    for k in 0..v.len() {
        let gap_before = if k == 0 { 0.0 } else { gap_between(&u[k - 1], &u[k]) };
        let gap_after = if k == 0 { 0.0 } else { gap_between(&v[k - 1], &v[k]) };
        let displacement = gap_between(&v[k], &u[k]);
        max_gap = max_gap.max(gap_after);
        max_disp = max_disp.max(displacement);
        rows.push(SmoothingRow {
            k,
            gap_before,
            gap_after,
            displacement,
        });
    }
    let margin = eps - max_gap;
    if margin <= 0.0 {
        return Err(ChainError::PostconditionFailed(format!(
            "output gap {max_gap} does not beat eps {eps}"
        )));
    }
    Ok(SmoothingOutcome {
        chain: UnitaryChain { matrices: v, eps },
        report: SmoothingReport {
            rows,
            margin,
            max_displacement: max_disp,
            schedule,
        },
    })
}

/// Deterministic random chain with gaps exactly <= eps: each step multiplies
/// by the exponential of a skew with norm at most d^{-1}(eps).
pub fn random_chain(dim: usize, steps: usize, eps: f64, seed: u64) -> UnitaryChain {
    use unitary_core::{random_skew, random_unitary};
    let theta = d_inv(eps).expect("eps in (0,2]");
    let mut mats = Vec::with_capacity(steps + 1);
    mats.push(random_unitary(dim, seed));
    for k in 0..steps {
        // alternate full-size and partial steps so some gaps sit exactly at eps
        let bound = if k % 2 == 0 { theta } else { theta * 0.6 };
        let h = random_skew(dim, seed ^ (0x5eed_0000 + k as u64), bound);
        let step = exp_skew(&h).expect("skew exponential");
        let prev: &UnitaryMatrix = mats.last().unwrap();
        mats.push(UnitaryMatrix::new_unchecked(
            step.matrix() * prev.matrix(),
        ));
    }
    UnitaryChain {
        matrices: mats,
        eps,
    }
}

/// Verify the Lemma contract on an outcome: displacements bounded by delta on
/// the given row range, all gaps strictly under eps.
pub fn verify_contract(
    outcome: &SmoothingOutcome,
    delta: f64,
    rows_checked_for_delta: std::ops::Range<usize>,
) -> Result<(), ChainError> {
    if outcome.report.margin <= 0.0 {
        return Err(ChainError::PostconditionFailed("nonpositive margin".into()));
    }
    for row in &outcome.report.rows[rows_checked_for_delta.start..rows_checked_for_delta.end] {
        if row.displacement > delta + 1e-9 {
            return Err(ChainError::PostconditionFailed(format!(
                "displacement {} at k={} exceeds delta {}",
                row.displacement, row.k, delta
            )));
        }
    }
    Ok(())
}
