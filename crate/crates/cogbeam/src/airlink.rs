//! TDD activity schedules for the primary link and the observation model at
//! the cognitive transmitter during its learning window.

use crate::numerics::{self, CMat};
use crate::scenario::sample_cscg_matrix;
use crate::scenario::{ChannelSet, PrLinkDesign};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AirlinkError {
    #[error("activity probabilities sum to {0}, must not exceed 1")]
    ActivityOverflow(f64),
    #[error("block length must be at least 1")]
    ZeroBlockLength,
    #[error("schedule is empty")]
    EmptySchedule,
}

/// Per-symbol activity indicators for the two primary directions. At most
/// one direction is active in any symbol; the remainder are idle.
#[derive(Debug, Clone)]
pub struct TddSchedule {
    pub q1: Vec<bool>,
    pub q2: Vec<bool>,
}

impl TddSchedule {
    pub fn len(&self) -> usize {
        self.q1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q1.is_empty()
    }

    /// Number of symbols in which direction j (1-based) is active.
    pub fn active_count(&self, j: usize) -> usize {
        let q = if j == 1 { &self.q1 } else { &self.q2 };
        q.iter().filter(|&&b| b).count()
    }
}

/// Draws an activity schedule of `n` symbols in runs of `block_len` from the
/// three-way categorical (direction 1: `alpha_1`, direction 2: `alpha_2`,
/// idle: the rest). `block_len = 1` gives per-symbol i.i.d. draws, which is
/// the covariance model the estimators assume.
pub fn generate_tdd_schedule<R: Rng>(
    n: usize,
    alpha_1: f64,
    alpha_2: f64,
    block_len: usize,
    rng: &mut R,
) -> Result<TddSchedule, AirlinkError> {
    if alpha_1 + alpha_2 > 1.0 + 1e-12 {
        return Err(AirlinkError::ActivityOverflow(alpha_1 + alpha_2));
    }
    if block_len == 0 {
        return Err(AirlinkError::ZeroBlockLength);
    }
    let mut q1 = vec![false; n];
    let mut q2 = vec![false; n];
    let mut start = 0;
    while start < n {
        let end = (start + block_len).min(n);
        let u: f64 = rng.random();
        if u < alpha_1 {
            q1[start..end].fill(true);
        } else if u < alpha_1 + alpha_2 {
            q2[start..end].fill(true);
        }
        start = end;
    }
    Ok(TddSchedule { q1, q2 })
}

/// What the cognitive transmitter records over one learning window: the
/// received samples, the schedule that produced them, and the noiseless
/// component kept only for perturbation diagnostics. Estimators must not
/// read `signal_only`.
#[derive(Debug, Clone)]
pub struct ObservationBatch {
    /// Received samples, `m_t × n`.
    pub y: CMat,
    /// Noiseless component of `y`, same shape.
    pub signal_only: CMat,
    pub schedule: TddSchedule,
    pub rho_0: f64,
}

/// Simulates the learning window: in each symbol the active primary
/// direction (if any) sends a fresh unit-power Gaussian stream vector
/// through its transmit beamformer, and the cognitive transmitter receives
/// it through the reciprocal channel plus noise of power `rho_0`.
pub fn observe_pr_signals<R: Rng>(
    channels: &ChannelSet,
    design: &PrLinkDesign,
    schedule: &TddSchedule,
    rho_0: f64,
    rng: &mut R,
) -> ObservationBatch {
    let n = schedule.len();
    let m_t = channels.g1.ncols();
    // Effective per-direction mixing matrices seen at the cognitive
    // transmitter: reciprocity turns the outgoing channel g_j into the
    // incoming g_jᴴ.
    let mix1 = channels.g1.adjoint() * &design.a1;
    let mix2 = channels.g2.adjoint() * &design.a2;
    let mut signal_only = CMat::zeros(m_t, n);
    for idx in 0..n {
        let column = if schedule.q1[idx] {
            let t = sample_cscg_matrix(mix1.ncols(), 1, rng);
            Some(&mix1 * t)
        } else if schedule.q2[idx] {
            let t = sample_cscg_matrix(mix2.ncols(), 1, rng);
            Some(&mix2 * t)
        } else {
            None
        };
        if let Some(col) = column {
            signal_only.set_column(idx, &col.column(0));
        }
    }
    let noise = sample_cscg_matrix(m_t, n, rng).map(|c| c * rho_0.sqrt());
    ObservationBatch {
        y: &signal_only + noise,
        signal_only,
        schedule: schedule.clone(),
        rho_0,
    }
}

/// Exact covariance of the signal component observed at the cognitive
/// transmitter: `alpha_1·g1ᴴ·s1·g1 + alpha_2·g2ᴴ·s2·g2`.
pub fn true_signal_covariance(
    channels: &ChannelSet,
    design: &PrLinkDesign,
    alpha_1: f64,
    alpha_2: f64,
) -> CMat {
    let term1 = channels.g1.adjoint() * &design.s1 * &channels.g1;
    let term2 = channels.g2.adjoint() * &design.s2 * &channels.g2;
    numerics::hermitize(&(term1.map(|c| c * alpha_1) + term2.map(|c| c * alpha_2)))
}

/// Signal rank for generic channels: `min(d_1 + d_2, m_t)`.
pub fn effective_rank(design: &PrLinkDesign, m_t: usize) -> usize {
    (design.d_1 + design.d_2).min(m_t)
}
