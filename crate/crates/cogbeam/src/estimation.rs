//! Estimators for the primary-signal covariance, its rank, the noise power,
//! and the signal/noise subspaces, plus the effective interference channel
//! built from them.

use crate::airlink::ObservationBatch;
use crate::numerics::{self, CMat};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("observation batch is empty")]
    EmptyBatch,
    #[error("need at least 2 eigenvalues, got {0}")]
    TooFewEigenvalues(usize),
    #[error("sample count must be at least 2, got {0}")]
    TooFewSamples(usize),
    #[error("eigenvalues must be sorted descending")]
    UnsortedEigenvalues,
    #[error("rank {rank} exceeds dimension {dim}")]
    RankTooLarge { rank: usize, dim: usize },
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
}

/// Estimated covariance decomposition at the cognitive transmitter.
///
/// `v_hat` spans the estimated signal subspace (dimension `d_eff_hat`),
/// `u_hat` its orthogonal complement: the directions the cognitive
/// transmitter may use. `g_eff` is the effective interference channel, the
/// adjoint of the covariance square-root factor, with `d_eff_hat` rows.
/// `degenerate` marks the no-free-directions case `d_eff_hat = m_t`, which is
/// handed back to the caller rather than treated as an error.
#[derive(Debug, Clone)]
pub struct EicEstimate {
    pub q_s_hat: CMat,
    pub d_eff_hat: usize,
    pub v_hat: CMat,
    pub u_hat: CMat,
    pub rho_0_hat: f64,
    pub g_eff: CMat,
    pub degenerate: bool,
}

/// Sample covariance `(1/n)·Σ y(n)·y(n)ᴴ` of an observation batch.
pub fn sample_covariance(batch: &ObservationBatch) -> Result<CMat, EstimationError> {
    let n = batch.y.ncols();
    if n == 0 {
        return Err(EstimationError::EmptyBatch);
    }
    let q = (&batch.y * batch.y.adjoint()).map(|c| c / n as f64);
    Ok(numerics::hermitize(&q))
}

fn assemble(
    evd: &numerics::EvdResult,
    shrunk: &[f64],
    d_eff: usize,
    rho_0_hat: f64,
) -> Result<EicEstimate, EstimationError> {
    let m_t = evd.eigenvectors.nrows();
    let v_hat = evd.eigenvectors.columns(0, d_eff).into_owned();
    let u_hat = evd.eigenvectors.columns(d_eff, m_t - d_eff).into_owned();
    let q_s_hat = numerics::hermitize(
        &(&v_hat * numerics::complex_diag(&shrunk[..d_eff]) * v_hat.adjoint()),
    );
    let g_eff = numerics::psd_sqrt(&q_s_hat)?.adjoint();
    Ok(EicEstimate {
        q_s_hat,
        d_eff_hat: d_eff,
        v_hat,
        u_hat,
        rho_0_hat,
        g_eff,
        degenerate: d_eff == m_t,
    })
}

/// Covariance estimate when the noise power is known.
///
/// Eigenvalues of the sample covariance are soft-thresholded to
/// `(λ_i − rho_0)⁺`. The retained rank is the number of eigenvalues above
/// `rho_0·(1 + √(m_t/n))²`: the largest eigenvalue a pure-noise sample
/// covariance produces (its Marchenko–Pastur edge), so residual noise modes
/// are excluded even though they exceed `rho_0` itself. With `rho_0 = 0` the
/// threshold vanishes and the input is reproduced exactly.
pub fn estimate_known_noise(
    q_y_hat: &CMat,
    rho_0: f64,
    n: usize,
) -> Result<EicEstimate, EstimationError> {
    if n < 2 {
        return Err(EstimationError::TooFewSamples(n));
    }
    let evd = numerics::hermitian_evd(q_y_hat)?;
    let m_t = q_y_hat.nrows();
    let edge = rho_0 * (1.0 + (m_t as f64 / n as f64).sqrt()).powi(2);
    let d_eff = evd.eigenvalues.iter().filter(|&&l| l > edge).count();
    let shrunk: Vec<f64> = evd
        .eigenvalues
        .iter()
        .map(|&l| (l - rho_0).max(0.0))
        .collect();
    assemble(&evd, &shrunk, d_eff, rho_0)
}

/// Rank estimate by minimum description length: the candidate rank k scores
/// the spread of the trailing eigenvalues (arithmetic over geometric mean)
/// against a model-complexity penalty, and the smallest score wins. k ranges
/// over 0..m_t−1 so at least one eigenvalue is always left to the noise.
pub fn estimate_rank_mdl(eigenvalues: &[f64], n: usize) -> Result<usize, EstimationError> {
    let m_t = eigenvalues.len();
    if m_t < 2 {
        return Err(EstimationError::TooFewEigenvalues(m_t));
    }
    if n < 2 {
        return Err(EstimationError::TooFewSamples(n));
    }
    if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
        return Err(EstimationError::UnsortedEigenvalues);
    }
    let floored: Vec<f64> = eigenvalues.iter().map(|&l| l.max(1e-300)).collect();
    let ln_n = (n as f64).ln();
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..m_t {
        let tail = &floored[k..];
        let count = tail.len() as f64;
        let am = tail.iter().sum::<f64>() / count;
        let ln_gm = tail.iter().map(|&l| l.ln()).sum::<f64>() / count;
        let data_term = count * n as f64 * (am.ln() - ln_gm);
        let penalty = 0.5 * (k * (2 * m_t - k)) as f64 * ln_n;
        let score = data_term + penalty;
        if score < best.0 {
            best = (score, k);
        }
    }
    Ok(best.1)
}

/// Covariance estimate when the noise power is unknown: the rank comes from
/// the description-length criterion, the noise power from the mean of the
/// discarded eigenvalues, and the retained eigenvalues are shrunk by that
/// estimate (clamped at zero).
pub fn estimate_unknown_noise(q_y_hat: &CMat, n: usize) -> Result<EicEstimate, EstimationError> {
    let evd = numerics::hermitian_evd(q_y_hat)?;
    let d_eff = estimate_rank_mdl(&evd.eigenvalues, n)?;
    let tail = &evd.eigenvalues[d_eff..];
    let rho_0_hat = (tail.iter().sum::<f64>() / tail.len() as f64).max(0.0);
    let shrunk: Vec<f64> = evd
        .eigenvalues
        .iter()
        .map(|&l| (l - rho_0_hat).max(0.0))
        .collect();
    assemble(&evd, &shrunk, d_eff, rho_0_hat)
}

/// Covariance estimate with the rank supplied by the caller, for runs where
/// the signal dimension is treated as side information: the top `d_eff`
/// eigenvalues are shrunk by `rho_0` and the rest discarded.
pub fn estimate_with_rank(
    q_y_hat: &CMat,
    rho_0: f64,
    d_eff: usize,
) -> Result<EicEstimate, EstimationError> {
    let m_t = q_y_hat.nrows();
    if d_eff > m_t {
        return Err(EstimationError::RankTooLarge {
            rank: d_eff,
            dim: m_t,
        });
    }
    let evd = numerics::hermitian_evd(q_y_hat)?;
    let shrunk: Vec<f64> = evd
        .eigenvalues
        .iter()
        .map(|&l| (l - rho_0).max(0.0))
        .collect();
    assemble(&evd, &shrunk, d_eff, rho_0)
}
