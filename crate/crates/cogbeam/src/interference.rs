//! Leakage interference at the primary receivers caused by imperfect
//! subspace learning, its analytic bound, the calibration coefficient that
//! turns a tolerable interference level into a power-per-learning-symbol
//! rate, and the first-order perturbation diagnostic for the estimated
//! subspace.

use crate::beamforming::CbDesign;
use crate::numerics::{self, CMat};
use crate::scenario::{check_subsume_condition, ChannelSet, PrLinkDesign};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InterferenceError {
    #[error("activity probability must be positive for a leakage bound")]
    InactivePrimary,
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("effective transmit channel is rank deficient (min eigenvalue {0:.3e})")]
    DegenerateChannel(f64),
    #[error("margin zeta must lie in (0, 1], got {0}")]
    BadZeta(f64),
    #[error("interference cap and symbol period must be positive")]
    BadCalibration,
    #[error("matrices must share dimensions: {0}")]
    ShapeMismatch(String),
    #[error("no exact coupling solution: relative residual {relative_residual:.3e}")]
    NoExactSolution { relative_residual: f64 },
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
}

/// Leakage interference at the two primary terminals: raw power `i_j`,
/// effective (noise-normalized) power `i_bar_j = i_j/(rho_0·tr(b_j·b_jᴴ))`,
/// and, when the caller has evaluated it, the analytic bound on `i_bar_j`.
#[derive(Debug, Clone)]
pub struct LeakageReport {
    pub i: [f64; 2],
    pub i_bar: [f64; 2],
    pub bound: [Option<f64>; 2],
}

fn real_trace(m: &CMat) -> f64 {
    m.diagonal().iter().map(|c| c.re).sum()
}

/// Closed-form leakage at both primary terminals for a cognitive design:
/// `i_j = tr(b_j·g_j·s_cr·g_jᴴ·b_jᴴ)` with `s_cr` the full-space cognitive
/// transmit covariance. The expectation over the cognitive data streams is
/// exact, so no averaging is involved. `bound` is left unset; it needs the
/// activity factors and sample count, which [`leakage_bound`] takes.
pub fn leakage_metrics(
    design: &PrLinkDesign,
    channels: &ChannelSet,
    cb: &CbDesign,
    rho_0: f64,
) -> LeakageReport {
    let s_cr = &cb.u_basis * &cb.c_cr * cb.u_basis.adjoint();
    let mut i = [0.0; 2];
    let mut i_bar = [0.0; 2];
    for (idx, (b, g)) in [(&design.b1, &channels.g1), (&design.b2, &channels.g2)]
        .into_iter()
        .enumerate()
    {
        let bg = b * g;
        let power = real_trace(&(&bg * &s_cr * bg.adjoint())).max(0.0);
        i[idx] = power;
        let processed_noise = rho_0 * real_trace(&(b * b.adjoint()));
        i_bar[idx] = power / processed_noise;
    }
    LeakageReport {
        i,
        i_bar,
        bound: [None, None],
    }
}

fn eigen_ratio(g_j: &CMat, a_j: &CMat) -> Result<f64, InterferenceError> {
    let gg = numerics::hermitize(&(g_j * g_j.adjoint()));
    let lambda_max = numerics::hermitian_evd(&gg)?
        .eigenvalues
        .first()
        .copied()
        .unwrap_or(0.0);
    let aga = numerics::hermitize(&(a_j.adjoint() * &gg * a_j));
    let lambda_min = numerics::hermitian_evd(&aga)?
        .eigenvalues
        .last()
        .copied()
        .unwrap_or(0.0);
    if lambda_min <= 0.0 {
        return Err(InterferenceError::DegenerateChannel(lambda_min));
    }
    Ok(lambda_max / lambda_min)
}

/// Upper bound on the effective leakage `i_bar_j` after learning from `n`
/// samples: `tr(c_cr)/(alpha_j·n) · λ_max(g_j·g_jᴴ)/λ_min(a_jᴴ·g_j·g_jᴴ·a_j)`.
/// The eigenvalue ratio is scale-invariant in `g_j`, so only the geometry of
/// the primary link enters; the `1/(alpha_j·n)` factor is the share of the
/// learning window that direction j actually occupied.
pub fn leakage_bound(
    c_cr_trace: f64,
    alpha_j: f64,
    n: usize,
    g_j: &CMat,
    a_j: &CMat,
) -> Result<f64, InterferenceError> {
    if !(alpha_j > 0.0) {
        return Err(InterferenceError::InactivePrimary);
    }
    if n == 0 {
        return Err(InterferenceError::NoSamples);
    }
    Ok(c_cr_trace / (alpha_j * n as f64) * eigen_ratio(g_j, a_j)?)
}

/// Calibration coefficient `gamma_j`: the tolerable cognitive transmit power
/// per learning symbol such that the expected effective leakage stays below
/// the cap `gamma_cap`. `zeta_j` is a safety margin in (0, 1] discounting
/// the analytic approximation; `t_s` converts the learning duration from
/// seconds to symbols. The transmit-power constraint then reads
/// `tr(c_cr) ≤ min(gamma_1, gamma_2)·tau`.
pub fn gamma_coefficient(
    zeta_j: f64,
    alpha_j: f64,
    gamma_cap: f64,
    t_s: f64,
    g_j: &CMat,
    a_j: &CMat,
) -> Result<f64, InterferenceError> {
    if !(zeta_j > 0.0 && zeta_j <= 1.0) {
        return Err(InterferenceError::BadZeta(zeta_j));
    }
    if !(alpha_j > 0.0) {
        return Err(InterferenceError::InactivePrimary);
    }
    if !(gamma_cap > 0.0) || !(t_s > 0.0) {
        return Err(InterferenceError::BadCalibration);
    }
    Ok(zeta_j * alpha_j * gamma_cap / t_s / eigen_ratio(g_j, a_j)?)
}

/// First-order prediction of how noise moves the estimated noise subspace:
/// `delta_u = −(y_signalᴴ)†·z_noiseᴴ·u_true`. Valid when the signal part
/// dominates the noise; diagnostic only.
pub fn perturbation_predict(
    y_signal: &CMat,
    z_noise: &CMat,
    u_true: &CMat,
) -> Result<CMat, InterferenceError> {
    if y_signal.shape() != z_noise.shape() {
        return Err(InterferenceError::ShapeMismatch(format!(
            "signal {:?} vs noise {:?}",
            y_signal.shape(),
            z_noise.shape()
        )));
    }
    if y_signal.nrows() != u_true.nrows() {
        return Err(InterferenceError::ShapeMismatch(format!(
            "signal rows {} vs basis rows {}",
            y_signal.nrows(),
            u_true.nrows()
        )));
    }
    let pinv = numerics::pseudo_inverse(&y_signal.adjoint(), numerics::tol::PINV_DEFAULT_REL)?;
    Ok(-(pinv * z_noise.adjoint() * u_true))
}

/// Least-squares coupling matrix `w_j` with `b_j·g_j = w_j·(a_jᴴ·g_j)`,
/// which exists exactly when the subsume condition holds (the transmit row
/// space covers the receive row space). The residual is checked; a relative
/// residual above 1e-8 is returned as an error carrying its size.
pub fn solve_coupling_matrix(
    a_j: &CMat,
    b_j: &CMat,
    g_j: &CMat,
) -> Result<CMat, InterferenceError> {
    let bg = b_j * g_j;
    let ag = a_j.adjoint() * g_j;
    let w = &bg * numerics::pseudo_inverse(&ag, numerics::tol::PINV_DEFAULT_REL)?;
    let residual = (&bg - &w * &ag).norm();
    let relative_residual = residual / bg.norm().max(f64::MIN_POSITIVE);
    if !check_subsume_condition(a_j, b_j, g_j) || relative_residual > 1e-8 {
        return Err(InterferenceError::NoExactSolution { relative_residual });
    }
    Ok(w)
}
