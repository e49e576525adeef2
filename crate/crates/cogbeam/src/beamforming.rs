//! Cognitive transmit design: water-filling over the channel eigenmodes
//! restricted to the estimated noise subspace, throughput evaluation, the
//! projection-SVD baseline, and spatial degree-of-freedom counts.

use crate::numerics::{self, CMat, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BeamformingError {
    #[error("channel gains must be sorted descending and nonnegative")]
    BadGains,
    #[error("noise power must be positive, got {0}")]
    BadNoise(f64),
    #[error("power budget must be nonnegative, got {0}")]
    BadBudget(f64),
    #[error("learning fraction must lie in [0, 1), got {0}")]
    BadLearningFraction(f64),
    #[error("basis has {basis_rows} rows but channel has {channel_cols} columns")]
    DimensionMismatch {
        basis_rows: usize,
        channel_cols: usize,
    },
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
}

/// Water-filling allocation over parallel channels with gains `sigma_sq`
/// and noise `rho_1`. `value` is the achieved sum rate in nats,
/// `water_level` the common level `1/mu`, `active_count` the number of
/// dimensions holding positive power.
#[derive(Debug, Clone)]
pub struct WaterfillSolution {
    pub value: f64,
    pub allocation: Vec<f64>,
    pub water_level: f64,
    pub active_count: usize,
}

/// Maximizes `Σ ln(1 + sigma_sq[i]·x[i]/rho_1)` over `x ≥ 0, Σx = z`.
///
/// The active set is found by scanning the budget breakpoints `q_k` at which
/// dimension k+1 starts receiving power; a budget exactly on a breakpoint
/// resolves to the smaller active set (both give the same value by
/// continuity). Zero-gain dimensions never receive power. The returned value
/// equals the closed piecewise form of the optimal-value function on the
/// segment containing `z`.
pub fn waterfill(
    sigma_sq: &[f64],
    rho_1: f64,
    z: f64,
) -> Result<WaterfillSolution, BeamformingError> {
    if sigma_sq.iter().any(|&s| !(s >= 0.0) || !s.is_finite())
        || sigma_sq.windows(2).any(|w| w[0] < w[1])
    {
        return Err(BeamformingError::BadGains);
    }
    if !(rho_1 > 0.0) {
        return Err(BeamformingError::BadNoise(rho_1));
    }
    if !(z >= 0.0) {
        return Err(BeamformingError::BadBudget(z));
    }
    let positive = sigma_sq.iter().filter(|&&s| s > 0.0).count();
    let mut allocation = vec![0.0; sigma_sq.len()];
    if positive == 0 || z == 0.0 {
        return Ok(WaterfillSolution {
            value: 0.0,
            allocation,
            water_level: 0.0,
            active_count: 0,
        });
    }
    // Inverse gains (noise-normalized) of the usable dimensions, ascending.
    let inv: Vec<f64> = sigma_sq[..positive].iter().map(|&s| rho_1 / s).collect();
    let mut prefix = 0.0;
    let mut active = positive;
    for k in 1..positive {
        prefix += inv[k - 1];
        // Budget at which dimension k+1 turns on.
        let q_k = k as f64 * inv[k] - prefix;
        if z <= q_k {
            active = k;
            break;
        }
    }
    let inv_sum: f64 = inv[..active].iter().sum();
    let level = (z + inv_sum) / active as f64;
    let mut value = 0.0;
    for i in 0..active {
        let x = level - inv[i];
        allocation[i] = x;
        value += (1.0 + sigma_sq[i] * x / rho_1).ln();
    }
    Ok(WaterfillSolution {
        value,
        allocation,
        water_level: level,
        active_count: active,
    })
}

/// Cognitive transmit design confined to `span(u_basis)`.
///
/// `c_cr` is the covariance on the reduced coordinates (one per basis
/// column), `a_cr = u_basis·c_cr^{1/2}` the full-space beamformer whose
/// columns therefore lie in the basis span by construction.
#[derive(Debug, Clone)]
pub struct CbDesign {
    pub u_basis: CMat,
    pub c_cr: CMat,
    pub a_cr: CMat,
    pub d_cr: usize,
    pub power_used: f64,
}

/// Designs the cognitive transmit covariance: eigendecompose the reduced
/// channel Gram matrix `u_basisᴴ·hᴴ·h·u_basis`, water-fill the budget over
/// its eigenvalues, and rotate the allocation back. An empty basis or zero
/// budget yields the zero design.
pub fn design_cb(
    u_basis: &CMat,
    h: &CMat,
    budget: f64,
    rho_1: f64,
) -> Result<CbDesign, BeamformingError> {
    if u_basis.nrows() != h.ncols() {
        return Err(BeamformingError::DimensionMismatch {
            basis_rows: u_basis.nrows(),
            channel_cols: h.ncols(),
        });
    }
    if !(budget >= 0.0) {
        return Err(BeamformingError::BadBudget(budget));
    }
    let m_t = u_basis.nrows();
    let r = u_basis.ncols();
    if r == 0 || budget == 0.0 {
        return Ok(CbDesign {
            u_basis: u_basis.clone(),
            c_cr: CMat::zeros(r, r),
            a_cr: CMat::zeros(m_t, 0),
            d_cr: 0,
            power_used: 0.0,
        });
    }
    let hu = h * u_basis;
    let gram = numerics::hermitize(&(hu.adjoint() * &hu));
    let evd = numerics::hermitian_evd(&gram)?;
    let gains: Vec<f64> = evd.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let wf = waterfill(&gains, rho_1, budget)?;
    let u_h = &evd.eigenvectors;
    let c_cr = numerics::hermitize(
        &(u_h * numerics::complex_diag(&wf.allocation) * u_h.adjoint()),
    );
    let mut a_cr = CMat::zeros(m_t, wf.active_count);
    for i in 0..wf.active_count {
        let scaled = u_basis * u_h.column(i) * C64::from(wf.allocation[i].sqrt());
        a_cr.set_column(i, &scaled.column(0));
    }
    Ok(CbDesign {
        u_basis: u_basis.clone(),
        c_cr,
        a_cr,
        d_cr: wf.active_count,
        power_used: wf.allocation.iter().sum(),
    })
}

/// Effective rate `(1 − learning_fraction)·ln det(I + h·U·c_cr·Uᴴ·hᴴ/rho_1)`
/// in nats per complex dimension; the leading factor charges the share of
/// the block spent learning.
pub fn throughput(
    h: &CMat,
    u_basis: &CMat,
    c_cr: &CMat,
    rho_1: f64,
    learning_fraction: f64,
) -> Result<f64, BeamformingError> {
    if !(0.0..1.0).contains(&learning_fraction) {
        return Err(BeamformingError::BadLearningFraction(learning_fraction));
    }
    if !(rho_1 > 0.0) {
        return Err(BeamformingError::BadNoise(rho_1));
    }
    if c_cr.ncols() == 0 {
        return Ok(0.0);
    }
    let hu = h * u_basis;
    let m = numerics::hermitize(&(&hu * c_cr * hu.adjoint()));
    Ok((1.0 - learning_fraction) * numerics::log_det_identity_plus(&m, rho_1))
}

/// Capacity of the baseline that forces the cognitive signal orthogonal to
/// the full primary channel matrices: project `h` onto the orthogonal
/// complement of the stacked rows of `g1` and `g2`, then water-fill the
/// remaining eigenmodes. Returns nats per complex dimension.
pub fn psvd_capacity(
    h: &CMat,
    g1: &CMat,
    g2: &CMat,
    budget: f64,
    rho_1: f64,
) -> Result<f64, BeamformingError> {
    let m_t = h.ncols();
    let stacked = numerics::vstack(g1, g2);
    debug_assert_eq!(stacked.ncols(), m_t);
    // Null basis of the stacked rows via the Gram matrix. Rank-deficient
    // directions surface as eigenvalues at the EVD noise floor, a small
    // multiple of eps times the largest eigenvalue, so the cutoff sits just
    // above that floor rather than at a squared singular-value tolerance the
    // Gram cannot resolve.
    let gram = numerics::hermitize(&(stacked.adjoint() * &stacked));
    let evd = numerics::hermitian_evd(&gram)?;
    let lambda_max = evd.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cut = lambda_max * f64::EPSILON * 100.0 * m_t as f64;
    let null_dim = evd.eigenvalues.iter().filter(|&&l| l <= cut).count();
    if null_dim == 0 {
        return Ok(0.0);
    }
    let basis = evd.eigenvectors.columns(m_t - null_dim, null_dim).into_owned();
    let hp = h * basis;
    let gram_h = numerics::hermitize(&(hp.adjoint() * &hp));
    let gains: Vec<f64> = numerics::hermitian_evd(&gram_h)?
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0))
        .collect();
    Ok(waterfill(&gains, rho_1, budget)?.value)
}

/// Spatial degrees of freedom left to a transmitter that must avoid `a + b`
/// dimensions: `min((m_t − a − b)⁺, m_r)`.
pub fn dof(m_t: usize, m_r: usize, a: usize, b: usize) -> usize {
    m_t.saturating_sub(a + b).min(m_r)
}
