//! Dense complex-matrix primitives with the conventions every other module
//! relies on: eigenvalues sorted descending, square-root factors with zero
//! columns dropped, explicit pseudo-inverse cutoffs, and projector-based
//! subspace comparison.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex;
use thiserror::Error;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Numerical tolerances shared across the toolkit.
pub mod tol {
    /// Relative Frobenius tolerance for accepting a matrix as Hermitian.
    pub const HERMITIAN_REL: f64 = 1e-12;
    /// Frobenius tolerance on `VᴴV − I` for eigenvector orthonormality.
    pub const ORTHONORMALITY: f64 = 1e-10;
    /// Relative Frobenius tolerance on eigendecomposition reconstruction.
    pub const RECONSTRUCTION_REL: f64 = 1e-9;
    /// PSD check: eigenvalues below `−PSD_CLAMP_REL·λ_max` are rejected,
    /// anything above is clamped to zero.
    pub const PSD_CLAMP_REL: f64 = 1e-10;
    /// Relative eigenvalue cutoff for the numerical rank of a PSD matrix.
    pub const RANK_REL: f64 = 1e-9;
    /// Default relative singular-value cutoff for the pseudo-inverse.
    pub const PINV_DEFAULT_REL: f64 = 1e-12;
}

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: relative asymmetry {rel_asym:.3e} exceeds {limit:.3e}")]
    NotHermitian { rel_asym: f64, limit: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.6e} below {limit:.6e}")]
    NotPsd { eigenvalue: f64, limit: f64 },
    #[error("pseudo-inverse tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
    #[error("row counts differ: {left} vs {right}")]
    RowMismatch { left: usize, right: usize },
    #[error("eigendecomposition did not converge")]
    NoConvergence,
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending,
/// column i of `eigenvectors` paired with `eigenvalues[i]`.
#[derive(Debug, Clone)]
pub struct EvdResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Checks `M = Mᴴ` within the relative Frobenius tolerance.
pub fn is_hermitian(m: &CMat) -> bool {
    if !m.is_square() {
        return false;
    }
    let asym = frobenius(&(m - m.adjoint()));
    asym <= tol::HERMITIAN_REL * frobenius(m).max(f64::MIN_POSITIVE)
}

/// Averages a numerically Hermitian matrix with its adjoint, making the
/// symmetry exact before factorization.
pub(crate) fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|c| c * 0.5)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues descending.
///
/// Ties keep the order produced by the underlying factorization, so callers
/// must compare degenerate eigenspaces by span, not by column.
pub fn hermitian_evd(m: &CMat) -> Result<EvdResult, NumericsError> {
    if !m.is_square() {
        return Err(NumericsError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let norm = frobenius(m);
    let rel_asym = if norm > 0.0 {
        frobenius(&(m - m.adjoint())) / norm
    } else {
        0.0
    };
    if rel_asym > tol::HERMITIAN_REL {
        return Err(NumericsError::NotHermitian {
            rel_asym,
            limit: tol::HERMITIAN_REL,
        });
    }
    let eig = hermitize(m)
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(NumericsError::NoConvergence)?;
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues of a Hermitian matrix are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EvdResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Square-root factor `R` of a PSD Hermitian matrix with `R·Rᴴ = s`.
///
/// `R` has one column per eigenvalue above the numerical-rank cutoff, so a
/// rank-r input yields an n×r factor; eigenvalues slightly below zero (within
/// `PSD_CLAMP_REL` of the largest) are clamped, anything lower is rejected.
pub fn psd_sqrt(s: &CMat) -> Result<CMat, NumericsError> {
    let evd = hermitian_evd(s)?;
    let lambda_max = evd.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let clamp_floor = -tol::PSD_CLAMP_REL * lambda_max;
    if let Some(&worst) = evd
        .eigenvalues
        .iter()
        .find(|&&l| l < clamp_floor && l < -f64::MIN_POSITIVE)
    {
        return Err(NumericsError::NotPsd {
            eigenvalue: worst,
            limit: clamp_floor,
        });
    }
    let rank_cut = tol::RANK_REL * lambda_max;
    let kept: Vec<usize> = (0..evd.eigenvalues.len())
        .filter(|&i| evd.eigenvalues[i] > rank_cut)
        .collect();
    let n = s.nrows();
    let mut r = CMat::zeros(n, kept.len());
    for (dst, &src) in kept.iter().enumerate() {
        let scale = C64::from(evd.eigenvalues[src].sqrt());
        r.set_column(dst, &(evd.eigenvectors.column(src) * scale));
    }
    Ok(r)
}

/// Moore–Penrose pseudo-inverse with singular values below
/// `rel_tol·σ_max` treated as zero. A zero matrix maps to the zero matrix of
/// transposed shape.
pub fn pseudo_inverse(m: &CMat, rel_tol: f64) -> Result<CMat, NumericsError> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(NumericsError::InvalidTolerance(rel_tol));
    }
    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    if sigma_max <= 0.0 {
        return Ok(CMat::zeros(m.ncols(), m.nrows()));
    }
    svd.pseudo_inverse(rel_tol * sigma_max)
        .map_err(|_| NumericsError::InvalidTolerance(rel_tol))
}

/// Frobenius distance between the orthogonal projectors of two
/// orthonormal-column bases. Zero iff the spans coincide, invariant to
/// rotations of either basis.
pub fn subspace_distance(u1: &CMat, u2: &CMat) -> Result<f64, NumericsError> {
    if u1.nrows() != u2.nrows() {
        return Err(NumericsError::RowMismatch {
            left: u1.nrows(),
            right: u2.nrows(),
        });
    }
    let p1 = u1 * u1.adjoint();
    let p2 = u2 * u2.adjoint();
    Ok(frobenius(&(p1 - p2)))
}

/// Natural log-determinant of `I + M/rho`, with `M` Hermitian PSD.
/// Used for MIMO rate evaluation; Cholesky keeps the result real.
pub(crate) fn log_det_identity_plus(m: &CMat, rho: f64) -> f64 {
    let n = m.nrows();
    let scaled = hermitize(m).map(|c| c / rho) + CMat::identity(n, n);
    match Cholesky::new(scaled.clone()) {
        Some(chol) => {
            let l = chol.l();
            2.0 * (0..n).map(|i| l[(i, i)].re.ln()).sum::<f64>()
        }
        // Hermitian PSD input makes I + M/rho positive definite; the fallback
        // only fires on borderline conditioning.
        None => scaled.determinant().re.max(f64::MIN_POSITIVE).ln(),
    }
}

/// Stacks two matrices with equal column counts on top of each other.
pub(crate) fn vstack(top: &CMat, bottom: &CMat) -> CMat {
    debug_assert_eq!(top.ncols(), bottom.ncols());
    let mut out = CMat::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.view_mut((0, 0), (top.nrows(), top.ncols())).copy_from(top);
    out.view_mut((top.nrows(), 0), (bottom.nrows(), bottom.ncols()))
        .copy_from(bottom);
    out
}

/// Numerical rank via singular values above `rel_cut·σ_max`.
pub(crate) fn numerical_rank(m: &CMat, rel_cut: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let sigma_max = sv.max();
    if sigma_max <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_cut * sigma_max).count()
}

pub(crate) fn complex_diag(values: &[f64]) -> CMat {
    CMat::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| C64::from(v)),
    ))
}
