//! The learning-throughput tradeoff: how many symbols of a block to spend
//! learning the interference subspace versus transmitting through it.
//!
//! Spending `tau` of `t_block` symbols learning scales throughput by
//! `(t_block − tau)/t_block` but lets the transmit power grow as
//! `gamma·tau` before the leakage cap binds. Three value curves cover the
//! regimes: `g1` (budget-limited), `g2` (leakage-limited), `g3` (average
//! power reshaped by the idle learning span); the solvers pick the optimal
//! split in closed form around the concave maximizer of `g2`.

use crate::beamforming::{waterfill, WaterfillSolution};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TradeoffError {
    #[error("tau = {tau} outside [0, {t_block})")]
    TauOutOfRange { tau: f64, t_block: f64 },
    #[error("problem is invalid: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Beamforming(#[from] crate::beamforming::BeamformingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// Transmit power capped per symbol: usable power `min(p_cr, gamma·tau)`.
    Peak,
    /// Energy capped over the block: usable power
    /// `min(gamma·tau, t_block·p_cr/(t_block − tau))`.
    Average,
}

/// Which value curve an evaluation or a solution refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GCurve {
    /// `(1 − tau/T)·f(p_cr)`: power budget binds, learning is pure loss.
    G1,
    /// `(1 − tau/T)·f(gamma·tau)`: leakage cap binds, learning buys power.
    G2,
    /// `(1 − tau/T)·f(T·p_cr/(T − tau))`: average power concentrated on the
    /// shrinking transmit span.
    G3,
}

/// Which closed-form case produced the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The concave maximizer of `g2` lies left of the curve crossing.
    InteriorG2,
    /// Peak mode: curves cross at `p_cr/gamma` and the optimum sits there.
    CornerPOverGamma,
    /// Average mode: the optimum sits at the lower root of the power-balance
    /// quadratic (clamped to `tau_min`).
    CornerTauL,
    /// The leakage cap binds for every feasible `tau`; `g2` rules alone.
    AlwaysG2,
}

/// One tradeoff instance: channel gains of the reduced cognitive link
/// (descending), noise, block geometry, power budget, and the leakage-rate
/// coefficient `gamma = min(gamma_1, gamma_2)`.
#[derive(Debug, Clone)]
pub struct TradeoffProblem {
    pub sigma_sq: Vec<f64>,
    pub rho_1: f64,
    pub t_block: f64,
    pub tau_min: f64,
    pub p_cr: f64,
    pub gamma: f64,
    pub constraint_mode: ConstraintMode,
}

#[derive(Debug, Clone)]
pub struct TradeoffSolution {
    /// Optimal learning span, continuous.
    pub tau_star: f64,
    /// `tau_star` rounded to a whole symbol count, never below `tau_min`.
    pub tau_star_symbols: u64,
    /// Effective throughput at `tau_star`, nats per complex dimension.
    pub value: f64,
    pub branch: Branch,
    /// Water-filling powers at the optimum.
    pub allocation: Vec<f64>,
}

impl TradeoffProblem {
    fn validate(&self) -> Result<(), TradeoffError> {
        if !(self.gamma > 0.0) {
            return Err(TradeoffError::InvalidProblem(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.t_block > 0.0) || !(self.tau_min >= 0.0) || self.tau_min >= self.t_block {
            return Err(TradeoffError::InvalidProblem(format!(
                "need 0 <= tau_min < t_block, got tau_min {} t_block {}",
                self.tau_min, self.t_block
            )));
        }
        if !(self.p_cr > 0.0) {
            return Err(TradeoffError::InvalidProblem(format!(
                "p_cr must be positive, got {}",
                self.p_cr
            )));
        }
        Ok(())
    }

    fn f(&self, z: f64) -> Result<f64, TradeoffError> {
        Ok(waterfill(&self.sigma_sq, self.rho_1, z.max(0.0))?.value)
    }

    fn wf(&self, z: f64) -> Result<WaterfillSolution, TradeoffError> {
        Ok(waterfill(&self.sigma_sq, self.rho_1, z.max(0.0))?)
    }

    /// Usable transmit power at learning span `tau` under the active mode.
    fn usable_power(&self, tau: f64) -> f64 {
        let leakage_cap = self.gamma * tau;
        match self.constraint_mode {
            ConstraintMode::Peak => self.p_cr.min(leakage_cap),
            ConstraintMode::Average => {
                (self.t_block * self.p_cr / (self.t_block - tau)).min(leakage_cap)
            }
        }
    }
}

/// Evaluates one value curve at `tau`.
pub fn eval_g(problem: &TradeoffProblem, tau: f64, curve: GCurve) -> Result<f64, TradeoffError> {
    if !(0.0..problem.t_block).contains(&tau) {
        return Err(TradeoffError::TauOutOfRange {
            tau,
            t_block: problem.t_block,
        });
    }
    let share = (problem.t_block - tau) / problem.t_block;
    let budget = match curve {
        GCurve::G1 => problem.p_cr,
        GCurve::G2 => problem.gamma * tau,
        GCurve::G3 => problem.t_block * problem.p_cr / (problem.t_block - tau),
    };
    Ok(share * problem.f(budget)?)
}

/// Maximizes the concave curve `g2` over `[tau_min, t_block)` by bisection
/// on a central finite-difference derivative; the derivative step is
/// `1e-4·t_block` and the bracket is shrunk to `1e-6·t_block`. A maximizer
/// below `tau_min` clamps there.
pub fn maximize_g2(problem: &TradeoffProblem) -> Result<(f64, f64), TradeoffError> {
    problem.validate()?;
    let t = problem.t_block;
    let h = 1e-4 * t;
    let tol = 1e-6 * t;
    let g = |tau: f64| eval_g(problem, tau, GCurve::G2);
    let slope = |tau: f64| -> Result<f64, TradeoffError> {
        let lo = (tau - h).max(0.0);
        let hi = (tau + h).min(t * (1.0 - 1e-12));
        Ok((g(hi)? - g(lo)?) / (hi - lo))
    };
    let mut lo = problem.tau_min;
    let mut hi = t * (1.0 - 1e-9);
    if slope(lo)? <= 0.0 {
        return Ok((lo, g(lo)?));
    }
    if slope(hi)? >= 0.0 {
        return Ok((hi, g(hi)?));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if slope(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    Ok((tau, g(tau)?))
}

fn finish(
    problem: &TradeoffProblem,
    tau_star: f64,
    value: f64,
    branch: Branch,
) -> Result<TradeoffSolution, TradeoffError> {
    let rounded = tau_star.round().max(problem.tau_min.ceil());
    let allocation = problem.wf(problem.usable_power(tau_star))?.allocation;
    Ok(TradeoffSolution {
        tau_star,
        tau_star_symbols: rounded as u64,
        value,
        branch,
        allocation,
    })
}

/// Closed-form optimum under the peak power constraint. The usable power
/// `min(p_cr, gamma·tau)` switches curves at `tau = p_cr/gamma`: left of it
/// `g2` rules, right of it `g1` decays. The optimum is the `g2` maximizer
/// if that lies left of the crossing, otherwise the crossing itself; when
/// `p_cr > gamma·t_block` the crossing is out of reach and `g2` rules
/// everywhere.
pub fn solve_peak(problem: &TradeoffProblem) -> Result<TradeoffSolution, TradeoffError> {
    problem.validate()?;
    let (tau_2, value_2) = maximize_g2(problem)?;
    if problem.p_cr > problem.gamma * problem.t_block {
        return finish(problem, tau_2, value_2, Branch::AlwaysG2);
    }
    let crossing = problem.p_cr / problem.gamma;
    if tau_2 < crossing {
        finish(problem, tau_2, value_2, Branch::InteriorG2)
    } else {
        let tau = crossing.max(problem.tau_min);
        let value = eval_g(problem, tau, GCurve::G1)?;
        finish(problem, tau, value, Branch::CornerPOverGamma)
    }
}

/// Roots of the average-power balance `gamma·tau·(t_block − tau) =
/// t_block·p_cr`, i.e. where the leakage cap meets the stretched average
/// budget. Returns `None` when `p_cr/gamma ≥ t_block/4` (no real interval,
/// the degenerated double root included).
pub fn average_roots(p_cr: f64, gamma: f64, t_block: f64) -> Option<(f64, f64)> {
    let ratio = p_cr / gamma;
    if ratio >= t_block / 4.0 {
        return None;
    }
    let disc = (t_block * t_block - 4.0 * t_block * ratio).sqrt();
    let tau_u = 0.5 * (t_block + disc);
    let tau_l = t_block * ratio / tau_u;
    Some((tau_l, tau_u))
}

/// Closed-form optimum under the average power constraint. When the balance
/// roots exist, the usable power follows `g2` up to the lower root, `g3`
/// (decreasing) between the roots, and `g2` (decreasing by then) beyond, so
/// the optimum is the `g2` maximizer if it lies left of the lower root and
/// the lower root itself otherwise; without roots `g2` rules everywhere.
pub fn solve_average(problem: &TradeoffProblem) -> Result<TradeoffSolution, TradeoffError> {
    problem.validate()?;
    let (tau_2, value_2) = maximize_g2(problem)?;
    match average_roots(problem.p_cr, problem.gamma, problem.t_block) {
        None => finish(problem, tau_2, value_2, Branch::AlwaysG2),
        Some((tau_l, _)) => {
            if tau_2 < tau_l {
                finish(problem, tau_2, value_2, Branch::InteriorG2)
            } else {
                let tau = tau_l.max(problem.tau_min);
                let curve = if tau > tau_l { GCurve::G3 } else { GCurve::G2 };
                let value = eval_g(problem, tau, curve)?;
                finish(problem, tau, value, Branch::CornerTauL)
            }
        }
    }
}
