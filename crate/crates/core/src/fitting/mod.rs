//! Approximating `g(x) = f^(2n+2)(xi(x))` from trajectory samples, either by
//! least-squares polynomials or by a clamped cubic spline.

mod least_squares;
mod spline;

pub use least_squares::{fit_polynomial_ls, residual_sum_of_squares, FitResult};
pub use spline::CubicSpline;

use serde::Serialize;
use thiserror::Error;

use crate::function::FunctionError;
use crate::rolle::{ode_rhs, RolleProblem, RolleTrajectory, TrajectoryStatus};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("xs has {xs} entries but ys has {ys}")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("{points} points cannot determine a fit needing {needed}")]
    TooFewPoints { points: usize, needed: usize },
    #[error("non-finite input data")]
    NonFinite,
    #[error("least-squares matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },
    #[error("spline knots must be strictly increasing (failed after index {index})")]
    KnotsNotIncreasing { index: usize },
    #[error("cannot estimate spline end slopes: {0}")]
    SlopeEstimation(String),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

pub fn fit_clamped_spline(xs: &[f64], ys: &[f64], s0: f64, s1: f64) -> Result<CubicSpline, FitError> {
    CubicSpline::clamped(xs, ys, s0, s1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeMethod {
    ChainRule,
    FiniteDifference,
}

/// Clamp slopes for a spline through `g(x_i) = f^(2n+2)(xi_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndSlopes {
    pub left: f64,
    pub right: f64,
    pub left_method: SlopeMethod,
    pub right_method: SlopeMethod,
}

/// Third-order one-sided difference at the start of a uniform sequence.
fn one_sided_difference(y: [f64; 4], h: f64) -> f64 {
    (-11.0 * y[0] + 18.0 * y[1] - 9.0 * y[2] + 2.0 * y[3]) / (6.0 * h)
}

/// `dg/dx = f^(2n+3)(xi) * dxi/dx` at both trajectory ends, falling back to
/// one-sided differences where the ODE cannot be evaluated.
pub fn spline_end_slopes(traj: &RolleTrajectory, prob: &RolleProblem) -> Result<EndSlopes, FitError> {
    if let TrajectoryStatus::InvalidBranch { x, xi } = traj.status {
        return Err(FitError::SlopeEstimation(format!(
            "trajectory left the node interval at x = {x} (xi = {xi})"
        )));
    }
    let len = traj.len();
    let order = prob.remainder_order() + 1;
    let g = |xi: f64| prob.remainder_derivative(xi);
    let chain = |i: usize| -> Option<f64> {
        let (x, xi) = (traj.xs[i], traj.xis[i]);
        let dxi = ode_rhs(prob, x, xi).ok()?;
        let v = prob.f.deriv(order, xi).ok()? * dxi;
        v.is_finite().then_some(v)
    };
    let fd_left = || {
        (len >= 4).then(|| {
            one_sided_difference([g(traj.xis[0]), g(traj.xis[1]), g(traj.xis[2]), g(traj.xis[3])], traj.h)
        })
    };
    let fd_right = || {
        (len >= 4).then(|| {
            let k = len - 1;
            -one_sided_difference(
                [g(traj.xis[k]), g(traj.xis[k - 1]), g(traj.xis[k - 2]), g(traj.xis[k - 3])],
                traj.h,
            )
        })
    };

    let (left, left_method) = match chain(0) {
        Some(v) => (v, SlopeMethod::ChainRule),
        None => (
            fd_left().ok_or_else(|| FitError::SlopeEstimation("too few samples at the left end".into()))?,
            SlopeMethod::FiniteDifference,
        ),
    };
    let right_chain = if traj.is_complete() { chain(len - 1) } else { None };
    let (right, right_method) = match right_chain {
        Some(v) => (v, SlopeMethod::ChainRule),
        None => (
            fd_right().ok_or_else(|| FitError::SlopeEstimation("too few samples at the right end".into()))?,
            SlopeMethod::FiniteDifference,
        ),
    };
    Ok(EndSlopes {
        left,
        right,
        left_method,
        right_method,
    })
}

/// The textbook clamped-spline bound `5 max|f^(2n+6)(x_i)| / 384 * h^4`,
/// evaluated literally on the trajectory abscissae with the RK step `h`.
///
/// This is a diagnostic. The derivative taken is that of `f` at `x_i`, not
/// the fourth derivative of the sampled function `g`.
pub fn spline_error_bound(traj: &RolleTrajectory, prob: &RolleProblem) -> Result<f64, FitError> {
    let order = prob.remainder_order() + 4;
    prob.f.require_order(order)?;
    let max = traj
        .xs
        .iter()
        .map(|&x| prob.f.deriv_unchecked(order, x).abs())
        .fold(0.0, f64::max);
    Ok(5.0 * max / 384.0 * traj.h.powi(4))
}
