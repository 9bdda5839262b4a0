//! Recovery of the Rolle function `xi(x)` of a Hermite interpolant.
//!
//! Differentiating the error identity `(2n+2)! (f - H) = f^(2n+2)(xi) Q^2`
//! with respect to `x` gives
//!
//! ```text
//! dxi/dx = [(2n+2)! (f' - H') - 2 f^(2n+2)(xi) Q Q'] / [Q^2 f^(2n+3)(xi)]
//! ```
//!
//! which is integrated with a fixed-step seventh-order Runge-Kutta method
//! from an initial value `xi(x_z)` found by solving the identity itself at a
//! point `x_z` next to the first node.

use serde::Serialize;
use thiserror::Error;

use crate::function::{DifferentiableFunction, FunctionError};
use crate::hermite::{
    build_hermite, delta_true, q_poly, remainder_factorial, HermiteError,
    HermiteInterpolant, NodeSet, MAX_MODEL_N,
};
use crate::polynomial::Polynomial;
use crate::report::csv_columns;
use crate::rk::FEHLBERG7;

/// Relative threshold for the singular-denominator guard.
pub const SINGULAR_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularCause {
    /// `Q(x)^2` vanishes: `x` is at or next to an interpolation node.
    NodeFactor,
    /// `f^(2n+3)(xi)` vanishes.
    DerivativeZero,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RolleError {
    #[error("singular denominator {denominator:e} at x = {x}, xi = {xi} ({cause:?})")]
    Singular {
        x: f64,
        xi: f64,
        denominator: f64,
        cause: SingularCause,
    },
    #[error("{what} = {value} is outside the open interval ({lo}, {hi})")]
    OutsideInterval {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("x_z = {0} coincides with an interpolation node")]
    AtNode(f64),
    #[error("bootstrap grid of {0} points is too coarse (need at least 100)")]
    GridTooSmall(usize),
    #[error("at least 10 steps are required, got {0}")]
    TooFewSteps(usize),
    #[error("integration interval [{start}, {end}] is empty")]
    EmptyInterval { start: f64, end: f64 },
    #[error("no sign change of the remainder residual at x_z = {x_z}; x_z may be too close to a node")]
    NoRoot { x_z: f64 },
    #[error("remainder identity does not depend on xi at x_z = {x_z}: f^(2n+2) is constant, nothing to recover")]
    Degenerate { x_z: f64 },
    #[error("no candidate initial value produced a trajectory inside the node interval (tried {candidates:?})")]
    AllBranchesInvalid { candidates: Vec<f64> },
    #[error("several candidate initial values produced valid trajectories: {valid:?}")]
    Ambiguous { valid: Vec<f64> },
    #[error("no candidate initial values supplied")]
    NoCandidates,
    #[error(transparent)]
    Hermite(#[from] HermiteError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// Everything the right-hand side of the Rolle ODE needs.
#[derive(Debug, Clone)]
pub struct RolleProblem {
    pub f: DifferentiableFunction,
    pub hermite: HermiteInterpolant,
    pub nodes: NodeSet,
    pub n: usize,
    pub q: Polynomial,
    pub q_prime: Polynomial,
    pub h_prime: Polynomial,
    factorial: f64,
}

impl RolleProblem {
    /// Builds the interpolant and checks that `f` has the `2n+3` derivatives
    /// the ODE needs.
    pub fn new(f: DifferentiableFunction, nodes: NodeSet) -> Result<Self, RolleError> {
        let hermite = build_hermite(&f, &nodes)?;
        Self::from_interpolant(f, hermite)
    }

    pub fn from_interpolant(
        f: DifferentiableFunction,
        hermite: HermiteInterpolant,
    ) -> Result<Self, RolleError> {
        let nodes = hermite.nodes.clone();
        let n = nodes.n();
        if n > MAX_MODEL_N {
            return Err(HermiteError::NTooLarge(n).into());
        }
        f.require_order(2 * n + 3)?;
        let q = q_poly(&nodes);
        let q_prime = q.derivative();
        let h_prime = hermite.poly.derivative();
        Ok(Self {
            f,
            hermite,
            nodes,
            n,
            q,
            q_prime,
            h_prime,
            factorial: remainder_factorial(n),
        })
    }

    pub fn remainder_order(&self) -> usize {
        2 * self.n + 2
    }

    /// `(2n+2)!`
    pub fn factorial(&self) -> f64 {
        self.factorial
    }

    /// `f^(2n+2)(xi)`, the quantity a trajectory lets us sample along `x`.
    pub fn remainder_derivative(&self, xi: f64) -> f64 {
        self.f.deriv_unchecked(self.remainder_order(), xi)
    }

    pub fn delta_true(&self, x: f64) -> f64 {
        delta_true(&self.f, &self.hermite, x)
    }

    pub fn delta_model(&self, xi: f64, x: f64) -> f64 {
        let q = self.q.eval(x);
        self.remainder_derivative(xi) / self.factorial * q * q
    }

    fn check_open(&self, what: &'static str, value: f64) -> Result<(), RolleError> {
        if self.nodes.contains_open(value) {
            Ok(())
        } else {
            Err(RolleError::OutsideInterval {
                what,
                value,
                lo: self.nodes.first(),
                hi: self.nodes.last(),
            })
        }
    }

    /// Numerator and denominator of the ODE right-hand side, with the
    /// singularity guard applied but no domain checks.
    pub fn rhs_parts(&self, x: f64, xi: f64) -> Result<RhsParts, RolleError> {
        let order = self.remainder_order();
        let q = self.q.eval(x);
        let q_prime = self.q_prime.eval(x);
        let f_prime = self.f.deriv_unchecked(1, x);
        let h_prime = self.h_prime.eval(x);
        let d_rem = self.f.deriv_unchecked(order, xi);
        let d_next = self.f.deriv_unchecked(order + 1, xi);

        let numerator = self.factorial * (f_prime - h_prime) - 2.0 * d_rem * q * q_prime;
        let q2 = q * q;
        let denominator = q2 * d_next;
        // Written so that a NaN denominator also counts as singular.
        let regular = denominator.abs() >= SINGULAR_REL_TOL * numerator.abs().max(1.0);
        if !regular {
            let span = self.nodes.last() - self.nodes.first();
            let q2_scaled = q2 / span.powi(2 * (self.n as i32 + 1));
            let d_scaled = d_next.abs() / d_rem.abs().max(1.0);
            let cause = if q2_scaled <= d_scaled {
                SingularCause::NodeFactor
            } else {
                SingularCause::DerivativeZero
            };
            return Err(RolleError::Singular {
                x,
                xi,
                denominator,
                cause,
            });
        }
        Ok(RhsParts {
            numerator,
            denominator,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsParts {
    pub numerator: f64,
    pub denominator: f64,
}

impl RhsParts {
    pub fn value(&self) -> f64 {
        self.numerator / self.denominator
    }
}

/// `dxi/dx` at `(x, xi)`; both must lie strictly inside the node interval.
pub fn ode_rhs(prob: &RolleProblem, x: f64, xi: f64) -> Result<f64, RolleError> {
    ode_rhs_parts(prob, x, xi).map(|p| p.value())
}

/// Like [`ode_rhs`] but also reports numerator and denominator.
pub fn ode_rhs_parts(prob: &RolleProblem, x: f64, xi: f64) -> Result<RhsParts, RolleError> {
    prob.check_open("x", x)?;
    prob.check_open("xi", xi)?;
    prob.rhs_parts(x, xi)
}

/// Finds every `xi` in the node interval satisfying the error identity at
/// `x_z`, by a sign-change scan over `grid` interior points refined with
/// bisection to `1e-13`.
pub fn bootstrap_xi(prob: &RolleProblem, x_z: f64, grid: usize) -> Result<Vec<f64>, RolleError> {
    prob.check_open("x_z", x_z)?;
    if prob.nodes.as_slice().contains(&x_z) {
        return Err(RolleError::AtNode(x_z));
    }
    if grid < 100 {
        return Err(RolleError::GridTooSmall(grid));
    }
    let target = prob.delta_true(x_z);
    let g = |xi: f64| prob.delta_model(xi, x_z) - target;

    let lo = prob.nodes.first();
    let span = prob.nodes.last() - lo;
    let pts: Vec<f64> = (1..=grid)
        .map(|i| lo + span * i as f64 / (grid + 1) as f64)
        .collect();
    let vals: Vec<f64> = pts.iter().map(|&xi| g(xi)).collect();

    let (vmin, vmax) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let scale = target.abs().max((vmin + target).abs()).max((vmax + target).abs());
    if vmax - vmin <= 1e-12 * scale || scale == 0.0 {
        return Err(RolleError::Degenerate { x_z });
    }

    let mut roots = Vec::new();
    for i in 0..grid {
        if vals[i] == 0.0 {
            roots.push(pts[i]);
            continue;
        }
        if i + 1 < grid && vals[i] * vals[i + 1] < 0.0 {
            roots.push(bisect(&g, pts[i], pts[i + 1], vals[i], 1e-13));
        }
    }
    if roots.is_empty() {
        return Err(RolleError::NoRoot { x_z });
    }
    Ok(roots)
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64, tol: f64) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Integration settings for [`solve_rolle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveSettings {
    pub steps: usize,
    /// Integration stops at `x_n - right_margin`.
    pub right_margin: f64,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            steps: 100_000,
            right_margin: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Complete,
    /// The denominator became singular; samples stop at the last good step.
    Truncated { x: f64, xi: f64, cause: SingularCause },
    /// `xi` left the node interval at the final sample.
    InvalidBranch { x: f64, xi: f64 },
}

/// Samples `(x_i, xi_i)` of a Rolle function on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RolleTrajectory {
    pub xs: Vec<f64>,
    pub xis: Vec<f64>,
    pub h: f64,
    pub x_start: f64,
    pub x_end: f64,
    pub accepted_xi_z: f64,
    pub rejected_roots: Vec<f64>,
    pub min_denominator_seen: f64,
    pub status: TrajectoryStatus,
}

impl RolleTrajectory {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn is_valid_branch(&self) -> bool {
        !matches!(self.status, TrajectoryStatus::InvalidBranch { .. })
    }

    pub fn is_complete(&self) -> bool {
        self.status == TrajectoryStatus::Complete
    }

    /// `f^(2n+2)(xi(x_i))` at every sample.
    pub fn remainder_samples(&self, prob: &RolleProblem) -> Vec<f64> {
        self.xis.iter().map(|&xi| prob.remainder_derivative(xi)).collect()
    }

    /// Largest `|delta_model(xi_i, x_i) - delta_true(x_i)|` over the samples.
    pub fn max_model_discrepancy(&self, prob: &RolleProblem) -> f64 {
        self.xs
            .iter()
            .zip(&self.xis)
            .map(|(&x, &xi)| (prob.delta_model(xi, x) - prob.delta_true(x)).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `x,xi`, 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        csv_columns(&["x", "xi"], &[&self.xs, &self.xis])
    }
}

/// Integrates the Rolle ODE from `(x_z, xi_z)` to `x_n - right_margin` with
/// the fixed-step seventh-order Fehlberg formula.
pub fn solve_rolle(
    prob: &RolleProblem,
    x_z: f64,
    xi_z: f64,
    settings: &SolveSettings,
) -> Result<RolleTrajectory, RolleError> {
    prob.check_open("x_z", x_z)?;
    prob.check_open("xi_z", xi_z)?;
    if settings.steps < 10 {
        return Err(RolleError::TooFewSteps(settings.steps));
    }
    let x_end = prob.nodes.last() - settings.right_margin;
    if x_end.partial_cmp(&x_z) != Some(std::cmp::Ordering::Greater) {
        return Err(RolleError::EmptyInterval {
            start: x_z,
            end: x_end,
        });
    }
    let h = (x_end - x_z) / settings.steps as f64;
    let (lo, hi) = (prob.nodes.first(), prob.nodes.last());

    let mut xs = Vec::with_capacity(settings.steps + 1);
    let mut xis = Vec::with_capacity(settings.steps + 1);
    xs.push(x_z);
    xis.push(xi_z);
    let mut min_den = f64::INFINITY;
    let mut status = TrajectoryStatus::Complete;

    let mut rhs = |x: f64, xi: f64| -> Result<f64, RolleError> {
        let parts = prob.rhs_parts(x, xi)?;
        min_den = min_den.min(parts.denominator.abs());
        Ok(parts.value())
    };

    let mut xi = xi_z;
    for i in 0..settings.steps {
        let x = x_z + i as f64 * h;
        match FEHLBERG7.step(&mut rhs, x, xi, h) {
            Ok(next) => xi = next,
            Err(RolleError::Singular { x, xi, cause, .. }) => {
                status = TrajectoryStatus::Truncated { x, xi, cause };
                break;
            }
            Err(e) => return Err(e),
        }
        let x_next = if i + 1 == settings.steps {
            x_end
        } else {
            x_z + (i + 1) as f64 * h
        };
        xs.push(x_next);
        xis.push(xi);
        if !(xi > lo && xi < hi) {
            status = TrajectoryStatus::InvalidBranch { x: x_next, xi };
            break;
        }
    }

    Ok(RolleTrajectory {
        xs,
        xis,
        h,
        x_start: x_z,
        x_end,
        accepted_xi_z: xi_z,
        rejected_roots: Vec::new(),
        min_denominator_seen: min_den,
        status,
    })
}

/// Solves the ODE from every candidate and keeps the single trajectory that
/// stays inside the node interval.
pub fn select_branch(
    prob: &RolleProblem,
    x_z: f64,
    candidates: &[f64],
    settings: &SolveSettings,
) -> Result<RolleTrajectory, RolleError> {
    if candidates.is_empty() {
        return Err(RolleError::NoCandidates);
    }
    let results = crate::parallel_map(candidates, |&c| solve_rolle(prob, x_z, c, settings));

    let mut valid = Vec::new();
    let mut rejected = Vec::new();
    for (&c, r) in candidates.iter().zip(results) {
        match r {
            Ok(traj) if traj.is_valid_branch() => valid.push(traj),
            Ok(_) | Err(RolleError::OutsideInterval { .. }) => rejected.push(c),
            Err(e) => return Err(e),
        }
    }
    match valid.len() {
        0 => Err(RolleError::AllBranchesInvalid {
            candidates: candidates.to_vec(),
        }),
        1 => {
            let mut traj = valid.pop().unwrap();
            traj.rejected_roots = rejected;
            Ok(traj)
        }
        _ => Err(RolleError::Ambiguous {
            valid: valid.iter().map(|t| t.accepted_xi_z).collect(),
        }),
    }
}
