//! Clamped cubic splines.

use super::FitError;
use crate::polynomial::Polynomial;

/// A C2 piecewise cubic with prescribed end slopes.
///
/// Piece `i` is stored in local form
/// `y_i + b_i (x - x_i) + c_i (x - x_i)^2 + d_i (x - x_i)^3` on
/// `[knots[i], knots[i + 1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    pieces: Vec<[f64; 4]>,
    s0: f64,
    s1: f64,
}

/// Where an evaluation point sits relative to the knots.
fn locate(knots: &[f64], x: f64) -> usize {
    let last = knots.len() - 2;
    knots.partition_point(|&k| k <= x).saturating_sub(1).min(last)
}

impl CubicSpline {
    /// Interpolates `(xs, ys)` with `s'(xs[0]) = s0` and `s'(xs[last]) = s1`.
    pub fn clamped(xs: &[f64], ys: &[f64], s0: f64, s1: f64) -> Result<Self, FitError> {
        if xs.len() != ys.len() {
            return Err(FitError::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if xs.len() < 3 {
            return Err(FitError::TooFewPoints {
                points: xs.len(),
                needed: 3,
            });
        }
        if xs.iter().chain(ys).any(|v| !v.is_finite()) || !s0.is_finite() || !s1.is_finite() {
            return Err(FitError::NonFinite);
        }
        if let Some(index) = xs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(FitError::KnotsNotIncreasing { index });
        }

        let (lower, diag, upper, rhs) = clamped_system(xs, ys, s0, s1);
        let moments = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        Ok(Self::from_moments(xs, ys, &moments, s0, s1))
    }

    /// Builds the local cubic pieces from knot values and second derivatives.
    pub(crate) fn from_moments(xs: &[f64], ys: &[f64], m: &[f64], s0: f64, s1: f64) -> Self {
        let pieces = (0..xs.len() - 1)
            .map(|i| {
                let h = xs[i + 1] - xs[i];
                let slope = (ys[i + 1] - ys[i]) / h;
                [
                    ys[i],
                    slope - h * (2.0 * m[i] + m[i + 1]) / 6.0,
                    0.5 * m[i],
                    (m[i + 1] - m[i]) / (6.0 * h),
                ]
            })
            .collect();
        Self {
            knots: xs.to_vec(),
            pieces,
            s0,
            s1,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Local coefficients `[a, b, c, d]` of every piece.
    pub fn pieces(&self) -> &[[f64; 4]] {
        &self.pieces
    }

    pub fn end_slopes(&self) -> (f64, f64) {
        (self.s0, self.s1)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        x >= lo && x <= hi
    }

    /// Value at `x`, or `None` outside the knot range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        self.contains(x).then(|| self.eval_extended(x))
    }

    /// Value at `x`; outside the knots the end pieces are continued.
    pub fn eval_extended(&self, x: f64) -> f64 {
        let i = locate(&self.knots, x);
        let [a, b, c, d] = self.pieces[i];
        let t = x - self.knots[i];
        a + t * (b + t * (c + t * d))
    }

    /// First derivative, continuing the end pieces outside the knots.
    pub fn derivative_extended(&self, x: f64) -> f64 {
        let i = locate(&self.knots, x);
        let [_, b, c, d] = self.pieces[i];
        let t = x - self.knots[i];
        b + t * (2.0 * c + t * 3.0 * d)
    }

    pub fn second_derivative_extended(&self, x: f64) -> f64 {
        let i = locate(&self.knots, x);
        let [_, _, c, d] = self.pieces[i];
        let t = x - self.knots[i];
        2.0 * c + 6.0 * d * t
    }

    /// Piece `i` as a polynomial in the global variable `x`.
    pub fn piece_polynomial(&self, i: usize) -> Polynomial {
        let [a, b, c, d] = self.pieces[i];
        Polynomial::new(vec![a, b, c, d]).compose_affine(1.0, -self.knots[i])
    }
}

/// Tridiagonal system for the knot second derivatives of a clamped spline.
pub(crate) fn clamped_system(
    xs: &[f64],
    ys: &[f64],
    s0: f64,
    s1: f64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];

    diag[0] = 2.0 * h[0];
    upper[0] = h[0];
    rhs[0] = 6.0 * (slope[0] - s0);
    for i in 1..n - 1 {
        lower[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        upper[i] = h[i];
        rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
    }
    lower[n - 1] = h[n - 2];
    diag[n - 1] = 2.0 * h[n - 2];
    rhs[n - 1] = 6.0 * (s1 - slope[n - 2]);
    (lower, diag, upper, rhs)
}

/// Thomas algorithm, eliminating top to bottom. The system is strictly
/// diagonally dominant, so no pivoting is needed.
pub(crate) fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
