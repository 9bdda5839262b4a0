//! Polynomial least squares through Householder QR.
//!
//! The abscissae are mapped affinely onto `[-1, 1]` before the Vandermonde
//! matrix is formed, and the solution is mapped back to the original
//! variable afterwards.

use serde::Serialize;

use super::FitError;
use crate::polynomial::Polynomial;
use crate::report::{f64_17, vec_f64_17};

/// A fitted polynomial and its goodness-of-fit numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub degree: usize,
    #[serde(rename = "coefficients", serialize_with = "poly_17")]
    pub h_xi: Polynomial,
    /// `sqrt(sum r_i^2) / N`. Note the division by `N` rather than `sqrt(N)`.
    #[serde(rename = "V", serialize_with = "f64_17")]
    pub v: f64,
    #[serde(serialize_with = "f64_17")]
    pub residual_max: f64,
    #[serde(skip)]
    pub rss: f64,
}

fn poly_17<S: serde::Serializer>(p: &Polynomial, s: S) -> Result<S::Ok, S::Error> {
    vec_f64_17(p.coeffs(), s)
}

impl FitResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit results always serialize")
    }
}

/// Sum of squared residuals of `p` against the data.
pub fn residual_sum_of_squares(p: &Polynomial, xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - p.eval(x);
            r * r
        })
        .sum()
}

/// Least-squares polynomial of the given degree through `(xs, ys)`.
pub fn fit_polynomial_ls(xs: &[f64], ys: &[f64], degree: usize) -> Result<FitResult, FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch {
            xs: xs.len(),
            ys: ys.len(),
        });
    }
    let n = xs.len();
    let m = degree + 1;
    if n <= degree {
        return Err(FitError::TooFewPoints { points: n, needed: m });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(FitError::NonFinite);
    }

    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    // t = alpha * x + beta maps [lo, hi] onto [-1, 1].
    let (alpha, beta) = if hi > lo {
        (2.0 / (hi - lo), -(hi + lo) / (hi - lo))
    } else {
        (1.0, -lo)
    };

    // Column-major Vandermonde in t.
    let mut a = vec![0.0; n * m];
    for (i, &x) in xs.iter().enumerate() {
        let t = alpha * x + beta;
        let mut p = 1.0;
        for j in 0..m {
            a[j * n + i] = p;
            p *= t;
        }
    }
    let mut rhs = ys.to_vec();
    let coeffs_t = householder_solve(&mut a, &mut rhs, n, m)?;

    let h_xi = Polynomial::new(coeffs_t).compose_affine(alpha, beta);
    let mut rss = 0.0;
    let mut residual_max: f64 = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - h_xi.eval(x);
        rss += r * r;
        residual_max = residual_max.max(r.abs());
    }
    Ok(FitResult {
        degree,
        h_xi,
        v: rss.sqrt() / n as f64,
        residual_max,
        rss,
    })
}

/// Solves `min ||A c - b||` in place for an `n x m` column-major `A`.
fn householder_solve(a: &mut [f64], b: &mut [f64], n: usize, m: usize) -> Result<Vec<f64>, FitError> {
    let mut diag = vec![0.0; m];
    for k in 0..m {
        let col = &mut a[k * n..(k + 1) * n];
        let norm = col[k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(FitError::RankDeficient { column: k });
        }
        let alpha = if col[k] > 0.0 { -norm } else { norm };
        col[k] -= alpha;
        let vnorm2: f64 = col[k..].iter().map(|v| v * v).sum();
        diag[k] = alpha;
        let v: Vec<f64> = col[k..].to_vec();

        for j in k + 1..m {
            let cj = &mut a[j * n + k..(j + 1) * n];
            let dot: f64 = v.iter().zip(cj.iter()).map(|(x, y)| x * y).sum();
            let s = 2.0 * dot / vnorm2;
            for (c, vi) in cj.iter_mut().zip(&v) {
                *c -= s * vi;
            }
        }
        let dot: f64 = v.iter().zip(&b[k..]).map(|(x, y)| x * y).sum();
        let s = 2.0 * dot / vnorm2;
        for (bi, vi) in b[k..].iter_mut().zip(&v) {
            *bi -= s * vi;
        }
    }

    let scale = diag.iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
    if let Some(column) = diag.iter().position(|d| d.abs() <= 1e-13 * scale) {
        return Err(FitError::RankDeficient { column });
    }

    let mut c = vec![0.0; m];
    for k in (0..m).rev() {
        let mut s = b[k];
        for j in k + 1..m {
            s -= a[j * n + k] * c[j];
        }
        c[k] = s / diag[k];
    }
    Ok(c)
}
