//! The corrected approximant `H + E` with `E(x) = H_xi(x) Q(x)^2 / (2n+2)!`.
//!
//! `H_xi` is either a polynomial, in which case `E` is a single polynomial, or
//! a clamped cubic spline, in which case `E` is piecewise of degree `2n+5`.
//! Both kinds keep `E(x_k) = E'(x_k) = 0` at the nodes because `Q^2` and its
//! derivative vanish there.

use serde::Serialize;
use thiserror::Error;

use crate::fitting::CubicSpline;
use crate::function::DifferentiableFunction;
use crate::hermite::{q_poly, remainder_factorial, HermiteInterpolant, NodeSet};
use crate::polynomial::Polynomial;
use crate::report::f64_17;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrectorError {
    #[error("x = {x} is outside the approximation interval [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },
}

/// `H_xi * Q^2 / (2n+2)!` as one polynomial of degree `deg(H_xi) + 2n + 2`.
pub fn error_polynomial(h_xi: &Polynomial, nodes: &NodeSet) -> Polynomial {
    let q = q_poly(nodes);
    let q2 = &q * &q;
    (h_xi * &q2).scale(1.0 / remainder_factorial(nodes.n()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Correction {
    Polynomial(Polynomial),
    Spline { spline: CubicSpline, q2: Polynomial },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedApproximant {
    pub hermite: HermiteInterpolant,
    pub correction: Correction,
    /// `1 / (2n+2)!`
    pub factorial_scale: f64,
}

impl CorrectedApproximant {
    /// `H` alone.
    pub fn uncorrected(hermite: HermiteInterpolant) -> Self {
        Self::with_polynomial(hermite, &Polynomial::zero())
    }

    pub fn with_polynomial(hermite: HermiteInterpolant, h_xi: &Polynomial) -> Self {
        let e = error_polynomial(h_xi, &hermite.nodes);
        let factorial_scale = 1.0 / remainder_factorial(hermite.nodes.n());
        Self {
            hermite,
            correction: Correction::Polynomial(e),
            factorial_scale,
        }
    }

    /// Spline-based correction. Between the outermost knots and the nodes the
    /// end pieces of the spline are continued, so `E` covers `[x_0, x_n]`.
    pub fn with_spline(hermite: HermiteInterpolant, spline: CubicSpline) -> Self {
        let q = q_poly(&hermite.nodes);
        let q2 = &q * &q;
        let factorial_scale = 1.0 / remainder_factorial(hermite.nodes.n());
        Self {
            hermite,
            correction: Correction::Spline { spline, q2 },
            factorial_scale,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.hermite.nodes.first(), self.hermite.nodes.last())
    }

    fn check_domain(&self, x: f64) -> Result<(), CorrectorError> {
        let (lo, hi) = self.domain();
        match self.correction {
            Correction::Spline { .. } if !(x >= lo && x <= hi) => {
                Err(CorrectorError::Domain { x, lo, hi })
            }
            _ => Ok(()),
        }
    }

    pub fn error_term(&self, x: f64) -> Result<f64, CorrectorError> {
        self.check_domain(x)?;
        Ok(match &self.correction {
            Correction::Polynomial(e) => e.eval(x),
            Correction::Spline { spline, q2 } => {
                spline.eval_extended(x) * q2.eval(x) * self.factorial_scale
            }
        })
    }

    pub fn error_term_derivative(&self, x: f64) -> Result<f64, CorrectorError> {
        self.check_domain(x)?;
        Ok(match &self.correction {
            Correction::Polynomial(e) => e.derivative().eval(x),
            Correction::Spline { spline, q2 } => {
                let dq2 = q2.derivative();
                (spline.derivative_extended(x) * q2.eval(x) + spline.eval_extended(x) * dq2.eval(x))
                    * self.factorial_scale
            }
        })
    }

    /// Integral of `E` over `[x_0, x_n]`, exact up to rounding.
    pub fn error_term_integral(&self) -> f64 {
        let (lo, hi) = self.domain();
        match &self.correction {
            Correction::Polynomial(e) => e.integrate_definite(lo, hi),
            Correction::Spline { spline, q2 } => {
                let knots = spline.knots();
                let last = knots.len() - 2;
                let mut total = 0.0;
                for (i, piece) in spline.pieces().iter().enumerate() {
                    let origin = knots[i];
                    // Local variable t = x - origin; extend the end pieces to the nodes.
                    let t0 = if i == 0 { lo.min(knots[0]) - origin } else { 0.0 };
                    let t1 = if i == last { hi.max(knots[i + 1]) } else { knots[i + 1] } - origin;
                    let local = &Polynomial::new(piece.to_vec()) * &q2.compose_affine(1.0, origin);
                    total += local.integrate_definite(t0, t1);
                }
                total * self.factorial_scale
            }
        }
    }

    pub fn is_spline(&self) -> bool {
        matches!(self.correction, Correction::Spline { .. })
    }

    /// Magnitude used to normalise node residuals: the size of the terms that
    /// cancel when `E` is evaluated at `x`.
    fn error_term_scale(&self, x: f64) -> f64 {
        match &self.correction {
            Correction::Polynomial(e) => e
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c.abs() * x.abs().powi(k as i32))
                .sum(),
            Correction::Spline { .. } => 0.0,
        }
    }
}

/// `H(x) + E(x)`.
pub fn corrected_eval(ca: &CorrectedApproximant, x: f64) -> Result<f64, CorrectorError> {
    Ok(ca.hermite.eval(x) + ca.error_term(x)?)
}

/// Largest `|f(x_i) - (H + E)(x_i)|` over the given abscissae.
pub fn max_error_on_grid(
    ca: &CorrectedApproximant,
    f: &DifferentiableFunction,
    xs: &[f64],
) -> Result<f64, CorrectorError> {
    xs.iter().try_fold(0.0_f64, |acc, &x| {
        Ok(acc.max((f.value(x) - corrected_eval(ca, x)?).abs()))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeCheck {
    #[serde(serialize_with = "f64_17")]
    pub x: f64,
    #[serde(serialize_with = "f64_17")]
    pub value_residual: f64,
    #[serde(serialize_with = "f64_17")]
    pub slope_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeConsistencyReport {
    pub nodes: Vec<NodeCheck>,
    pub passed: bool,
}

/// Checks that `H + E` still interpolates `f` and `f'` at every node.
pub fn node_consistency_check(
    ca: &CorrectedApproximant,
    f: &DifferentiableFunction,
) -> NodeConsistencyReport {
    const TOL: f64 = 1e-9;
    let dh = ca.hermite.poly.derivative();
    let nodes: Vec<NodeCheck> = ca
        .hermite
        .nodes
        .as_slice()
        .iter()
        .map(|&x| {
            let fx = f.value(x);
            let dfx = f.deriv(1, x).unwrap_or(f64::NAN);
            let value = ca.hermite.eval(x) + ca.error_term(x).unwrap_or(f64::NAN);
            let slope = dh.eval(x) + ca.error_term_derivative(x).unwrap_or(f64::NAN);
            let value_residual = (value - fx).abs();
            let slope_residual = (slope - dfx).abs();
            let scale = ca.error_term_scale(x);
            let passed = value_residual <= TOL * (1.0 + fx.abs() + scale)
                && slope_residual <= TOL * (1.0 + dfx.abs() + scale);
            NodeCheck {
                x,
                value_residual,
                slope_residual,
                passed,
            }
        })
        .collect();
    let passed = nodes.iter().all(|n| n.passed);
    NodeConsistencyReport { nodes, passed }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationReport {
    #[serde(serialize_with = "f64_17")]
    pub exact: f64,
    #[serde(serialize_with = "f64_17")]
    pub hermite_integral: f64,
    #[serde(serialize_with = "f64_17")]
    pub corrected_integral: f64,
    #[serde(serialize_with = "f64_17")]
    pub hermite_error: f64,
    #[serde(serialize_with = "f64_17")]
    pub corrected_error: f64,
}

/// Integrals of `H` and `H + E` over `[x_0, x_n]` compared to a supplied
/// exact value.
pub fn integration_report(ca: &CorrectedApproximant, f_exact_integral: f64) -> IntegrationReport {
    let (lo, hi) = ca.domain();
    let hermite_integral = ca.hermite.poly.integrate_definite(lo, hi);
    let corrected_integral = hermite_integral + ca.error_term_integral();
    IntegrationReport {
        exact: f_exact_integral,
        hermite_integral,
        corrected_integral,
        hermite_error: (f_exact_integral - hermite_integral).abs(),
        corrected_error: (f_exact_integral - corrected_integral).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::build_hermite;
    use std::f64::consts::PI;

    fn worked_hermite() -> (DifferentiableFunction, HermiteInterpolant) {
        let f = DifferentiableFunction::exp_sin();
        let nodes = NodeSet::new(vec![0.0, 1.5 * PI]).unwrap();
        let h = build_hermite(&f, &nodes).unwrap();
        (f, h)
    }

    #[test]
    fn error_polynomial_degree_and_shape() {
        let nodes = NodeSet::new(vec![0.0, 1.5 * PI]).unwrap();
        let h_xi = Polynomial::new(vec![1.0; 10]);
        assert_eq!(error_polynomial(&h_xi, &nodes).degree(), 13);
        assert!(error_polynomial(&Polynomial::zero(), &nodes).is_zero());

        let e = error_polynomial(&Polynomial::constant(1.0), &nodes);
        let b = [0.0, 0.0, 9.0 * PI * PI / 4.0, -3.0 * PI, 1.0];
        for (got, want) in e.coeffs().iter().zip(b) {
            assert!((got - want / 24.0).abs() < 1e-14 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn uncorrected_reduces_to_hermite() {
        let (f, h) = worked_hermite();
        let ca = CorrectedApproximant::uncorrected(h.clone());
        let report = node_consistency_check(&ca, &f);
        assert!(report.passed);
        assert_eq!(corrected_eval(&ca, 1.3).unwrap(), h.eval(1.3));
    }

    #[test]
    fn corrected_keeps_node_values() {
        let (f, h) = worked_hermite();
        let ca = CorrectedApproximant::with_polynomial(h, &Polynomial::new(vec![-1.0, 2.0, -0.3, 0.01]));
        for &x in &[0.0, 1.5 * PI] {
            assert!((corrected_eval(&ca, x).unwrap() - f.value(x)).abs() < 1e-10 * (1.0 + f.value(x).abs()));
        }
        assert!(node_consistency_check(&ca, &f).passed);
    }

    #[test]
    fn mutated_error_polynomial_fails_check() {
        let (f, h) = worked_hermite();
        let ca = CorrectedApproximant::with_polynomial(h, &Polynomial::new(vec![-1.0, 2.0, -0.3]));
        let Correction::Polynomial(e) = &ca.correction else {
            unreachable!()
        };
        for k in 0..e.coeffs().len() {
            let mut coeffs = e.coeffs().to_vec();
            coeffs[k] += 1e-3;
            let mutated = CorrectedApproximant {
                correction: Correction::Polynomial(Polynomial::new(coeffs)),
                ..ca.clone()
            };
            let report = node_consistency_check(&mutated, &f);
            assert!(!report.passed, "mutation of coefficient {k} went unnoticed");
        }
    }

    #[test]
    fn spline_domain_is_node_interval() {
        let (_, h) = worked_hermite();
        let xs: Vec<f64> = (0..20).map(|i| 0.1 + i as f64 * 0.2).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::clamped(&xs, &ys, 1.0, 0.0).unwrap();
        let ca = CorrectedApproximant::with_spline(h, s);
        assert!(corrected_eval(&ca, 0.0).is_ok());
        assert!(corrected_eval(&ca, 1.5 * PI).is_ok());
        assert!(matches!(corrected_eval(&ca, -0.01), Err(CorrectorError::Domain { .. })));
        assert!(matches!(corrected_eval(&ca, 5.0), Err(CorrectorError::Domain { .. })));
    }

    #[test]
    fn spline_integral_matches_fine_quadrature() {
        let (_, h) = worked_hermite();
        let xs: Vec<f64> = (0..30).map(|i| 0.05 + i as f64 * 0.16).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (0.7 * x).cos() * 3.0).collect();
        let s = CubicSpline::clamped(&xs, &ys, 0.2, -0.5).unwrap();
        let ca = CorrectedApproximant::with_spline(h, s);
        // Composite Simpson on a fine grid.
        let (lo, hi) = ca.domain();
        let n = 200_000;
        let step = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * ca.error_term(lo + i as f64 * step).unwrap();
        }
        let simpson = acc * step / 3.0;
        let exact = ca.error_term_integral();
        assert!(((exact - simpson) / simpson).abs() < 1e-9, "{exact} vs {simpson}");
    }

    #[test]
    fn integration_of_hermite_alone() {
        let (f, h) = worked_hermite();
        let exact = f.definite_integral(0.0, 1.5 * PI).unwrap();
        let r = integration_report(&CorrectedApproximant::uncorrected(h), exact);
        assert_eq!(r.hermite_error, r.corrected_error);
        assert!((r.hermite_error - 0.7).abs() < 0.05);
    }
}
