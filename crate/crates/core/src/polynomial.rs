//! Dense univariate polynomials with real coefficients.
//!
//! Coefficients are stored in ascending order of power, so `coeffs[k]`
//! multiplies `x^k`. Trailing zeros are trimmed exactly (no epsilon), which
//! keeps the reported degree stable under arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients. An empty slice is
    /// treated as the zero polynomial.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monic linear factor `x - root`.
    pub fn linear_factor(root: f64) -> Self {
        Self::new(vec![-root, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect::<Vec<_>>();
        Self::new(coeffs)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k + 1) as f64),
        );
        Self::new(coeffs)
    }

    /// Exact definite integral over `[a, b]`.
    pub fn integrate_definite(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect::<Vec<_>>())
    }

    /// Substitutes `x -> alpha * x + beta`, returning `p(alpha * x + beta)`
    /// as a polynomial in `x`.
    pub fn compose_affine(&self, alpha: f64, beta: f64) -> Self {
        let inner = Self::new(vec![beta, alpha]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| &(&acc * &inner) + &Self::constant(c))
    }

    /// Product of linear factors `(x - r)` over all roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(1.0), |acc, &r| &acc * &Self::linear_factor(r))
    }
}

impl Default for Polynomial {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 && !(k == 0 && first) {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}x")?,
                _ => write!(f, "{mag}x^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(0.0) + rhs.coeffs.get(k).copied().unwrap_or(0.0)
            })
            .collect::<Vec<_>>();
        Polynomial::new(coeffs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    /// Cauchy product.
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut coeffs = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;

            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn b_poly() -> Polynomial {
        Polynomial::new(vec![0.0, 0.0, 9.0 * PI * PI / 4.0, -3.0 * PI, 1.0])
    }

    #[test]
    fn eval_examples() {
        assert!(b_poly().eval(1.5 * PI).abs() < 1e-12);
        assert_eq!(Polynomial::new(vec![5.0]).eval(123.4), 5.0);
        assert_eq!(Polynomial::new(vec![1.0, 2.0, 3.0]).eval(2.0), 17.0);
    }

    #[test]
    fn derivative_of_b_is_a() {
        let a = b_poly().derivative();
        let expected = [0.0, 9.0 * PI * PI / 2.0, -9.0 * PI, 4.0];
        assert_eq!(a.degree(), 3);
        for (got, want) in a.coeffs().iter().zip(expected) {
            assert!((got - want).abs() <= 1e-14 * want.abs().max(1.0));
        }
        assert_eq!(Polynomial::constant(3.5).derivative(), Polynomial::new(vec![0.0]));
        assert_eq!(Polynomial::new(vec![0.0, 0.0, 1.0]).derivative().coeffs(), &[0.0, 2.0]);
    }

    #[test]
    fn integrate_definite_examples() {
        assert_eq!(Polynomial::new(vec![0.0, 1.0]).integrate_definite(0.0, 2.0), 2.0);
        assert_eq!(Polynomial::constant(1.0).integrate_definite(-1.0, 1.0), 2.0);
    }

    #[test]
    fn integrate_b_against_trapezoid() {
        let p = b_poly();
        let (a, b) = (0.0, 1.5 * PI);
        let n = 1_000_000;
        let h = (b - a) / n as f64;
        let mut sum = 0.5 * (p.eval(a) + p.eval(b));
        for i in 1..n {
            sum += p.eval(a + i as f64 * h);
        }
        let trap = sum * h;
        let exact = p.integrate_definite(a, b);
        assert!(((exact - trap) / exact).abs() < 1e-10, "{exact} vs {trap}");
    }

    #[test]
    fn mul_and_add_examples() {
        let x = Polynomial::new(vec![0.0, 1.0]);
        assert_eq!((&x * &x).coeffs(), &[0.0, 0.0, 1.0]);
        let p = Polynomial::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(&p + &Polynomial::zero(), p);

        let q1 = Polynomial::from_roots(&[0.0, 1.5 * PI]);
        let sq = &q1 * &q1;
        for (got, want) in sq.coeffs().iter().zip(b_poly().coeffs()) {
            assert!((got - want).abs() <= 1e-14 * want.abs().max(1.0));
        }
    }

    #[test]
    fn trimming_and_zero() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::new(Vec::<f64>::new()).is_zero());
        let tiny = Polynomial::new(vec![1.0, 1e-300]);
        assert_eq!(tiny.degree(), 1);
    }

    #[test]
    fn compose_affine_matches_direct_eval() {
        let p = Polynomial::new(vec![0.3, -1.0, 2.0, 0.5]);
        let q = p.compose_affine(0.7, -0.2);
        for &x in &[-1.0, 0.0, 0.4, 2.5] {
            assert!((q.eval(x) - p.eval(0.7 * x - 0.2)).abs() < 1e-13);
        }
    }

    #[test]
    fn display() {
        let p = Polynomial::new(vec![0.0, -1.0, 0.0, 1.0]);
        assert_eq!(p.to_string(), "1x^3 - 1x");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }
}
