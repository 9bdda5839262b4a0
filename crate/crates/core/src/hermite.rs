//! Hermite interpolation on a set of distinct nodes and the two sides of its
//! pointwise error identity
//!
//! ```text
//! f(x) - H(x) = f^(2n+2)(xi(x)) / (2n+2)! * Q(x)^2,   Q(x) = prod (x - x_k)
//! ```

use serde::Serialize;
use thiserror::Error;

use crate::function::{DifferentiableFunction, FunctionError};
use crate::polynomial::Polynomial;

/// Largest `n` (node count minus one) accepted by the error model.
pub const MAX_MODEL_N: usize = 80;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HermiteError {
    #[error("at least two nodes are required, got {0}")]
    TooFewNodes(usize),
    #[error("node {index} is not finite")]
    NonFiniteNode { index: usize },
    #[error("nodes must be strictly increasing: x[{index}] = {left} is not below x[{}] = {right}", index + 1)]
    NotIncreasing { index: usize, left: f64, right: f64 },
    #[error("non-finite data from `{name}` at node x = {x}")]
    NonFiniteData { name: String, x: f64 },
    #[error("error model supports n <= {MAX_MODEL_N}, got n = {0}")]
    NTooLarge(usize),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// Strictly increasing interpolation nodes `x_0 < ... < x_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeSet(Vec<f64>);

impl NodeSet {
    pub fn new(nodes: impl Into<Vec<f64>>) -> Result<Self, HermiteError> {
        let nodes = nodes.into();
        if nodes.len() < 2 {
            return Err(HermiteError::TooFewNodes(nodes.len()));
        }
        if let Some(index) = nodes.iter().position(|x| !x.is_finite()) {
            return Err(HermiteError::NonFiniteNode { index });
        }
        for (index, w) in nodes.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(HermiteError::NotIncreasing {
                    index,
                    left: w[0],
                    right: w[1],
                });
            }
        }
        Ok(Self(nodes))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `n`, one less than the number of nodes.
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    /// Order of the derivative in the remainder term, `2n + 2`.
    pub fn remainder_order(&self) -> usize {
        2 * self.n() + 2
    }

    pub fn contains_open(&self, x: f64) -> bool {
        x > self.first() && x < self.last()
    }

    /// Smallest gap between consecutive nodes.
    pub fn min_spacing(&self) -> f64 {
        self.0
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// The interpolant `H_{2n+1}` together with the data it matches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermiteInterpolant {
    pub poly: Polynomial,
    pub nodes: NodeSet,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

/// Residuals of the interpolation conditions at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeResidual {
    pub x: f64,
    pub value_residual: f64,
    pub slope_residual: f64,
}

impl HermiteInterpolant {
    pub fn eval(&self, x: f64) -> f64 {
        self.poly.eval(x)
    }

    /// `|H(x_k) - f(x_k)|` and `|H'(x_k) - f'(x_k)|` at every node.
    pub fn node_residuals(&self) -> Vec<NodeResidual> {
        let dp = self.poly.derivative();
        self.nodes
            .as_slice()
            .iter()
            .zip(self.values.iter().zip(&self.slopes))
            .map(|(&x, (&v, &s))| NodeResidual {
                x,
                value_residual: (self.poly.eval(x) - v).abs(),
                slope_residual: (dp.eval(x) - s).abs(),
            })
            .collect()
    }

    /// Whether both interpolation conditions hold at the default tolerances
    /// (`1e-10` on values, `1e-9` on slopes, each scaled by `1 + |data|`).
    pub fn satisfies_interpolation(&self) -> bool {
        self.node_residuals()
            .iter()
            .zip(self.values.iter().zip(&self.slopes))
            .all(|(r, (&v, &s))| {
                r.value_residual <= 1e-10 * (1.0 + v.abs())
                    && r.slope_residual <= 1e-9 * (1.0 + s.abs())
            })
    }
}

/// Builds the Hermite interpolant from confluent divided differences.
///
/// Each node is repeated twice; where a repeated pair meets in the first
/// column of the table the divided difference is replaced by `f'(x_k)`. The
/// Newton form is then expanded into monomial coefficients.
pub fn build_hermite(
    f: &DifferentiableFunction,
    nodes: &NodeSet,
) -> Result<HermiteInterpolant, HermiteError> {
    f.require_order(1)?;
    let xs = nodes.as_slice();
    let mut values = Vec::with_capacity(xs.len());
    let mut slopes = Vec::with_capacity(xs.len());
    for &x in xs {
        let v = f.deriv(0, x)?;
        let s = f.deriv(1, x)?;
        if !v.is_finite() || !s.is_finite() {
            return Err(HermiteError::NonFiniteData {
                name: f.name().to_string(),
                x,
            });
        }
        values.push(v);
        slopes.push(s);
    }

    let z: Vec<f64> = xs.iter().flat_map(|&x| [x, x]).collect();
    let m = z.len();
    // column holds the current level of the table; newton[j] is its top entry.
    let mut column: Vec<f64> = values.iter().flat_map(|&v| [v, v]).collect();
    let mut newton = Vec::with_capacity(m);
    newton.push(column[0]);
    for level in 1..m {
        let mut next = Vec::with_capacity(m - level);
        for i in 0..m - level {
            let denom = z[i + level] - z[i];
            let entry = if level == 1 && denom == 0.0 {
                slopes[i / 2]
            } else {
                (column[i + 1] - column[i]) / denom
            };
            next.push(entry);
        }
        newton.push(next[0]);
        column = next;
    }

    // Nested expansion: c_0 + (x - z_0)(c_1 + (x - z_1)(c_2 + ...)).
    let mut poly = Polynomial::constant(newton[m - 1]);
    for j in (0..m - 1).rev() {
        poly = &(&poly * &Polynomial::linear_factor(z[j])) + &Polynomial::constant(newton[j]);
    }

    Ok(HermiteInterpolant {
        poly,
        nodes: nodes.clone(),
        values,
        slopes,
    })
}

/// The monic node polynomial `Q(x) = prod_k (x - x_k)`.
pub fn q_poly(nodes: &NodeSet) -> Polynomial {
    Polynomial::from_roots(nodes.as_slice())
}

/// `(2n+2)!` as a floating-point product.
pub fn remainder_factorial(n: usize) -> f64 {
    (1..=2 * n + 2).map(|k| k as f64).product()
}

/// Left-hand side of the error identity: `f(x) - H(x)`.
pub fn delta_true(f: &DifferentiableFunction, h: &HermiteInterpolant, x: f64) -> f64 {
    f.value(x) - h.poly.eval(x)
}

/// Right-hand side of the error identity for a given `xi`:
/// `f^(2n+2)(xi) / (2n+2)! * Q(x)^2`.
pub fn delta_model(
    f: &DifferentiableFunction,
    nodes: &NodeSet,
    xi: f64,
    x: f64,
) -> Result<f64, HermiteError> {
    let n = nodes.n();
    if n > MAX_MODEL_N {
        return Err(HermiteError::NTooLarge(n));
    }
    let q: f64 = nodes.as_slice().iter().map(|&xk| x - xk).product();
    let d = f.deriv(nodes.remainder_order(), xi)?;
    Ok(d / remainder_factorial(n) * q * q)
}
