//! Target functions with closed-form derivative stacks.
//!
//! Derivatives are always supplied by the caller. Nothing here differentiates
//! numerically or symbolically.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::polynomial::Polynomial;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionError {
    #[error("derivative order {requested} requested from `{name}`, which only provides up to order {max_order}")]
    OrderOutOfRange {
        name: String,
        requested: usize,
        max_order: usize,
    },
    #[error("a derivative stack needs at least one callback")]
    EmptyStack,
}

type DerivFn = dyn Fn(usize, f64) -> f64 + Send + Sync;

/// A real function `f` together with `f', f'', ..., f^(max_order)`.
#[derive(Clone)]
pub struct DifferentiableFunction {
    name: String,
    max_order: usize,
    derivs: Arc<DerivFn>,
    antiderivative: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl fmt::Debug for DifferentiableFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DifferentiableFunction")
            .field("name", &self.name)
            .field("max_order", &self.max_order)
            .finish_non_exhaustive()
    }
}

impl DifferentiableFunction {
    /// Wraps a closure `(k, x) -> f^(k)(x)` valid for `k <= max_order`.
    pub fn new<F>(name: impl Into<String>, max_order: usize, derivs: F) -> Self
    where
        F: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            max_order,
            derivs: Arc::new(derivs),
            antiderivative: None,
        }
    }

    /// Attaches a closed-form antiderivative, used for exact integrals.
    pub fn with_antiderivative<F>(mut self, anti: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.antiderivative = Some(Arc::new(anti));
        self
    }

    /// `integral of f over [a, b]` when an antiderivative is known.
    pub fn definite_integral(&self, a: f64, b: f64) -> Option<f64> {
        self.antiderivative.as_ref().map(|anti| anti(b) - anti(a))
    }

    /// Builds a function from `[f, f', f'', ...]`; `max_order` is one less
    /// than the number of callbacks.
    pub fn from_callbacks(
        name: impl Into<String>,
        callbacks: Vec<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
    ) -> Result<Self, FunctionError> {
        if callbacks.is_empty() {
            return Err(FunctionError::EmptyStack);
        }
        let max_order = callbacks.len() - 1;
        Ok(Self::new(name, max_order, move |k, x| callbacks[k](x)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn require_order(&self, order: usize) -> Result<(), FunctionError> {
        if order > self.max_order {
            Err(FunctionError::OrderOutOfRange {
                name: self.name.clone(),
                requested: order,
                max_order: self.max_order,
            })
        } else {
            Ok(())
        }
    }

    pub fn deriv(&self, k: usize, x: f64) -> Result<f64, FunctionError> {
        self.require_order(k)?;
        Ok((self.derivs)(k, x))
    }

    /// `f(x)`; order zero is always present.
    pub fn value(&self, x: f64) -> f64 {
        (self.derivs)(0, x)
    }

    /// Unchecked access for hot loops whose order was validated up front.
    pub(crate) fn deriv_unchecked(&self, k: usize, x: f64) -> f64 {
        debug_assert!(k <= self.max_order);
        (self.derivs)(k, x)
    }

    /// `f(x) = e^x sin x`.
    ///
    /// Every derivative has the form `e^x (p_k sin x + q_k cos x)` with small
    /// integer `p_k, q_k`, so the stack is exact up to rounding in `exp`,
    /// `sin` and `cos`.
    pub fn exp_sin() -> Self {
        const MAX_ORDER: usize = 40;
        let mut table = Vec::with_capacity(MAX_ORDER + 1);
        let (mut p, mut q) = (1.0_f64, 0.0_f64);
        for _ in 0..=MAX_ORDER {
            table.push((p, q));
            (p, q) = (p - q, p + q);
        }
        Self::new("exp-sin", MAX_ORDER, move |k, x| {
            let (p, q) = table[k];
            let (s, c) = x.sin_cos();
            x.exp() * (p * s + q * c)
        })
        .with_antiderivative(|x| 0.5 * x.exp() * (x.sin() - x.cos()))
    }

    pub fn exp() -> Self {
        Self::new("exp", 64, |_, x| x.exp()).with_antiderivative(f64::exp)
    }

    pub fn cos() -> Self {
        Self::new("cos", 64, |k, x| match k % 4 {
            0 => x.cos(),
            1 => -x.sin(),
            2 => -x.cos(),
            _ => x.sin(),
        })
        .with_antiderivative(f64::sin)
    }

    /// A polynomial target; derivatives beyond its degree are identically zero.
    pub fn polynomial(name: impl Into<String>, p: &Polynomial, max_order: usize) -> Self {
        let mut stack = Vec::with_capacity(max_order + 1);
        let mut current = p.clone();
        for _ in 0..=max_order {
            let next = current.derivative();
            stack.push(current);
            current = next;
        }
        let anti = p.antiderivative();
        Self::new(name, max_order, move |k, x| stack[k].eval(x))
            .with_antiderivative(move |x| anti.eval(x))
    }

    /// Looks up a built-in by its command-line name.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "exp-sin" => Some(Self::exp_sin()),
            "exp" => Some(Self::exp()),
            "cos" => Some(Self::cos()),
            "cubic" => Some(Self::polynomial(
                "cubic",
                &Polynomial::new(vec![0.0, 0.0, 0.0, 1.0]),
                16,
            )),
            "quartic" => Some(Self::polynomial(
                "quartic",
                &Polynomial::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]),
                16,
            )),
            _ => None,
        }
    }

    pub const BUILTIN_NAMES: [&'static str; 5] = ["exp-sin", "exp", "cos", "cubic", "quartic"];
}
