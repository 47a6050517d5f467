//! Symbolic layer construction for hand-assembled networks.
//!
//! Gadget networks are specified as affine expressions over the units of the
//! previous layer; the builder converts them into dense [`ReluLayer`]s. Unit
//! indices inside an expression map directly to matrix columns, which keeps
//! control over the exact floating-point summation order of the dense
//! matvec. The product gadgets rely on this: cancelling terms are placed in
//! adjacent columns so that exact zeros propagate exactly.

use crate::error::Result;
use crate::net::{ReluLayer, ReluNetwork};

/// Affine expression over the units of one layer: `Σ coeff·unit + bias`.
#[derive(Debug, Clone)]
pub(crate) struct Expr {
    pub terms: Vec<(usize, f64)>,
    pub bias: f64,
}

impl Expr {
    pub fn unit(index: usize) -> Self {
        Expr {
            terms: vec![(index, 1.0)],
            bias: 0.0,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Expr {
            terms: self.terms.iter().map(|&(i, w)| (i, c * w)).collect(),
            bias: c * self.bias,
        }
    }

    pub fn plus(&self, other: &Expr) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Expr {
            terms,
            bias: self.bias + other.bias,
        }
    }

    pub fn minus(&self, other: &Expr) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    pub fn plus_const(&self, c: f64) -> Self {
        Expr {
            terms: self.terms.clone(),
            bias: self.bias + c,
        }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    /// 1-norm of the augmented row this expression becomes.
    #[cfg(test)]
    pub fn row_norm(&self) -> f64 {
        self.terms.iter().map(|(_, w)| w.abs()).sum::<f64>() + self.bias.abs()
    }
}

/// Accumulates hidden layers given as per-unit expressions.
pub(crate) struct NetBuilder {
    /// Width of the layer the current expressions refer to.
    prev_width: usize,
    layers: Vec<ReluLayer>,
}

impl NetBuilder {
    pub fn new(input_dim: usize) -> Self {
        NetBuilder {
            prev_width: input_dim,
            layers: Vec::new(),
        }
    }

    /// Number of hidden layers emitted so far.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    fn to_layer(&self, units: &[Expr]) -> ReluLayer {
        let rows = units.len();
        let cols = self.prev_width;
        let mut weights = vec![0.0; rows * cols];
        let mut bias = vec![0.0; rows];
        for (r, e) in units.iter().enumerate() {
            for &(c, w) in &e.terms {
                debug_assert!(c < cols, "expression references unit {c} of {cols}");
                weights[r * cols + c] += w;
            }
            bias[r] = e.bias;
        }
        ReluLayer::new(rows, cols, weights, bias).expect("builder produces valid layers")
    }

    /// Emit one hidden layer; each unit computes `σ(expr)`.
    pub fn push_layer(&mut self, units: Vec<Expr>) {
        let layer = self.to_layer(&units);
        self.prev_width = layer.rows();
        self.layers.push(layer);
    }

    /// Finish with an affine output layer given by `outputs`.
    pub fn finish(mut self, outputs: Vec<Expr>) -> Result<ReluNetwork> {
        let out = self.to_layer(&outputs);
        self.layers.push(out);
        ReluNetwork::new(self.layers)
    }
}
