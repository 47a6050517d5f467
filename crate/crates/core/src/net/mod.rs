//! Explicit ReLU networks with exact width/depth/size/norm accounting.
//!
//! A network is an ordered list of affine layers. Every layer but the last
//! is followed by the ReLU activation; the last layer is affine only. A
//! network with `D` hidden layers therefore stores `D + 1` layers.
//!
//! The norm budget of a network is
//!
//! ```text
//! M = ‖(W_D, b_D)‖ · ∏_{i<D} max{‖(W_i, b_i)‖, 1}
//! ```
//!
//! where `‖(W, b)‖` is the largest 1-norm over output units of the augmented
//! row `[w_i b_i]`, i.e. `max_i (Σ_j |W_ij| + |b_i|)`. This is the reading
//! under which the hat function lands exactly in class (2, 2, 3) and its
//! `N`-scaled version in (2, 2, 6N).

mod combine;

pub use combine::{compose, identity_network, pad_to_depth, parallel_pair, parallel_sum};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One affine layer: `z = W x + b` with `W` stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LayerJson", into = "LayerJson")]
pub struct ReluLayer {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize, Clone)]
struct LayerJson {
    weights: Vec<f64>,
    rows: usize,
    cols: usize,
    bias: Vec<f64>,
}

impl From<ReluLayer> for LayerJson {
    fn from(l: ReluLayer) -> Self {
        LayerJson {
            weights: l.weights,
            rows: l.rows,
            cols: l.cols,
            bias: l.bias,
        }
    }
}

impl TryFrom<LayerJson> for ReluLayer {
    type Error = Error;
    fn try_from(j: LayerJson) -> Result<Self> {
        ReluLayer::new(j.rows, j.cols, j.weights, j.bias)
    }
}

impl ReluLayer {
    /// Build a layer, validating shapes and finiteness.
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidValue(
                "layer dimensions must be positive".into(),
            ));
        }
        if weights.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "weight length {} != rows*cols {}",
                weights.len(),
                rows * cols
            )));
        }
        if bias.len() != rows {
            return Err(Error::DimensionMismatch(format!(
                "bias length {} != rows {}",
                bias.len(),
                rows
            )));
        }
        if weights.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("layer entries must be finite".into()));
        }
        Ok(ReluLayer {
            rows,
            cols,
            weights,
            bias,
        })
    }

    /// All-zero layer of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ReluLayer {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            bias: vec![0.0; rows],
        }
    }

    /// Identity weight matrix, zero bias.
    pub fn identity(dim: usize) -> Self {
        let mut l = Self::zeros(dim, dim);
        for i in 0..dim {
            l.weights[i * dim + i] = 1.0;
        }
        l
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.cols + j]
    }

    pub fn set_weight(&mut self, i: usize, j: usize, v: f64) {
        self.weights[i * self.cols + j] = v;
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    /// `W x + b`, plain in-order summation per row.
    pub fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        debug_assert_eq!(x.len(), self.cols);
        out.clear();
        for i in 0..self.rows {
            let row = &self.weights[i * self.cols..(i + 1) * self.cols];
            let mut acc = 0.0;
            for (w, xi) in row.iter().zip(x.iter()) {
                acc += w * xi;
            }
            out.push(acc + self.bias[i]);
        }
    }

    /// Largest augmented row 1-norm `max_i (Σ_j |W_ij| + |b_i|)`.
    pub fn norm(&self) -> f64 {
        let mut best = 0.0_f64;
        for i in 0..self.rows {
            let row = &self.weights[i * self.cols..(i + 1) * self.cols];
            let s: f64 = row.iter().map(|w| w.abs()).sum::<f64>() + self.bias[i].abs();
            best = best.max(s);
        }
        best
    }

    /// Scale all entries (weights and bias) by `c`.
    pub fn scale(&mut self, c: f64) {
        for w in &mut self.weights {
            *w *= c;
        }
        for b in &mut self.bias {
            *b *= c;
        }
    }

    /// Scale only the weights by `c`, leaving the bias fixed.
    pub fn scale_weights(&mut self, c: f64) {
        for w in &mut self.weights {
            *w *= c;
        }
    }
}

/// Layered affine + ReLU map. Hidden layers apply ReLU, the output layer is
/// affine only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkJson", into = "NetworkJson")]
pub struct ReluNetwork {
    layers: Vec<ReluLayer>,
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    input_dim: usize,
    output_dim: usize,
    layers: Vec<LayerJson>,
}

impl From<ReluNetwork> for NetworkJson {
    fn from(n: ReluNetwork) -> Self {
        NetworkJson {
            input_dim: n.input_dim(),
            output_dim: n.output_dim(),
            layers: n.layers.into_iter().map(LayerJson::from).collect(),
        }
    }
}

impl TryFrom<NetworkJson> for ReluNetwork {
    type Error = Error;
    fn try_from(j: NetworkJson) -> Result<Self> {
        let layers = j
            .layers
            .into_iter()
            .map(ReluLayer::try_from)
            .collect::<Result<Vec<_>>>()?;
        let net = ReluNetwork::new(layers)?;
        if net.input_dim() != j.input_dim || net.output_dim() != j.output_dim {
            return Err(Error::DimensionMismatch(
                "declared input/output dims disagree with layers".into(),
            ));
        }
        Ok(net)
    }
}

impl ReluNetwork {
    /// Build a network from layers, validating the dimension chain.
    pub fn new(layers: Vec<ReluLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidValue(
                "network needs at least one layer".into(),
            ));
        }
        for w in layers.windows(2) {
            if w[0].rows != w[1].cols {
                return Err(Error::DimensionMismatch(format!(
                    "layer output width {} feeds layer input width {}",
                    w[0].rows, w[1].cols
                )));
            }
        }
        Ok(ReluNetwork { layers })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].cols
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].rows
    }

    /// Number of hidden layers `D`.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// Maximum hidden width `W` (0 for a bare affine map).
    pub fn width(&self) -> usize {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(|l| l.rows)
            .max()
            .unwrap_or(0)
    }

    /// Size `Q = Σ p_{i+1} (p_i + 1)`, the parameter count.
    pub fn size(&self) -> usize {
        self.layers.iter().map(|l| l.rows * (l.cols + 1)).sum()
    }

    /// Neuron count `U = Σ hidden p_i`.
    pub fn neuron_count(&self) -> usize {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(|l| l.rows)
            .sum()
    }

    pub fn layers(&self) -> &[ReluLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [ReluLayer] {
        &mut self.layers
    }

    pub fn into_layers(self) -> Vec<ReluLayer> {
        self.layers
    }

    /// Forward pass: ReLU after every layer except the last.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "input length {} != input_dim {}",
                x.len(),
                self.input_dim()
            )));
        }
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply(&cur, &mut next);
            if i < last {
                for v in &mut next {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Exact norm budget of the stored parameters.
    pub fn norm_budget(&self) -> NormBudget {
        let last = self.layers.len() - 1;
        let mut m = self.layers[last].norm();
        for layer in &self.layers[..last] {
            m *= layer.norm().max(1.0);
        }
        NormBudget::new(m)
    }
}

/// The value `M` of the layerwise norm-product constraint.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NormBudget(f64);

impl NormBudget {
    pub fn new(value: f64) -> Self {
        debug_assert!(value.is_finite() && value >= 0.0);
        NormBudget(value)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Numerically stabilized softmax onto the probability simplex.
pub fn softmax(v: &[f64]) -> Vec<f64> {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|x| (x - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}
