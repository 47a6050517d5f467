//! Network combinators: composition, parallel sum, parallel stacking.
//!
//! Combined networks must respect the class-arithmetic caps
//!
//! * `g2 ∘ g1`: width ≤ max(W1, W2), depth = D1 + D2, budget ≤ M2·max(M1, 1)
//! * `g1 + g2`: width = W1 + W2, depth = max(D1, D2), budget ≤ M1 + M2
//! * `(g1, g2)`: width = W1 + W2, depth = max(D1, D2), budget ≤ max(M1, M2)
//!
//! The caps are only achievable for a well-chosen representative of each
//! function, so the combinators first rebalance their inputs: every hidden
//! layer is rescaled to unit norm and the scale pushed downstream. ReLU is
//! positively homogeneous, so this preserves the computed function (up to
//! floating-point rounding of the rescaled entries).

use crate::error::{Error, Result};

use super::{ReluLayer, ReluNetwork};

/// Rescale every hidden layer to unit norm, pushing the scale into the next
/// layer's weights. Function-preserving; never increases the norm budget.
pub(crate) fn normalize_hidden(net: &ReluNetwork) -> ReluNetwork {
    let mut layers = net.layers().to_vec();
    let last = layers.len() - 1;
    for i in 0..last {
        let m = layers[i].norm();
        if m > 0.0 && m != 1.0 {
            layers[i].scale(1.0 / m);
            layers[i + 1].scale_weights(m);
        }
    }
    ReluNetwork::new(layers).expect("normalization preserves shapes")
}

/// The ReLU splice `x = σ(x) − σ(−x)` as a one-hidden-layer network.
///
/// Unlike the trivial `σ(x)` pass-through this computes the identity on all
/// of `R^dim`, at the cost of doubling the channel count.
pub fn identity_network(dim: usize) -> ReluNetwork {
    let mut first = ReluLayer::zeros(2 * dim, dim);
    let mut out = ReluLayer::zeros(dim, 2 * dim);
    for i in 0..dim {
        first.set_weight(i, i, 1.0);
        first.set_weight(dim + i, i, -1.0);
        out.set_weight(i, i, 1.0);
        out.set_weight(i, dim + i, -1.0);
    }
    ReluNetwork::new(vec![first, out]).expect("splice shapes are consistent")
}

/// Pad a network with leading pass-through layers until it has exactly
/// `depth` hidden layers.
///
/// Padding layers are plain `σ` identities on the inputs, so the padded
/// network agrees with the original on nonnegative inputs — in particular on
/// the domain `[0,1]^d` every network in this crate is evaluated on. The
/// pass-through layers have unit norm and do not change the norm budget.
pub fn pad_to_depth(net: &ReluNetwork, depth: usize) -> Result<ReluNetwork> {
    let have = net.depth();
    if have > depth {
        return Err(Error::InvalidValue(format!(
            "cannot pad depth {have} down to {depth}"
        )));
    }
    if have == depth {
        return Ok(net.clone());
    }
    let d = net.input_dim();
    let mut layers = Vec::with_capacity(depth + 1);
    for _ in 0..depth - have {
        layers.push(ReluLayer::identity(d));
    }
    layers.extend_from_slice(net.layers());
    ReluNetwork::new(layers)
}

/// `outer ∘ inner`: evaluates `outer(inner(x))`; the adjoining affine maps
/// are merged, so the depth is exactly `D1 + D2`.
pub fn compose(outer: &ReluNetwork, inner: &ReluNetwork) -> Result<ReluNetwork> {
    if inner.output_dim() != outer.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "inner output {} != outer input {}",
            inner.output_dim(),
            outer.input_dim()
        )));
    }
    let inner = normalize_hidden(inner);
    let in_layers = inner.layers();
    let out_layers = outer.layers();
    let f = &in_layers[in_layers.len() - 1]; // inner's output affine
    let g = &out_layers[0]; // outer's first affine

    // Merge g ∘ f: W = Wg Wf, b = Wg bf + bg.
    let mut merged = ReluLayer::zeros(g.rows(), f.cols());
    for i in 0..g.rows() {
        for j in 0..f.cols() {
            let mut acc = 0.0;
            for k in 0..f.rows() {
                acc += g.weight(i, k) * f.weight(k, j);
            }
            merged.set_weight(i, j, acc);
        }
        let mut b = g.bias()[i];
        for k in 0..f.rows() {
            b += g.weight(i, k) * f.bias()[k];
        }
        merged.bias_mut()[i] = b;
    }

    let mut layers = in_layers[..in_layers.len() - 1].to_vec();
    layers.push(merged);
    layers.extend_from_slice(&out_layers[1..]);
    ReluNetwork::new(layers)
}

fn stack(a: &ReluNetwork, b: &ReluNetwork, sum_outputs: bool) -> Result<ReluNetwork> {
    let a = normalize_hidden(a);
    let b = normalize_hidden(b);
    let depth = a.depth().max(b.depth());
    let a = pad_to_depth(&a, depth)?;
    let b = pad_to_depth(&b, depth)?;
    let (la, lb) = (a.layers(), b.layers());

    let mut layers = Vec::with_capacity(depth + 1);
    for i in 0..depth {
        let (pa, pb) = (&la[i], &lb[i]);
        let shared_input = i == 0;
        let cols = if shared_input {
            pa.cols()
        } else {
            pa.cols() + pb.cols()
        };
        let mut l = ReluLayer::zeros(pa.rows() + pb.rows(), cols);
        for r in 0..pa.rows() {
            for c in 0..pa.cols() {
                l.set_weight(r, c, pa.weight(r, c));
            }
            l.bias_mut()[r] = pa.bias()[r];
        }
        let (roff, coff) = (pa.rows(), if shared_input { 0 } else { pa.cols() });
        for r in 0..pb.rows() {
            for c in 0..pb.cols() {
                l.set_weight(roff + r, coff + c, pb.weight(r, c));
            }
            l.bias_mut()[roff + r] = pb.bias()[r];
        }
        layers.push(l);
    }

    let (fa, fb) = (&la[depth], &lb[depth]);
    let shared_input = depth == 0;
    let cols = if shared_input {
        fa.cols()
    } else {
        fa.cols() + fb.cols()
    };
    let coff = if shared_input { 0 } else { fa.cols() };
    let out = if sum_outputs {
        let mut l = ReluLayer::zeros(fa.rows(), cols);
        for r in 0..fa.rows() {
            for c in 0..fa.cols() {
                l.set_weight(r, c, fa.weight(r, c));
            }
            for c in 0..fb.cols() {
                let v = l.weight(r, coff + c) + fb.weight(r, c);
                l.set_weight(r, coff + c, v);
            }
            l.bias_mut()[r] = fa.bias()[r] + fb.bias()[r];
        }
        l
    } else {
        let mut l = ReluLayer::zeros(fa.rows() + fb.rows(), cols);
        for r in 0..fa.rows() {
            for c in 0..fa.cols() {
                l.set_weight(r, c, fa.weight(r, c));
            }
            l.bias_mut()[r] = fa.bias()[r];
        }
        for r in 0..fb.rows() {
            for c in 0..fb.cols() {
                l.set_weight(fa.rows() + r, coff + c, fb.weight(r, c));
            }
            l.bias_mut()[fa.rows() + r] = fb.bias()[r];
        }
        l
    };
    layers.push(out);
    ReluNetwork::new(layers)
}

/// Pointwise sum `a(x) + b(x)` of two networks with matching dimensions.
pub fn parallel_sum(a: &ReluNetwork, b: &ReluNetwork) -> Result<ReluNetwork> {
    if a.input_dim() != b.input_dim() || a.output_dim() != b.output_dim() {
        return Err(Error::DimensionMismatch(format!(
            "sum needs matching dims, got {}→{} and {}→{}",
            a.input_dim(),
            a.output_dim(),
            b.input_dim(),
            b.output_dim()
        )));
    }
    stack(a, b, true)
}

/// Stacked output `(a(x), b(x))` of two networks on the same input.
pub fn parallel_pair(a: &ReluNetwork, b: &ReluNetwork) -> Result<ReluNetwork> {
    if a.input_dim() != b.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "pair needs matching input dims, got {} and {}",
            a.input_dim(),
            b.input_dim()
        )));
    }
    stack(a, b, false)
}
