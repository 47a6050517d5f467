//! Hat functions and the grid partition of unity.
//!
//! The hat `ψ(t) = σ(1 − σ(t) − σ(−t)) = max(0, 1 − |t|)` is supported on
//! `[−1, 1]`. For a grid resolution `N` and index `n ∈ {0..N}^d`, the bump
//! `ψ_n(x) = Π_i ψ(N·x_i − n_i)` is supported on the ∞-ball of radius `1/N`
//! around `n/N`, and the bumps sum to exactly 1 on `[0, 1]^d`.

use crate::error::{Error, Result};
use crate::net::{compose, parallel_pair, ReluLayer, ReluNetwork};

use super::product::product_network;
use super::GridIndex;

/// The hat function `ψ(t) = max(0, 1 − |t|)` as a width-2, depth-2 network.
pub fn hat_network() -> ReluNetwork {
    let l0 = ReluLayer::new(2, 1, vec![1.0, -1.0], vec![0.0, 0.0]).unwrap();
    let l1 = ReluLayer::new(1, 2, vec![-1.0, -1.0], vec![1.0]).unwrap();
    let l2 = ReluLayer::new(1, 1, vec![1.0], vec![0.0]).unwrap();
    ReluNetwork::new(vec![l0, l1, l2]).unwrap()
}

/// `ψ(N·t − n)` with the scaling merged into the first layer; stays in the
/// (2, 2, 6N) class.
pub fn scaled_hat_network(grid_n: usize, offset: usize) -> ReluNetwork {
    let (n, c) = (grid_n as f64, offset as f64);
    let l0 = ReluLayer::new(2, 1, vec![n, -n], vec![-c, c]).unwrap();
    let l1 = ReluLayer::new(1, 2, vec![-1.0, -1.0], vec![1.0]).unwrap();
    let l2 = ReluLayer::new(1, 1, vec![1.0], vec![0.0]).unwrap();
    ReluNetwork::new(vec![l0, l1, l2]).unwrap()
}

/// Closed-form `ψ(t)`.
pub fn hat_value(t: f64) -> f64 {
    (1.0 - t.abs()).max(0.0)
}

/// Closed-form `ψ_n(x) = Π_i ψ(N x_i − n_i)`.
pub fn partition_value(n: &GridIndex, x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), n.index.len());
    let grid = n.grid_n as f64;
    n.index
        .iter()
        .zip(x)
        .map(|(&ni, &xi)| hat_value(grid * xi - ni as f64))
        .product()
}

/// `Σ_{n ∈ {0..N}^d} ψ_n(x)`, by direct enumeration of all `(N+1)^d` cells.
/// Contract: the sum is identically 1 on `[0, 1]^d`.
pub fn partition_sum(x: &[f64], grid_n: usize) -> Result<f64> {
    let d = x.len();
    let cells = (grid_n + 1)
        .checked_pow(d as u32)
        .filter(|&c| c <= 1_000_000);
    if cells.is_none() {
        return Err(Error::Infeasible(format!(
            "partition sum over (N+1)^d = {}^{d} cells",
            grid_n + 1
        )));
    }
    let mut total = 0.0;
    let mut index = vec![0usize; d];
    loop {
        let n = GridIndex {
            index: index.clone(),
            grid_n,
        };
        total += partition_value(&n, x);
        // Odometer increment over {0..N}^d.
        let mut pos = 0;
        loop {
            if pos == d {
                return Ok(total);
            }
            index[pos] += 1;
            if index[pos] <= grid_n {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

/// The bump `ψ_n` as a network: the `d` scaled hats are stacked with
/// [`parallel_pair`] and fed through the product gadget at accuracy `k`.
/// For `d = 1` the scaled hat itself is returned (no product needed).
///
/// The support guarantee is exact: any coordinate with `ψ(N x_i − n_i) = 0`
/// annihilates the product network's output in floating point.
pub fn partition_network(n: &GridIndex, k: u32) -> Result<ReluNetwork> {
    let d = n.index.len();
    if d == 0 {
        return Err(Error::InvalidValue("grid index needs d >= 1".into()));
    }
    for &ni in &n.index {
        if ni > n.grid_n {
            return Err(Error::InvalidValue(format!(
                "grid index {ni} outside 0..={}",
                n.grid_n
            )));
        }
    }
    // Each coordinate's hat reads x_i through a projection front layer.
    let coordinate_hat = |i: usize| -> Result<ReluNetwork> {
        let mut proj = ReluLayer::zeros(1, d);
        proj.set_weight(0, i, 1.0);
        let front = ReluNetwork::new(vec![proj])?;
        compose(&scaled_hat_network(n.grid_n, n.index[i]), &front)
    };
    let mut hats = coordinate_hat(0)?;
    for i in 1..d {
        hats = parallel_pair(&hats, &coordinate_hat(i)?)?;
    }
    if d == 1 {
        return Ok(hats);
    }
    compose(&product_network(d, k)?, &hats)
}
