//! Constructive approximation of smooth vector-valued maps by explicit ReLU
//! networks.
//!
//! The pipeline mirrors the constructive existence proof it implements: hat
//! functions form a partition of unity over a grid of resolution `N`;
//! per-cell Taylor polynomials are realized through product gadgets; the
//! pieces are assembled into one network whose width, depth, and norm budget
//! satisfy closed-form caps in terms of the accuracy parameter `k` and
//! `N = ⌈2^{2k/τ}⌉`.

mod build;
mod builder;
mod partition;
mod product;
mod taylor;

pub use build::{
    build_approximant, build_chart_approximant, choose_grid_resolution, structural_caps,
    BuildOptions, Chart, StructuralCaps,
};
pub use partition::{
    hat_network, hat_value, partition_network, partition_sum, partition_value, scaled_hat_network,
};
pub use product::{product_network, sawtooth_square};
pub use taylor::{
    multi_factorial, multi_indices, taylor_coefficients, taylor_polynomial, TaylorTable,
};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value oracle: `x ∈ [0,1]^d → R^K`.
pub type ValueOracle = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// Partial-derivative oracle: `(multi-index s, x) → ∂^s κ(x) ∈ R^K`.
pub type DerivativeOracle = Arc<dyn Fn(&[usize], &[f64]) -> Vec<f64> + Send + Sync>;

/// A smooth map `[0,1]^d → R^K` with derivatives available up to order `r`
/// and Hölder metadata `τ = r + ν`, `ν ∈ (0,1]`, `‖·‖ ≤ B`.
///
/// Hölder continuity of the order-`r` derivatives is understood with respect
/// to the `‖·‖_∞` distance on `[0,1]^d`.
#[derive(Clone)]
pub struct TargetFunction {
    pub dim_in: usize,
    pub dim_out: usize,
    pub smoothness_r: usize,
    pub tau: f64,
    pub holder_bound: f64,
    value: ValueOracle,
    derivative: DerivativeOracle,
}

impl std::fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TargetFunction")
            .field("dim_in", &self.dim_in)
            .field("dim_out", &self.dim_out)
            .field("smoothness_r", &self.smoothness_r)
            .field("tau", &self.tau)
            .field("holder_bound", &self.holder_bound)
            .finish_non_exhaustive()
    }
}

impl TargetFunction {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        smoothness_r: usize,
        tau: f64,
        holder_bound: f64,
        value: ValueOracle,
        derivative: DerivativeOracle,
    ) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidValue(
                "target needs positive dimensions".into(),
            ));
        }
        let r = smoothness_r as f64;
        if !(tau > r && tau <= r + 1.0) {
            return Err(Error::InvalidValue(format!(
                "tau = {tau} must lie in (r, r+1] for r = {smoothness_r}"
            )));
        }
        if !holder_bound.is_finite() || holder_bound <= 0.0 {
            return Err(Error::InvalidValue("holder bound must be positive".into()));
        }
        let f = TargetFunction {
            dim_in,
            dim_out,
            smoothness_r,
            tau,
            holder_bound,
            value,
            derivative,
        };
        // The zero multi-index of the derivative oracle must reproduce the
        // value oracle.
        let probe = vec![0.5; dim_in];
        let v = f.value(&probe);
        let d0 = f.derivative(&vec![0; dim_in], &probe)?;
        if v.len() != dim_out || d0.len() != dim_out {
            return Err(Error::DimensionMismatch(
                "oracle output length != dim_out".into(),
            ));
        }
        if v.iter().zip(&d0).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(Error::InvalidValue(
                "derivative oracle at the zero index disagrees with the value oracle".into(),
            ));
        }
        Ok(f)
    }

    pub fn value(&self, x: &[f64]) -> Vec<f64> {
        (self.value)(x)
    }

    pub fn derivative(&self, s: &[usize], x: &[f64]) -> Result<Vec<f64>> {
        let order: usize = s.iter().sum();
        if order > self.smoothness_r {
            return Err(Error::InvalidValue(format!(
                "derivative order {order} exceeds smoothness r = {}",
                self.smoothness_r
            )));
        }
        let out = (self.derivative)(s, x);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(
                "derivative oracle returned non-finite".into(),
            ));
        }
        Ok(out)
    }

    /// Constant map `x ↦ (c, …, c)`.
    pub fn constant(dim_in: usize, dim_out: usize, c: f64) -> Result<Self> {
        TargetFunction::new(
            dim_in,
            dim_out,
            0,
            1.0,
            c.abs().max(1e-9),
            Arc::new(move |_x: &[f64]| vec![c; dim_out]),
            Arc::new(move |s: &[usize], _x: &[f64]| {
                if s.iter().all(|&v| v == 0) {
                    vec![c; dim_out]
                } else {
                    vec![0.0; dim_out]
                }
            }),
        )
    }

    /// Channel `i` returns the coordinate `x_{i mod d}`.
    pub fn coordinate(dim_in: usize, dim_out: usize) -> Result<Self> {
        TargetFunction::new(
            dim_in,
            dim_out,
            0,
            1.0,
            1.0,
            Arc::new(move |x: &[f64]| (0..dim_out).map(|i| x[i % dim_in]).collect()),
            Arc::new(move |s: &[usize], x: &[f64]| {
                if s.iter().all(|&v| v == 0) {
                    (0..dim_out).map(|i| x[i % dim_in]).collect()
                } else {
                    vec![0.0; dim_out]
                }
            }),
        )
    }

    /// Trigonometric target: channel `i` is
    /// `sin(2π·mean(x) + i·π/2) / (2π)^{r+1}`, which lies in the Hölder ball
    /// with `τ = r + 1` and `B = 1`.
    pub fn sin_product(dim_in: usize, dim_out: usize, r: usize) -> Result<Self> {
        let norm = (2.0 * std::f64::consts::PI).powi(r as i32 + 1);
        let freq = 2.0 * std::f64::consts::PI / dim_in as f64;
        let value = move |x: &[f64]| -> Vec<f64> {
            let u: f64 = x.iter().sum::<f64>() * freq;
            (0..dim_out)
                .map(|i| (u + i as f64 * std::f64::consts::FRAC_PI_2).sin() / norm)
                .collect()
        };
        TargetFunction::new(
            dim_in,
            dim_out,
            r,
            r as f64 + 1.0,
            1.0,
            Arc::new(value),
            Arc::new(move |s: &[usize], x: &[f64]| {
                let order: usize = s.iter().sum();
                let u: f64 = x.iter().sum::<f64>() * freq;
                let amp = freq.powi(order as i32) / norm;
                (0..dim_out)
                    .map(|i| {
                        let phase = (i as f64 + order as f64) * std::f64::consts::FRAC_PI_2;
                        amp * (u + phase).sin()
                    })
                    .collect()
            }),
        )
    }

    /// Gaussian bump centered per channel; derivatives supported to r ≤ 2.
    pub fn gaussian_bump(dim_in: usize, dim_out: usize, r: usize) -> Result<Self> {
        if r > 2 {
            return Err(Error::InvalidValue("gaussian bump supports r <= 2".into()));
        }
        let width: f64 = 0.35;
        let w2 = width * width;
        // Conservative sup bounds for derivatives of orders 0..=3 with this
        // width, used to keep the Hölder norm at most 1.
        let caps = [1.0_f64, 4.1, 25.0, 170.0];
        let scale = 1.0 / (caps[r + 1].max(caps[r]) * dim_in as f64);
        let center = move |i: usize| {
            if dim_out == 1 {
                0.5
            } else {
                0.35 + 0.3 * i as f64 / (dim_out - 1) as f64
            }
        };
        let bump = move |i: usize, x: &[f64]| -> f64 {
            let c = center(i);
            let q: f64 = x.iter().map(|&xi| (xi - c) * (xi - c)).sum();
            scale * (-q / (2.0 * w2)).exp()
        };
        TargetFunction::new(
            dim_in,
            dim_out,
            r,
            r as f64 + 1.0,
            1.0,
            Arc::new(move |x: &[f64]| (0..dim_out).map(|i| bump(i, x)).collect()),
            Arc::new(move |s: &[usize], x: &[f64]| {
                let order: usize = s.iter().sum();
                (0..dim_out)
                    .map(|i| {
                        let g = bump(i, x);
                        let c = center(i);
                        match order {
                            0 => g,
                            1 => {
                                let j = s.iter().position(|&v| v > 0).unwrap();
                                -(x[j] - c) / w2 * g
                            }
                            2 => {
                                let mut it = s.iter().enumerate().filter(|(_, &v)| v > 0);
                                let (j, &sj) = it.next().unwrap();
                                if sj == 2 {
                                    ((x[j] - c) * (x[j] - c) / (w2 * w2) - 1.0 / w2) * g
                                } else {
                                    let (l, _) = it.next().unwrap();
                                    (x[j] - c) * (x[l] - c) / (w2 * w2) * g
                                }
                            }
                            _ => 0.0,
                        }
                    })
                    .collect()
            }),
        )
    }

    /// Named built-in targets exposed by the command line.
    pub fn builtin(name: &str, dim_in: usize, dim_out: usize, r: usize) -> Result<Self> {
        match name {
            "constant" => TargetFunction::constant(dim_in, dim_out, 0.5),
            "coordinate" => TargetFunction::coordinate(dim_in, dim_out),
            "sin" | "sin-product" => TargetFunction::sin_product(dim_in, dim_out, r),
            "gaussian-bump" => TargetFunction::gaussian_bump(dim_in, dim_out, r),
            other => Err(Error::InvalidValue(format!("unknown target '{other}'"))),
        }
    }

    /// Override the Hölder exponent. Lowering τ within `(r, r+1]` is always
    /// sound on the unit cube (the Hölder seminorm does not grow when the
    /// exponent shrinks and distances are ≤ 1), and changes the grid
    /// resolution `N = ⌈2^{2k/τ}⌉` the builder picks.
    pub fn with_tau(mut self, tau: f64) -> Result<Self> {
        let r = self.smoothness_r as f64;
        if !(tau > r && tau <= r + 1.0) {
            return Err(Error::InvalidValue(format!(
                "tau = {tau} must lie in (r, r+1] for r = {}",
                self.smoothness_r
            )));
        }
        self.tau = tau;
        Ok(self)
    }
}

/// A cell index `n ∈ {0..N}^d` on the grid of resolution `N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridIndex {
    pub index: Vec<usize>,
    pub grid_n: usize,
}

impl GridIndex {
    pub fn new(index: Vec<usize>, grid_n: usize) -> Result<Self> {
        if index.is_empty() {
            return Err(Error::InvalidValue("grid index needs d >= 1".into()));
        }
        if index.iter().any(|&n| n > grid_n) {
            return Err(Error::InvalidValue("grid index outside 0..=N".into()));
        }
        Ok(GridIndex { index, grid_n })
    }

    /// Cell center `n / N`.
    pub fn center(&self) -> Vec<f64> {
        self.index
            .iter()
            .map(|&n| n as f64 / self.grid_n as f64)
            .collect()
    }
}

/// Measured errors and structural accounting of one constructed network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxReport {
    pub l2_error: f64,
    pub l2_std_error: f64,
    pub linf_error: f64,
    pub width: usize,
    pub depth: usize,
    pub budget: f64,
    pub k: u32,
    pub grid_n: usize,
    pub cells: usize,
    pub terms_per_cell: usize,
    /// Factor by which the target was scaled down to keep `B ≤ 1`.
    pub rescale: f64,
    pub seed: u64,
    pub mc_samples: usize,
    pub grid_points: usize,
}
