//! Assembly of the full approximation network and its error measurement.
//!
//! For a target in the Hölder ball with parameters `(τ, r, B ≤ 1)` and an
//! accuracy parameter `k ≥ 1`, the grid resolution is `N = ⌈2^{2k/τ}⌉` and
//! the network realizes
//!
//! ```text
//! φ_i(x) = Σ_{n ∈ {0..N}^d} Σ_{‖s‖₁ ≤ r} c_{n,s}^{(i)} · ψ_n(x)(x − n/N)^s
//! ```
//!
//! with each polynomial term approximated by a product gadget over the `d`
//! hat factors and the `‖s‖₁` linear factors. The assembled network has
//! depth exactly `(k+1)(d+r)+2`; its width and norm budget stay under the
//! closed-form caps reported by [`structural_caps`].

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{compose, parallel_sum, ReluLayer, ReluNetwork};
use crate::rng::{derive_seed, rng_from};

use super::builder::{Expr, NetBuilder};
use super::product::emit_tree_level;
use super::taylor::{multi_indices, taylor_coefficients};
use super::{ApproxReport, GridIndex, TargetFunction};

/// Knobs for assembly and error measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Monte-Carlo sample count for the L² estimate.
    pub mc_samples: usize,
    /// Dense-grid resolution: points per cell and dimension for the L∞ sweep.
    pub grid_per_cell: usize,
    /// Cap on the total number of dense-grid points.
    pub max_grid_points: usize,
    /// Feasibility guard on `(N+1)^d`.
    pub max_cells: usize,
    /// Guard on the materialized network width.
    pub max_width: usize,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            mc_samples: 100_000,
            grid_per_cell: 8,
            max_grid_points: 100_000,
            max_cells: 1_000_000,
            max_width: 4_000,
            seed: 0,
        }
    }
}

/// `N = ⌈2^{2k/τ}⌉`.
pub fn choose_grid_resolution(k: u32, tau: f64) -> usize {
    (2.0_f64.powf(2.0 * f64::from(k) / tau)).ceil() as usize
}

/// Closed-form structural caps of the construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StructuralCaps {
    pub width_cap: f64,
    pub depth_exact: usize,
    pub budget_cap: f64,
}

/// Caps `W ≤ K(r+1)d^r(N+1)^d(6k+3)(d+r)`, `D = (k+1)(d+r)+2`,
/// `M ≤ 6(r+1)d^r(N+1)^d N (d+r)^7 (2(d+r))^{k+1}`.
pub fn structural_caps(d: usize, out_k: usize, r: usize, grid_n: usize, k: u32) -> StructuralCaps {
    let (df, rf, nf) = (d as f64, r as f64, grid_n as f64);
    let cells = (nf + 1.0).powi(d as i32);
    let gamma_cap = (rf + 1.0) * df.powi(r as i32);
    let dr = df + rf;
    StructuralCaps {
        width_cap: out_k as f64 * gamma_cap * cells * (6.0 * f64::from(k) + 3.0) * dr,
        depth_exact: (k as usize + 1) * (d + r) + 2,
        budget_cap: 6.0 * gamma_cap * cells * nf * dr.powi(7) * (2.0 * dr).powf(f64::from(k) + 1.0),
    }
}

/// One polynomial-term subnetwork: `ψ_n(x)(x − n/N)^s`, padded to the target
/// depth, with a single output whose final affine has zero bias.
fn build_term_subnet(
    n: &GridIndex,
    s: &[usize],
    k: u32,
    target_depth: usize,
) -> Result<ReluNetwork> {
    let d = n.index.len();
    let grid_n = n.grid_n as f64;
    let mut b = NetBuilder::new(d);

    // Hidden layer 1: hat pre-units σ(±(N·x_i − n_i)) per coordinate, and a
    // splice pair per linear factor (x_i − n_i/N).
    let mut units = Vec::new();
    for (i, &ni) in n.index.iter().enumerate() {
        let pre = Expr::unit(i).scaled(grid_n).plus_const(-(ni as f64));
        units.push(pre.clone());
        units.push(pre.negated());
    }
    let factor_coords: Vec<usize> = (0..d).filter(|&i| s[i] > 0).collect();
    for &i in &factor_coords {
        let lin = Expr::unit(i).plus_const(-(n.index[i] as f64) / grid_n);
        units.push(lin.clone());
        units.push(lin.negated());
    }
    b.push_layer(units);

    // Hidden layer 2: hat values ψ_i = σ(1 − u − v); linear-factor pairs
    // pass through σ unchanged (both components are nonnegative).
    let mut units = Vec::new();
    for i in 0..d {
        units.push(
            Expr::unit(2 * i)
                .plus(&Expr::unit(2 * i + 1))
                .negated()
                .plus_const(1.0),
        );
    }
    for (j, _) in factor_coords.iter().enumerate() {
        units.push(Expr::unit(2 * d + 2 * j));
        units.push(Expr::unit(2 * d + 2 * j + 1));
    }
    b.push_layer(units);

    // Product-tree channels: d hat values, then each linear factor repeated
    // s_i times.
    let mut channels: Vec<Expr> = (0..d).map(Expr::unit).collect();
    for (j, &i) in factor_coords.iter().enumerate() {
        let pair = Expr::unit(d + 2 * j).minus(&Expr::unit(d + 2 * j + 1));
        for _ in 0..s[i] {
            channels.push(pair.clone());
        }
    }

    while channels.len() > 1 {
        channels = emit_tree_level(&mut b, channels, k);
    }
    let mut out = channels.remove(0);

    // Pad to the exact target depth. Nonnegative single-unit outputs (a bare
    // hat value) ride σ identities; general outputs are spliced once and the
    // pair then rides σ identities.
    if b.depth() > target_depth {
        return Err(Error::Infeasible(format!(
            "term subnet depth {} exceeds target {target_depth}",
            b.depth()
        )));
    }
    let hat_only = d == 1 && factor_coords.is_empty();
    let mut spliced = false;
    while b.depth() < target_depth {
        if hat_only {
            b.push_layer(vec![out.clone()]);
            out = Expr::unit(0);
        } else if !spliced {
            b.push_layer(vec![out.clone(), out.negated()]);
            out = Expr::unit(0).minus(&Expr::unit(1));
            spliced = true;
        } else {
            b.push_layer(vec![Expr::unit(0), Expr::unit(1)]);
            out = Expr::unit(0).minus(&Expr::unit(1));
        }
    }
    debug_assert_eq!(out.bias, 0.0, "term output must have zero bias");
    b.finish(vec![out])
}

/// Stack term subnetworks (all of equal depth) over a shared input and merge
/// their outputs through per-channel coefficient rows.
fn stack_terms(
    input_dim: usize,
    out_channels: usize,
    subnets: &[ReluNetwork],
    coeffs: &[Vec<f64>],
    max_width: usize,
) -> Result<ReluNetwork> {
    let depth = subnets[0].depth();
    debug_assert!(subnets.iter().all(|s| s.depth() == depth));

    let mut widths = vec![0usize; depth];
    for net in subnets {
        for (i, layer) in net.layers()[..depth].iter().enumerate() {
            widths[i] += layer.rows();
        }
    }
    if let Some(&w) = widths.iter().max() {
        if w > max_width {
            return Err(Error::Infeasible(format!(
                "assembled width {w} exceeds the guard {max_width}; \
                 lower k or raise max_width"
            )));
        }
    }

    let mut layers = Vec::with_capacity(depth + 1);
    for level in 0..depth {
        let cols = if level == 0 {
            input_dim
        } else {
            widths[level - 1]
        };
        let mut stacked = ReluLayer::zeros(widths[level], cols);
        let mut row_off = 0;
        let mut col_off = 0;
        for net in subnets {
            let part = &net.layers()[level];
            let base_col = if level == 0 { 0 } else { col_off };
            for r in 0..part.rows() {
                for c in 0..part.cols() {
                    stacked.set_weight(row_off + r, base_col + c, part.weight(r, c));
                }
                stacked.bias_mut()[row_off + r] = part.bias()[r];
            }
            row_off += part.rows();
            if level > 0 {
                col_off += net.layers()[level - 1].rows();
            }
        }
        layers.push(stacked);
    }

    // Merged output layer: row i concatenates c_i,term × (term output row).
    let mut out = ReluLayer::zeros(out_channels, widths[depth - 1]);
    let mut col_off = 0;
    for (net, c) in subnets.iter().zip(coeffs) {
        let last = &net.layers()[depth];
        debug_assert_eq!(last.rows(), 1);
        for j in 0..last.cols() {
            let w = last.weight(0, j);
            if w != 0.0 {
                for (i, ci) in c.iter().enumerate() {
                    out.set_weight(i, col_off + j, ci * w);
                }
            }
        }
        col_off += last.cols();
    }
    layers.push(out);
    ReluNetwork::new(layers)
}

/// Assemble the approximation network without measuring errors.
fn assemble(
    f: &TargetFunction,
    k: u32,
    opts: &BuildOptions,
) -> Result<(ReluNetwork, usize, usize, f64)> {
    if k == 0 {
        return Err(Error::InvalidValue(
            "accuracy parameter k must be >= 1".into(),
        ));
    }
    let d = f.dim_in;
    let grid_n = choose_grid_resolution(k, f.tau);
    let cells = (grid_n + 1)
        .checked_pow(d as u32)
        .filter(|&c| c <= opts.max_cells)
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "(N+1)^d = {}^{d} exceeds the cell guard {}; needed budget {:.3e}",
                grid_n + 1,
                opts.max_cells,
                ((grid_n + 1) as f64).powi(d as i32)
            ))
        })?;

    // The construction's constants assume B ≤ 1; larger targets are built
    // at unit scale and the output layer scaled back.
    let rescale = f.holder_bound.max(1.0);
    let target_depth = (k as usize + 1) * (d + f.smoothness_r) + 2;
    let indices = multi_indices(d, f.smoothness_r);

    let mut subnets = Vec::new();
    let mut coeffs: Vec<Vec<f64>> = Vec::new();
    let mut index = vec![0usize; d];
    loop {
        let cell = GridIndex {
            index: index.clone(),
            grid_n,
        };
        let table = taylor_coefficients(f, &cell)?;
        for (term, s) in indices.iter().enumerate() {
            let c: Vec<f64> = table.coeffs[term].iter().map(|v| v / rescale).collect();
            if c.iter().all(|v| *v == 0.0) {
                continue;
            }
            subnets.push(build_term_subnet(&cell, s, k, target_depth)?);
            coeffs.push(c.iter().map(|v| v * rescale).collect());
        }
        let mut pos = 0;
        loop {
            if pos == d {
                let net = stack_terms(d, f.dim_out, &subnets, &coeffs, opts.max_width)?;
                return Ok((net, grid_n, cells, rescale));
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

/// Measured errors of `net` against `truth` over a dense grid (L∞) plus
/// Monte-Carlo samples (L², and included in the L∞ scan).
fn measure_errors(
    net: &ReluNetwork,
    truth: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    d: usize,
    grid_n: usize,
    opts: &BuildOptions,
) -> (f64, f64, f64, usize, usize) {
    let per_dim_request = opts.grid_per_cell * grid_n + 1;
    let per_dim_cap = (opts.max_grid_points as f64)
        .powf(1.0 / d as f64)
        .floor()
        .max(2.0) as usize;
    let per_dim = per_dim_request.min(per_dim_cap);
    let grid_points: Vec<Vec<f64>> = {
        let mut pts = Vec::new();
        let mut idx = vec![0usize; d];
        'outer: loop {
            pts.push(
                idx.iter()
                    .map(|&i| i as f64 / (per_dim - 1) as f64)
                    .collect(),
            );
            let mut pos = 0;
            loop {
                if pos == d {
                    break 'outer;
                }
                idx[pos] += 1;
                if idx[pos] < per_dim {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
        pts
    };

    let sq_norm = |x: &Vec<f64>| -> f64 {
        let got = net.evaluate(x).expect("dims match");
        let want = truth(x);
        got.iter()
            .zip(&want)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
    };

    let linf_grid = grid_points
        .par_iter()
        .map(&sq_norm)
        .reduce(|| 0.0, f64::max);

    let mc_sq: Vec<f64> = (0..opts.mc_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from(derive_seed(opts.seed, "mc-l2", i as u64));
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
            sq_norm(&x)
        })
        .collect();

    let mc_n = mc_sq.len().max(1) as f64;
    let mean_sq: f64 = mc_sq.iter().sum::<f64>() / mc_n;
    let var_sq: f64 = mc_sq
        .iter()
        .map(|v| (v - mean_sq) * (v - mean_sq))
        .sum::<f64>()
        / mc_n;
    let l2 = mean_sq.sqrt();
    let l2_se = if l2 > 0.0 {
        (var_sq / mc_n).sqrt() / (2.0 * l2)
    } else {
        0.0
    };
    let linf_mc = mc_sq.iter().cloned().fold(0.0, f64::max);
    let linf = linf_grid.max(linf_mc).sqrt();
    (linf, l2, l2_se, grid_points.len(), mc_sq.len())
}

/// Build the approximation network for `f` at accuracy `k` and measure its
/// error against the target.
pub fn build_approximant(
    f: &TargetFunction,
    k: u32,
    opts: &BuildOptions,
) -> Result<(ReluNetwork, ApproxReport)> {
    let (net, grid_n, cells, rescale) = assemble(f, k, opts)?;
    let truth = |x: &[f64]| f.value(x);
    let (linf, l2, l2_se, grid_points, mc) = measure_errors(&net, &truth, f.dim_in, grid_n, opts);
    let report = ApproxReport {
        l2_error: l2,
        l2_std_error: l2_se,
        linf_error: linf,
        width: net.width(),
        depth: net.depth(),
        budget: net.norm_budget().value(),
        k,
        grid_n,
        cells,
        terms_per_cell: multi_indices(f.dim_in, f.smoothness_r).len(),
        rescale,
        seed: opts.seed,
        mc_samples: mc,
        grid_points,
    };
    Ok((net, report))
}

/// One chart of a feature manifold: a linear map `ζ(x) = A x + b` from the
/// ambient `R^d` onto `[0,1]^s`, and the smooth target on `[0,1]^s`.
pub struct Chart {
    /// Row-major `s × d` matrix.
    pub map: Vec<f64>,
    pub offset: Vec<f64>,
    pub target: TargetFunction,
}

impl Chart {
    pub fn chart_dim(&self) -> usize {
        self.target.dim_in
    }

    pub fn ambient_dim(&self) -> Result<usize> {
        let s = self.chart_dim();
        if self.offset.len() != s || !self.map.len().is_multiple_of(s) {
            return Err(Error::DimensionMismatch("chart map shape".into()));
        }
        Ok(self.map.len() / s)
    }

    /// `ζ(x)`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let s = self.chart_dim();
        let d = x.len();
        (0..s)
            .map(|i| {
                self.map[i * d..(i + 1) * d]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    + self.offset[i]
            })
            .collect()
    }
}

/// Compose each chart's approximant with its linear front map and sum the
/// charts. Depth equals the single-chart depth; width scales with the chart
/// count. Errors are measured on the provided ambient sample points against
/// `Σ_j target_j(ζ_j(x))`.
pub fn build_chart_approximant(
    charts: &[Chart],
    k: u32,
    sample_points: &[Vec<f64>],
    opts: &BuildOptions,
) -> Result<(ReluNetwork, ApproxReport)> {
    let first = charts
        .first()
        .ok_or_else(|| Error::InvalidValue("need at least one chart".into()))?;
    let s = first.chart_dim();
    let ambient = first.ambient_dim()?;
    let out_k = first.target.dim_out;
    if s >= ambient {
        return Err(Error::InvalidValue(format!(
            "chart dimension s = {s} must be below ambient d = {ambient}"
        )));
    }
    for c in charts {
        if c.chart_dim() != s || c.ambient_dim()? != ambient || c.target.dim_out != out_k {
            return Err(Error::DimensionMismatch(
                "charts disagree in dimensions".into(),
            ));
        }
    }

    let mut combined: Option<ReluNetwork> = None;
    let mut grid_n = 0;
    let mut cells = 0;
    let mut rescale: f64 = 1.0;
    for chart in charts {
        let (phi, n, c, rs) = assemble(&chart.target, k, opts)?;
        grid_n = n;
        cells += c;
        rescale = rescale.max(rs);
        let front = ReluNetwork::new(vec![ReluLayer::new(
            s,
            ambient,
            chart.map.clone(),
            chart.offset.clone(),
        )?])?;
        let net = compose(&phi, &front)?;
        combined = Some(match combined {
            None => net,
            Some(acc) => parallel_sum(&acc, &net)?,
        });
    }
    let net = combined.expect("at least one chart");

    let truth = |x: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; out_k];
        for chart in charts {
            let u = chart.project(x);
            for (o, v) in out.iter_mut().zip(chart.target.value(&u)) {
                *o += v;
            }
        }
        out
    };

    let (linf, l2_pair): (f64, (f64, f64)) = {
        let sq: Vec<f64> = sample_points
            .par_iter()
            .map(|x| {
                let got = net.evaluate(x).expect("dims match");
                let want = truth(x);
                got.iter()
                    .zip(&want)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .collect();
        let n = sq.len().max(1) as f64;
        let mean = sq.iter().sum::<f64>() / n;
        let var = sq.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let l2 = mean.sqrt();
        let se = if l2 > 0.0 {
            (var / n).sqrt() / (2.0 * l2)
        } else {
            0.0
        };
        (sq.iter().cloned().fold(0.0, f64::max).sqrt(), (l2, se))
    };

    let report = ApproxReport {
        l2_error: l2_pair.0,
        l2_std_error: l2_pair.1,
        linf_error: linf,
        width: net.width(),
        depth: net.depth(),
        budget: net.norm_budget().value(),
        k,
        grid_n,
        cells,
        terms_per_cell: multi_indices(s, first.target.smoothness_r).len(),
        rescale,
        seed: opts.seed,
        mc_samples: sample_points.len(),
        grid_points: 0,
    };
    Ok((net, report))
}
