//! Monte-Carlo estimation of the empirical Rademacher complexity of the
//! norm-constrained network class.
//!
//! For each Rademacher sign vector the inner supremum over the class is
//! approximated from below by projected gradient ascent on the parameters:
//! after every step the output layer is rescaled so the norm budget stays
//! within the cap (the budget is linear in the output-layer norm). The
//! resulting estimate is a lower bound on the true supremum, so landing
//! under the theoretical cap is a necessary consistency check:
//!
//! ```text
//! E sup |1/n Σ σ_i f(x_i)| ≤ 2 B M √(D + 2 + ln d) / √n
//! ```

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{ReluLayer, ReluNetwork};
use crate::rng::{derive_seed, rng_from};

use super::train::batch_objective_and_grads;

/// The function class: architecture dims (input..output, output dim 1) and
/// the norm-budget cap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSpec {
    pub dims: Vec<usize>,
    pub budget_cap: f64,
}

/// Estimate, uncertainty, and the theoretical cap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RademacherEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub theoretical_bound: f64,
    pub pass: bool,
    pub sign_draws: usize,
    pub data_radius: f64,
    pub seed: u64,
}

const ASCENT_STEPS: usize = 200;
const ASCENT_RESTARTS: usize = 5;

fn project_to_budget(net: &mut ReluNetwork, cap: f64) {
    let budget = net.norm_budget().value();
    if budget > cap && budget > 0.0 {
        let scale = cap / budget;
        let last = net.layers().len() - 1;
        net.layers_mut()[last].scale(scale);
    }
}

fn random_member(dims: &[usize], cap: f64, seed: u64) -> ReluNetwork {
    let mut rng = rng_from(seed);
    let layers: Vec<ReluLayer> = dims
        .windows(2)
        .map(|w| {
            let (cols, rows) = (w[0], w[1]);
            let a = 1.0 / (cols as f64).sqrt();
            let weights = (0..rows * cols).map(|_| rng.random_range(-a..a)).collect();
            let bias = (0..rows).map(|_| rng.random_range(-a..a)).collect();
            ReluLayer::new(rows, cols, weights, bias).unwrap()
        })
        .collect();
    let mut net = ReluNetwork::new(layers).expect("dims chain");
    project_to_budget(&mut net, cap);
    net
}

/// Maximize `|1/n Σ σ_i f(x_i)|` over the budget-capped class from one
/// random start.
fn ascend(dims: &[usize], cap: f64, points: &[Vec<f64>], signs: &[f64], seed: u64) -> f64 {
    let n = points.len() as f64;
    let mut net = random_member(dims, cap, seed);
    let mut lr = 0.5;
    let objective = |net: &ReluNetwork| -> f64 {
        points
            .iter()
            .zip(signs)
            .map(|(x, s)| s * net.evaluate(x).expect("dims")[0])
            .sum::<f64>()
            / n
    };
    let mut best = objective(&net).abs();
    for _ in 0..ASCENT_STEPS {
        let (value, grads) =
            batch_objective_and_grads(&net, points, |i, z| (signs[i] * z[0], vec![signs[i]]));
        let direction = if value >= 0.0 { 1.0 } else { -1.0 };
        let mut candidate = net.clone();
        for (layer, g) in candidate.layers_mut().iter_mut().zip(&grads) {
            for (w, gw) in layer.weights_mut().iter_mut().zip(g.weights()) {
                *w += lr * direction * gw;
            }
            for (b, gb) in layer.bias_mut().iter_mut().zip(g.bias()) {
                *b += lr * direction * gb;
            }
        }
        project_to_budget(&mut candidate, cap);
        let cand_val = objective(&candidate).abs();
        if cand_val > best {
            best = cand_val;
            net = candidate;
        } else {
            lr *= 0.7;
            if lr < 1e-12 {
                break;
            }
        }
    }
    best
}

/// Estimate the empirical Rademacher complexity of the class over the given
/// inputs, together with the norm-based theoretical cap.
pub fn rademacher_estimate(
    class: &ClassSpec,
    data_x: &[Vec<f64>],
    sign_draws: usize,
    seed: u64,
) -> Result<RademacherEstimate> {
    if data_x.is_empty() || sign_draws == 0 {
        return Err(Error::InvalidValue(
            "need data points and at least one draw".into(),
        ));
    }
    if *class.dims.last().unwrap() != 1 {
        return Err(Error::InvalidValue(
            "Rademacher class maps to scalar outputs".into(),
        ));
    }
    if class.dims[0] != data_x[0].len() {
        return Err(Error::DimensionMismatch(
            "class input dim != data dim".into(),
        ));
    }
    let n = data_x.len();
    let d = class.dims[0] as f64;
    let depth = class.dims.len() - 2;
    let radius = data_x
        .iter()
        .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let theoretical_bound =
        2.0 * radius * class.budget_cap * (depth as f64 + 2.0 + d.ln()).sqrt() / (n as f64).sqrt();

    let sups: Vec<f64> = (0..sign_draws)
        .into_par_iter()
        .map(|draw| {
            let mut rng = rng_from(derive_seed(seed, "signs", draw as u64));
            let signs: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random_range(0.0..1.0) < 0.5 {
                        -1.0
                    } else {
                        1.0
                    }
                })
                .collect();
            (0..ASCENT_RESTARTS)
                .map(|r| {
                    ascend(
                        &class.dims,
                        class.budget_cap,
                        data_x,
                        &signs,
                        derive_seed(seed, "ascent", (draw * ASCENT_RESTARTS + r) as u64),
                    )
                })
                .fold(0.0, f64::max)
        })
        .collect();

    let m = sups.len() as f64;
    let estimate = sups.iter().sum::<f64>() / m;
    let var = sups
        .iter()
        .map(|s| (s - estimate) * (s - estimate))
        .sum::<f64>()
        / m;
    Ok(RademacherEstimate {
        estimate,
        std_error: (var / m).sqrt(),
        theoretical_bound,
        pass: estimate <= theoretical_bound,
        sign_draws,
        data_radius: radius,
        seed,
    })
}
