//! Approximate empirical risk minimization by full-batch gradient descent.
//!
//! The empirical risk minimizer is intractable exactly; the trainer runs
//! deterministic full-batch gradient descent with a halving line search
//! until the relative risk improvement drops below the tolerance, with
//! optional multi-restart (keep the best). Given the same seed and data the
//! final parameters are bitwise identical across runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::{loss, LossKind, LossSpec, SimplexLabel};
use crate::net::{softmax, ReluLayer, ReluNetwork};
use crate::noise::NoiseChannel;
use crate::rng::{derive_seed, rng_from};

use rand::Rng as _;

/// Training configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_steps: usize,
    /// Stop when the relative risk improvement falls below this.
    pub tol: f64,
    pub restarts: usize,
    pub init_scale: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.5,
            max_steps: 10_000,
            tol: 1e-8,
            restarts: 1,
            init_scale: 0.5,
            seed: 0,
        }
    }
}

/// A trained network with optimization diagnostics.
#[derive(Debug, Clone)]
pub struct TrainableNetwork {
    pub net: ReluNetwork,
    pub final_risk: f64,
    pub steps: usize,
    /// Relative improvement at the final step.
    pub residual: f64,
    /// Which restart produced the returned parameters.
    pub restart: usize,
}

/// What the trainer minimizes.
#[derive(Debug, Clone, Copy)]
pub enum RiskObjective<'a> {
    /// Mean loss against the given labels.
    Labels,
    /// Channel-expected noisy risk: each label is replaced by its
    /// class-conditional mixture under the channel. For a symmetric loss and
    /// a uniform channel this is an affine function of the clean risk.
    ChannelExpected(&'a NoiseChannel),
}

/// Softmax predictions of a network on a set of points.
pub fn predictions(net: &ReluNetwork, points: &[Vec<f64>]) -> Result<Vec<SimplexLabel>> {
    points
        .iter()
        .map(|x| SimplexLabel::new(softmax(&net.evaluate(x)?)))
        .collect()
}

/// Loss value and gradient with respect to the logits.
fn loss_and_logit_grad(spec: &LossSpec, z: &[f64], label: &SimplexLabel) -> (f64, Vec<f64>) {
    let s = softmax(z);
    let q = label.as_slice();
    let k = z.len();
    match spec.kind {
        LossKind::CrossEntropy => {
            let pred = SimplexLabel::new(s.clone()).expect("softmax output");
            let value = loss(spec, &pred, label).value;
            let grad = s.iter().zip(q).map(|(si, qi)| si - qi).collect();
            (value, grad)
        }
        LossKind::Lp { p } => {
            let h: Vec<f64> = s.iter().zip(q).map(|(a, b)| a - b).collect();
            let pred = SimplexLabel::new(s.clone()).expect("softmax output");
            let value = loss(spec, &pred, label).value;
            let g: Vec<f64> = if p == 1.0 {
                h.iter().map(|v| v.signum()).collect()
            } else if value > 0.0 {
                h.iter()
                    .map(|v| v.signum() * v.abs().powf(p - 1.0) / value.powf(p - 1.0))
                    .collect()
            } else {
                vec![0.0; k]
            };
            (value, softmax_jacobian_vec(&s, &g))
        }
        LossKind::ReverseCrossEntropy { a } => {
            let pred = SimplexLabel::new(s.clone()).expect("softmax output");
            let value = loss(spec, &pred, label).value;
            let g: Vec<f64> = q
                .iter()
                .map(|&qi| -(if qi == 0.0 { a } else { qi.ln().max(a) }))
                .collect();
            (value, softmax_jacobian_vec(&s, &g))
        }
    }
}

/// `Jᵀ g` for the softmax Jacobian `J = diag(s) − s sᵀ`.
fn softmax_jacobian_vec(s: &[f64], g: &[f64]) -> Vec<f64> {
    let dot: f64 = s.iter().zip(g).map(|(a, b)| a * b).sum();
    s.iter().zip(g).map(|(si, gi)| si * (gi - dot)).collect()
}

/// Zero-initialized gradient holder matching a network's layers.
fn zero_grads(net: &ReluNetwork) -> Vec<ReluLayer> {
    net.layers()
        .iter()
        .map(|l| ReluLayer::zeros(l.rows(), l.cols()))
        .collect()
}

/// Forward caching post-activation values per layer.
fn forward_cached(net: &ReluNetwork, x: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(net.layers().len());
    let mut cur = x.to_vec();
    let last = net.layers().len() - 1;
    let mut out = Vec::new();
    for (i, layer) in net.layers().iter().enumerate() {
        layer.apply(&cur, &mut out);
        if i < last {
            for v in &mut out {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            acts.push(out.clone());
            std::mem::swap(&mut cur, &mut out);
        }
    }
    (acts, out)
}

/// Mean objective value and parameter gradient over the batch, where the
/// per-sample gradient at the output logits comes from `dout`.
pub(crate) fn batch_objective_and_grads<F>(
    net: &ReluNetwork,
    points: &[Vec<f64>],
    mut per_sample: F,
) -> (f64, Vec<ReluLayer>)
where
    F: FnMut(usize, &[f64]) -> (f64, Vec<f64>),
{
    let n = points.len() as f64;
    let mut grads = zero_grads(net);
    let mut total = 0.0;
    let layers = net.layers();
    let last = layers.len() - 1;
    for (idx, x) in points.iter().enumerate() {
        let (acts, logits) = forward_cached(net, x);
        let (value, dlogits) = per_sample(idx, &logits);
        total += value;

        // Backward pass: delta over layer outputs, walking to the input.
        let mut delta = dlogits;
        for li in (0..layers.len()).rev() {
            let input: &[f64] = if li == 0 { x } else { &acts[li - 1] };
            if li < last {
                // ReLU gate on this layer's post-activation.
                for (dv, av) in delta.iter_mut().zip(&acts[li]) {
                    if *av <= 0.0 {
                        *dv = 0.0;
                    }
                }
            }
            let g = &mut grads[li];
            for (r, dr) in delta.iter().enumerate() {
                if *dr != 0.0 {
                    for (c, xi) in input.iter().enumerate() {
                        let w = g.weight(r, c) + dr * xi / n;
                        g.set_weight(r, c, w);
                    }
                    g.bias_mut()[r] += dr / n;
                }
            }
            if li > 0 {
                let layer = &layers[li];
                let mut prev = vec![0.0; layer.cols()];
                for (r, dr) in delta.iter().enumerate() {
                    if *dr != 0.0 {
                        for (c, pv) in prev.iter_mut().enumerate() {
                            *pv += layer.weight(r, c) * dr;
                        }
                    }
                }
                delta = prev;
            }
        }
    }
    (total / n, grads)
}

fn risk_of(
    net: &ReluNetwork,
    spec: &LossSpec,
    points: &[Vec<f64>],
    labels: &[Vec<(f64, SimplexLabel)>],
) -> f64 {
    let n = points.len() as f64;
    points
        .iter()
        .zip(labels)
        .map(|(x, mix)| {
            let pred = SimplexLabel::new(softmax(&net.evaluate(x).expect("dims"))).unwrap();
            mix.iter()
                .map(|(w, y)| w * loss(spec, &pred, y).value)
                .sum::<f64>()
        })
        .sum::<f64>()
        / n
}

fn random_init(dims: &[usize], scale: f64, seed: u64) -> ReluNetwork {
    let mut rng = rng_from(seed);
    let layers = dims
        .windows(2)
        .map(|w| {
            let (cols, rows) = (w[0], w[1]);
            let a = scale / (cols as f64).sqrt();
            let weights = (0..rows * cols).map(|_| rng.random_range(-a..a)).collect();
            let bias = (0..rows).map(|_| rng.random_range(-a..a)).collect();
            ReluLayer::new(rows, cols, weights, bias).unwrap()
        })
        .collect();
    ReluNetwork::new(layers).expect("architecture dims chain")
}

/// Train an approximate empirical risk minimizer of the given architecture.
///
/// `dims` lists all layer widths including input and output, e.g.
/// `[d, 16, K]`. Labels must be one per point.
pub fn train_erm(
    dims: &[usize],
    spec: &LossSpec,
    points: &[Vec<f64>],
    labels: &[SimplexLabel],
    config: &TrainConfig,
) -> Result<TrainableNetwork> {
    let mixtures: Vec<Vec<(f64, SimplexLabel)>> =
        labels.iter().map(|y| vec![(1.0, y.clone())]).collect();
    train_on_mixtures(dims, spec, points, &mixtures, config)
}

/// Train against an explicit risk objective (clean labels or the
/// channel-expected noisy risk).
pub fn train_erm_with_objective(
    dims: &[usize],
    spec: &LossSpec,
    points: &[Vec<f64>],
    labels: &[SimplexLabel],
    objective: RiskObjective<'_>,
    config: &TrainConfig,
) -> Result<TrainableNetwork> {
    let mixtures: Vec<Vec<(f64, SimplexLabel)>> = match objective {
        RiskObjective::Labels => labels.iter().map(|y| vec![(1.0, y.clone())]).collect(),
        RiskObjective::ChannelExpected(channel) => {
            let k = channel.classes();
            labels
                .iter()
                .map(|y| {
                    let truth = y
                        .hot_index()
                        .expect("channel-expected risk needs one-hot labels");
                    (0..k)
                        .filter(|&j| channel.prob(j, truth) > 0.0)
                        .map(|j| (channel.prob(j, truth), SimplexLabel::one_hot(k, j)))
                        .collect()
                })
                .collect()
        }
    };
    train_on_mixtures(dims, spec, points, &mixtures, config)
}

fn train_on_mixtures(
    dims: &[usize],
    spec: &LossSpec,
    points: &[Vec<f64>],
    mixtures: &[Vec<(f64, SimplexLabel)>],
    config: &TrainConfig,
) -> Result<TrainableNetwork> {
    if points.is_empty() || points.len() != mixtures.len() {
        return Err(Error::DimensionMismatch(
            "training needs matching points/labels".into(),
        ));
    }
    if dims.len() < 2 || dims[0] != points[0].len() || *dims.last().unwrap() != spec.classes {
        return Err(Error::DimensionMismatch(format!(
            "architecture {dims:?} does not match data/loss dims"
        )));
    }

    let mut best: Option<TrainableNetwork> = None;
    for restart in 0..config.restarts.max(1) {
        let seed = derive_seed(config.seed, "erm-init", restart as u64);
        let run = gradient_descent(dims, spec, points, mixtures, config, seed, restart)?;
        let better = best
            .as_ref()
            .map(|b| run.final_risk < b.final_risk)
            .unwrap_or(true);
        if better {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn gradient_descent(
    dims: &[usize],
    spec: &LossSpec,
    points: &[Vec<f64>],
    mixtures: &[Vec<(f64, SimplexLabel)>],
    config: &TrainConfig,
    seed: u64,
    restart: usize,
) -> Result<TrainableNetwork> {
    let mut net = random_init(dims, config.init_scale, seed);
    let mut risk = risk_of(&net, spec, points, mixtures);
    if !risk.is_finite() {
        return Err(Error::Diverged(format!("initial risk {risk}")));
    }
    let mut lr = config.learning_rate;
    let mut steps = 0;
    let mut residual = f64::INFINITY;

    while steps < config.max_steps {
        let (_, grads) = batch_objective_and_grads(&net, points, |i, z| {
            let mut value = 0.0;
            let mut grad = vec![0.0; z.len()];
            for (w, y) in &mixtures[i] {
                let (v, g) = loss_and_logit_grad(spec, z, y);
                value += w * v;
                for (gi, gv) in grad.iter_mut().zip(g) {
                    *gi += w * gv;
                }
            }
            (value, grad)
        });

        // Halving line search on the risk.
        let mut accepted = false;
        for _ in 0..40 {
            let mut candidate = net.clone();
            for (layer, g) in candidate.layers_mut().iter_mut().zip(&grads) {
                for (w, gw) in layer.weights_mut().iter_mut().zip(g.weights()) {
                    *w -= lr * gw;
                }
                for (b, gb) in layer.bias_mut().iter_mut().zip(g.bias()) {
                    *b -= lr * gb;
                }
            }
            let new_risk = risk_of(&candidate, spec, points, mixtures);
            if new_risk.is_finite() && new_risk <= risk {
                residual = (risk - new_risk) / risk.abs().max(1e-300);
                net = candidate;
                risk = new_risk;
                accepted = true;
                break;
            }
            lr *= 0.5;
            if lr < 1e-18 {
                break;
            }
        }
        steps += 1;
        if !accepted || residual < config.tol {
            break;
        }
    }

    if !risk.is_finite()
        || net.layers().iter().any(|l| {
            l.weights()
                .iter()
                .chain(l.bias().iter())
                .any(|v| !v.is_finite())
        })
    {
        return Err(Error::Diverged(format!("risk {risk} after {steps} steps")));
    }
    Ok(TrainableNetwork {
        net,
        final_risk: risk,
        steps,
        residual,
        restart,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::empirical_risk;

    fn toy_separable() -> (Vec<Vec<f64>>, Vec<SimplexLabel>) {
        let points: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 19.0]).collect();
        let labels = (0..20)
            .map(|i| SimplexLabel::one_hot(2, usize::from(i >= 10)))
            .collect();
        (points, labels)
    }

    #[test]
    fn erm_beats_constant_predictor() {
        let (points, labels) = toy_separable();
        let spec = LossSpec::l1(2);
        let cfg = TrainConfig {
            max_steps: 600,
            ..Default::default()
        };
        let trained = train_erm(&[1, 8, 2], &spec, &points, &labels, &cfg).unwrap();

        // Best constant simplex predictor risk: predicting (1/2, 1/2) gives
        // l1 risk 1; any constant gives at least 1 on a balanced set.
        assert!(trained.final_risk < 1.0, "risk {}", trained.final_risk);
        let preds = predictions(&trained.net, &points).unwrap();
        assert!((empirical_risk(&spec, &preds, &labels) - trained.final_risk).abs() < 1e-12);
    }

    #[test]
    fn all_identical_labels_drive_risk_down() {
        let points: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 9.0]).collect();
        let labels: Vec<SimplexLabel> = (0..10).map(|_| SimplexLabel::one_hot(2, 0)).collect();
        let spec = LossSpec::cross_entropy(2);
        let cfg = TrainConfig {
            max_steps: 2_000,
            ..Default::default()
        };
        let trained = train_erm(&[1, 4, 2], &spec, &points, &labels, &cfg).unwrap();
        assert!(trained.final_risk < 0.05, "risk {}", trained.final_risk);
    }

    #[test]
    fn training_is_deterministic() {
        let (points, labels) = toy_separable();
        let spec = LossSpec::l1(2);
        let cfg = TrainConfig {
            max_steps: 200,
            seed: 9,
            ..Default::default()
        };
        let a = train_erm(&[1, 6, 2], &spec, &points, &labels, &cfg).unwrap();
        let b = train_erm(&[1, 6, 2], &spec, &points, &labels, &cfg).unwrap();
        assert_eq!(a.net, b.net);
        assert_eq!(a.final_risk, b.final_risk);
        assert_eq!(a.steps, b.steps);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (points, labels) = toy_separable();
        for spec in [
            LossSpec::l1(2),
            LossSpec::lp(2.0, 2).unwrap(),
            LossSpec::cross_entropy(2),
            LossSpec::reverse_cross_entropy(-4.0, 2).unwrap(),
        ] {
            let net = random_init(&[1, 5, 2], 0.8, 42);
            let mixtures: Vec<Vec<(f64, SimplexLabel)>> =
                labels.iter().map(|y| vec![(1.0, y.clone())]).collect();
            let (_, grads) = batch_objective_and_grads(&net, &points, |i, z| {
                loss_and_logit_grad(&spec, z, &labels[i])
            });

            let eps = 1e-6;
            let mut checked = 0;
            for (li, layer) in net.layers().iter().enumerate() {
                for r in 0..layer.rows().min(2) {
                    for c in 0..layer.cols().min(2) {
                        let mut up = net.clone();
                        let w = up.layers_mut()[li].weight(r, c);
                        up.layers_mut()[li].set_weight(r, c, w + eps);
                        let mut dn = net.clone();
                        dn.layers_mut()[li].set_weight(r, c, w - eps);
                        let fd = (risk_of(&up, &spec, &points, &mixtures)
                            - risk_of(&dn, &spec, &points, &mixtures))
                            / (2.0 * eps);
                        let an = grads[li].weight(r, c);
                        assert!(
                            (fd - an).abs() <= 1e-4 * (1.0 + fd.abs()),
                            "{spec:?} layer {li} ({r},{c}): fd {fd} vs {an}"
                        );
                        checked += 1;
                    }
                }
            }
            assert!(checked > 0);
        }
    }

    #[test]
    fn channel_expected_objective_is_affine_in_clean_risk() {
        // With a symmetric loss and compensated learning rate, training on
        // the channel-expected risk follows the clean trajectory.
        let (points, labels) = toy_separable();
        let spec = LossSpec::l1(2);
        let eta = 0.2;
        let channel = NoiseChannel::uniform(2, eta).unwrap();
        let slope = 1.0 - eta * 2.0;

        let clean_cfg = TrainConfig {
            max_steps: 40,
            seed: 4,
            ..Default::default()
        };
        let noisy_cfg = TrainConfig {
            learning_rate: clean_cfg.learning_rate / slope,
            ..clean_cfg.clone()
        };
        let clean = train_erm_with_objective(
            &[1, 4, 2],
            &spec,
            &points,
            &labels,
            RiskObjective::Labels,
            &clean_cfg,
        )
        .unwrap();
        let noisy = train_erm_with_objective(
            &[1, 4, 2],
            &spec,
            &points,
            &labels,
            RiskObjective::ChannelExpected(&channel),
            &noisy_cfg,
        )
        .unwrap();
        for (a, b) in clean.net.layers().iter().zip(noisy.net.layers()) {
            for (wa, wb) in a.weights().iter().zip(b.weights()) {
                assert!((wa - wb).abs() <= 1e-9, "{wa} vs {wb}");
            }
        }
        // And the objective values satisfy the affine identity.
        let c0 = spec.symmetry_constant_closed_form().unwrap();
        let affine = c0 * eta + slope * clean.final_risk;
        assert!((noisy.final_risk - affine).abs() <= 1e-9);
    }

    #[test]
    fn divergence_is_reported_not_hidden() {
        // An absurd learning rate with no possible improvement still
        // terminates; the line search shrinks the step until acceptance, so
        // this ends finite. Force divergence by poisoning the data instead.
        let points = vec![vec![f64::MAX / 1e3], vec![1.0]];
        let labels = vec![SimplexLabel::one_hot(2, 0), SimplexLabel::one_hot(2, 1)];
        let spec = LossSpec::cross_entropy(2);
        let cfg = TrainConfig {
            max_steps: 50,
            ..Default::default()
        };
        let out = train_erm(&[1, 3, 2], &spec, &points, &labels, &cfg);
        // Either an explicit divergence error or a finite result; never NaN.
        if let Ok(t) = out {
            assert!(t.final_risk.is_finite());
        }
    }
}
