//! Excess-risk experiments: data generation from a truth model, ERM on
//! noisy labels, exact expected risks, and bound-term evaluation.
//!
//! A truth model fixes the feature law and the label law
//! `y | x ~ Categorical(softmax(κ₀(x)))`. Expected risks are computed
//! exactly: as stationary-weighted sums over the emission support for
//! chain-generated features, or by tensor-grid quadrature for uniform
//! features (d ≤ 3).

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::approx::TargetFunction;
use crate::error::{Error, Result};
use crate::loss::{loss, LossSpec, SimplexLabel};
use crate::mixing::MixingChain;
use crate::net::{softmax, ReluNetwork};
use crate::noise::{empirical_risk, NoiseChannel};
use crate::rng::{derive_seed, rng_from};

use super::train::{train_erm, TrainConfig};
use super::{bound_terms, BoundTerms};

/// Generative description of the data: feature law plus the smooth logit
/// map κ₀ behind the optimal classifier `f₀ = softmax ∘ κ₀`.
pub enum TruthModel {
    /// Features follow the chain's stationary emission distribution.
    FiniteStates {
        chain: MixingChain,
        kappa0: TargetFunction,
    },
    /// Features are uniform on `[0,1]^d`; expectations by midpoint
    /// quadrature with `quad_per_dim` points per dimension (d ≤ 3).
    UniformX {
        kappa0: TargetFunction,
        quad_per_dim: usize,
    },
}

impl TruthModel {
    pub fn classes(&self) -> usize {
        match self {
            TruthModel::FiniteStates { kappa0, .. } => kappa0.dim_out,
            TruthModel::UniformX { kappa0, .. } => kappa0.dim_out,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            TruthModel::FiniteStates { kappa0, .. } => kappa0.dim_in,
            TruthModel::UniformX { kappa0, .. } => kappa0.dim_in,
        }
    }

    fn kappa0(&self) -> &TargetFunction {
        match self {
            TruthModel::FiniteStates { kappa0, .. } => kappa0,
            TruthModel::UniformX { kappa0, .. } => kappa0,
        }
    }

    /// Class probabilities of the optimal classifier at `x`.
    pub fn label_law(&self, x: &[f64]) -> Vec<f64> {
        softmax(&self.kappa0().value(x))
    }

    /// Weighted support for exact expectations: pairs `(weight, x)`.
    fn support(&self) -> Result<Vec<(f64, Vec<f64>)>> {
        match self {
            TruthModel::FiniteStates { chain, .. } => Ok((0..chain.states())
                .map(|s| (chain.stationary()[s], chain.emission(s).x.clone()))
                .collect()),
            TruthModel::UniformX {
                kappa0,
                quad_per_dim,
            } => {
                let d = kappa0.dim_in;
                if d > 3 {
                    return Err(Error::Infeasible(format!(
                        "tensor quadrature limited to d <= 3, got {d}"
                    )));
                }
                let q = *quad_per_dim;
                let total = q.pow(d as u32);
                let w = 1.0 / total as f64;
                let mut pts = Vec::with_capacity(total);
                let mut idx = vec![0usize; d];
                loop {
                    let x: Vec<f64> = idx.iter().map(|&i| (i as f64 + 0.5) / q as f64).collect();
                    pts.push((w, x));
                    let mut pos = 0;
                    loop {
                        if pos == d {
                            return Ok(pts);
                        }
                        idx[pos] += 1;
                        if idx[pos] < q {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                }
            }
        }
    }

    /// β-mixing coefficient of the feature process at the given lag.
    pub fn beta_at(&self, lag: usize) -> f64 {
        match self {
            TruthModel::FiniteStates { chain, .. } => {
                chain.beta_coefficients(lag).beta(lag).unwrap_or(0.0)
            }
            TruthModel::UniformX { .. } => 0.0,
        }
    }

    /// Draw `n` features (chain path emissions, or i.i.d. uniforms).
    pub fn sample_features(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        match self {
            TruthModel::FiniteStates { chain, .. } => chain
                .sample_states(n, seed)
                .into_iter()
                .map(|s| chain.emission(s).x.clone())
                .collect(),
            TruthModel::UniformX { kappa0, .. } => {
                let mut rng = rng_from(seed);
                (0..n)
                    .map(|_| {
                        (0..kappa0.dim_in)
                            .map(|_| rng.random_range(0.0..1.0))
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// Sample one-hot labels from the label law at each point.
    pub fn sample_labels(&self, points: &[Vec<f64>], seed: u64) -> Vec<SimplexLabel> {
        let mut rng = rng_from(seed);
        let k = self.classes();
        points
            .iter()
            .map(|x| {
                let p = self.label_law(x);
                let u: f64 = rng.random_range(0.0..1.0);
                let mut acc = 0.0;
                for (j, pj) in p.iter().enumerate() {
                    acc += pj;
                    if u < acc {
                        return SimplexLabel::one_hot(k, j);
                    }
                }
                SimplexLabel::one_hot(k, k - 1)
            })
            .collect()
    }
}

/// Exact expected risk `E ℓ(predict(X), Y)` of an arbitrary predictor under
/// the truth model, optionally through a corruption channel on the labels.
pub fn expected_risk<P>(
    predict: P,
    spec: &LossSpec,
    truth: &TruthModel,
    channel: Option<&NoiseChannel>,
) -> Result<f64>
where
    P: Fn(&[f64]) -> SimplexLabel,
{
    let k = spec.classes;
    let mut total = 0.0;
    for (w, x) in truth.support()? {
        let clean = truth.label_law(&x);
        let mut probs = vec![0.0; k];
        match channel {
            None => probs.copy_from_slice(&clean),
            Some(ch) => {
                for (j, pj) in probs.iter_mut().enumerate() {
                    *pj = (0..k).map(|t| ch.prob(j, t) * clean[t]).sum();
                }
            }
        }
        let pred = predict(&x);
        let point_risk: f64 = probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(j, p)| p * loss(spec, &pred, &SimplexLabel::one_hot(k, j)).value)
            .sum();
        total += w * point_risk;
    }
    Ok(total)
}

/// Softmax predictor of a network.
pub fn net_predictor(net: &ReluNetwork) -> impl Fn(&[f64]) -> SimplexLabel + '_ {
    move |x: &[f64]| {
        SimplexLabel::new(softmax(&net.evaluate(x).expect("dims match"))).expect("softmax")
    }
}

/// `|expected risk − empirical risk|` of a trained network: a witness value
/// for the statistical error.
pub fn statistical_gap(
    net: &ReluNetwork,
    spec: &LossSpec,
    points: &[Vec<f64>],
    labels: &[SimplexLabel],
    truth: &TruthModel,
) -> Result<f64> {
    let preds: Vec<SimplexLabel> = points
        .iter()
        .map(|x| SimplexLabel::new(softmax(&net.evaluate(x)?)))
        .collect::<Result<Vec<_>>>()?;
    let empirical = empirical_risk(spec, &preds, labels);
    let expected = expected_risk(net_predictor(net), spec, truth, None)?;
    Ok((expected - empirical).abs())
}

/// One grid point of the excess-risk experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub n: usize,
    pub a_n: usize,
    pub eta: f64,
}

/// Configuration of the end-to-end excess-risk pipeline.
pub struct ExcessRiskConfig {
    pub truth: TruthModel,
    pub loss: LossSpec,
    /// Architecture dims `[d, hidden.., K]`.
    pub dims: Vec<usize>,
    /// Class norm cap M used in the bound terms.
    pub budget_cap: f64,
    /// Hölder smoothness of κ₀.
    pub tau: f64,
    pub grid: Vec<GridCell>,
    pub train: TrainConfig,
    pub seed: u64,
}

/// Per-grid-point decomposition record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskReport {
    pub n: usize,
    pub a_n: usize,
    pub eta: f64,
    pub clean_empirical: f64,
    pub noisy_empirical: f64,
    pub clean_expected: f64,
    pub noisy_expected: f64,
    /// `L(f̂) − L(f₀)`.
    pub clean_excess: f64,
    /// `L^η(f̂) − L^η(f₀)`.
    pub noisy_excess: f64,
    pub statistical_gap: f64,
    /// Measured approximation error, when a constructed approximant of κ₀
    /// was supplied (decomposition runs); absent in the plain experiment.
    pub approx_error: Option<f64>,
    pub bound: BoundTerms,
    /// `|noisy_excess| / bound total`.
    pub ratio: f64,
    pub trained_budget: f64,
    pub train_steps: usize,
    pub train_residual: f64,
    pub beta_an: f64,
}

/// Run the pipeline at every grid point: sample a path, corrupt labels,
/// train on the noisy labels, and evaluate measured risks against the
/// closed-form bound terms.
pub fn excess_risk_experiment(cfg: &ExcessRiskConfig) -> Result<Vec<RiskReport>> {
    let k = cfg.loss.classes;
    if cfg.truth.classes() != k || *cfg.dims.last().unwrap() != k {
        return Err(Error::DimensionMismatch("class counts disagree".into()));
    }
    let d = cfg.truth.input_dim();
    if cfg.dims[0] != d {
        return Err(Error::DimensionMismatch(
            "architecture input dim != feature dim".into(),
        ));
    }
    let lambda = cfg.loss.lipschitz_lambda();
    let depth = cfg.dims.len() - 2;

    let truth_predictor = |x: &[f64]| {
        SimplexLabel::new(softmax(&match &cfg.truth {
            TruthModel::FiniteStates { kappa0, .. } => kappa0.value(x),
            TruthModel::UniformX { kappa0, .. } => kappa0.value(x),
        }))
        .expect("softmax")
    };
    let clean_f0 = expected_risk(truth_predictor, &cfg.loss, &cfg.truth, None)?;

    let mut out = Vec::with_capacity(cfg.grid.len());
    for (idx, cell) in cfg.grid.iter().enumerate() {
        if cell.n % cell.a_n != 0 {
            return Err(Error::InvalidValue(format!(
                "a_n = {} does not divide n = {}",
                cell.a_n, cell.n
            )));
        }
        let seed = derive_seed(cfg.seed, "grid-point", idx as u64);
        let points = cfg
            .truth
            .sample_features(cell.n, derive_seed(seed, "path", 0));
        let labels = cfg
            .truth
            .sample_labels(&points, derive_seed(seed, "labels", 0));

        let channel = if cell.eta == 0.0 {
            NoiseChannel::identity(k)
        } else {
            NoiseChannel::uniform(k, cell.eta)?
        };
        let mut rng = rng_from(derive_seed(seed, "corrupt", 0));
        let noisy: Vec<SimplexLabel> = labels
            .iter()
            .map(|y| {
                let t = y.hot_index().expect("one-hot");
                SimplexLabel::one_hot(k, channel.sample(t, &mut rng))
            })
            .collect();

        let mut train_cfg = cfg.train.clone();
        train_cfg.seed = derive_seed(seed, "train", 0);
        let trained = train_erm(&cfg.dims, &cfg.loss, &points, &noisy, &train_cfg)?;

        let preds: Vec<SimplexLabel> = points
            .iter()
            .map(|x| SimplexLabel::new(softmax(&trained.net.evaluate(x)?)))
            .collect::<Result<Vec<_>>>()?;
        let clean_empirical = empirical_risk(&cfg.loss, &preds, &labels);
        let noisy_empirical = empirical_risk(&cfg.loss, &preds, &noisy);
        let clean_expected =
            expected_risk(net_predictor(&trained.net), &cfg.loss, &cfg.truth, None)?;
        let noisy_expected = expected_risk(
            net_predictor(&trained.net),
            &cfg.loss,
            &cfg.truth,
            Some(&channel),
        )?;
        let noisy_f0 = expected_risk(truth_predictor, &cfg.loss, &cfg.truth, Some(&channel))?;

        let beta_an = cfg.truth.beta_at(cell.a_n);
        let bound = bound_terms(
            lambda,
            k,
            cfg.budget_cap,
            depth,
            d,
            cell.n,
            cell.a_n,
            beta_an,
            cfg.tau,
        );
        let noisy_excess = noisy_expected - noisy_f0;
        out.push(RiskReport {
            n: cell.n,
            a_n: cell.a_n,
            eta: cell.eta,
            clean_empirical,
            noisy_empirical,
            clean_expected,
            noisy_expected,
            clean_excess: clean_expected - clean_f0,
            noisy_excess,
            statistical_gap: (clean_expected - clean_empirical).abs(),
            approx_error: None,
            bound,
            ratio: noisy_excess.abs() / bound.total(),
            trained_budget: trained.net.norm_budget().value(),
            train_steps: trained.steps,
            train_residual: trained.residual,
            beta_an,
        });
    }
    Ok(out)
}

/// Error decomposition check: measured excess risk against twice the
/// statistical cap plus λ times the measured approximation error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub statistical_cap: f64,
    pub approximation_term: f64,
    pub measured_excess: f64,
    pub total_cap: f64,
    pub ratio: f64,
    pub holds: bool,
}

/// Evaluate the decomposition inequality with measured quantities.
///
/// `approx_error` is the measured `L²`-type approximation error of a
/// constructed approximant of κ₀ within the class, and `class_budget` the
/// class cap M; the statistical part uses the norm-based cap at block
/// length `a_n`.
#[allow(clippy::too_many_arguments)]
pub fn decomposition_report(
    net: &ReluNetwork,
    spec: &LossSpec,
    truth: &TruthModel,
    channel: Option<&NoiseChannel>,
    class_budget: f64,
    approx_error: f64,
    n: usize,
    a_n: usize,
) -> Result<Decomposition> {
    let lambda = spec.lipschitz_lambda();
    let k = spec.classes;
    let depth = net.depth();
    let d = net.input_dim();
    let beta = truth.beta_at(a_n);
    let cap = bound_terms(lambda, k, class_budget, depth, d, n, a_n, beta, 1.0);
    // The raw statistical cap is half of the headline bound terms.
    let statistical_cap = cap.statistical / 2.0 + cap.dependence / 2.0;

    let truth_predictor = |x: &[f64]| {
        SimplexLabel::new(softmax(&match truth {
            TruthModel::FiniteStates { kappa0, .. } => kappa0.value(x),
            TruthModel::UniformX { kappa0, .. } => kappa0.value(x),
        }))
        .expect("softmax")
    };
    let f_risk = expected_risk(net_predictor(net), spec, truth, channel)?;
    let f0_risk = expected_risk(truth_predictor, spec, truth, channel)?;
    let measured = (f_risk - f0_risk).abs();
    let total = 2.0 * statistical_cap + lambda * approx_error;
    Ok(Decomposition {
        statistical_cap,
        approximation_term: lambda * approx_error,
        measured_excess: measured,
        total_cap: total,
        ratio: measured / total,
        holds: measured <= total,
    })
}
