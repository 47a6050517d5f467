//! Label-corruption channels, channel-expected noisy risks, and
//! noise-tolerance verification.
//!
//! A channel is a K×K column-stochastic matrix `η` with
//! `η[i][j] = Prob(Y^η = e_i | Y = e_j)`. For a symmetric loss and the
//! uniform channel with flip mass `η ∈ (0, 1/K]`, the channel-expected noisy
//! empirical risk is an affine increasing function of the clean one,
//!
//! ```text
//! L^η_n(f) = C₀ η + (1 − ηK) L_n(f),
//! ```
//!
//! so clean and noisy empirical minimizers coincide. Both the affine
//! identity and the argmin preservation are checked here at the channel
//! expectation level, which makes the checks deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::{loss, LossSpec, SimplexLabel};
use crate::rng::rng_from;

/// K×K column-stochastic label-corruption matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseChannel {
    classes: usize,
    /// Row-major, `eta[i][j] = Prob(Y^η = e_i | Y = e_j)`.
    eta: Vec<f64>,
}

impl NoiseChannel {
    /// Build from a row-major K×K matrix; columns must sum to 1.
    pub fn new(classes: usize, eta: Vec<f64>) -> Result<Self> {
        if classes == 0 || eta.len() != classes * classes {
            return Err(Error::DimensionMismatch(
                "channel matrix must be K x K".into(),
            ));
        }
        if eta.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::InvalidValue(
                "channel entries must lie in [0, 1]".into(),
            ));
        }
        for j in 0..classes {
            let col: f64 = (0..classes).map(|i| eta[i * classes + j]).sum();
            if (col - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidValue(format!("column {j} sums to {col}")));
            }
        }
        Ok(NoiseChannel { classes, eta })
    }

    /// Identity channel: labels pass through unchanged (the η = 0 limit).
    pub fn identity(classes: usize) -> Self {
        let mut eta = vec![0.0; classes * classes];
        for i in 0..classes {
            eta[i * classes + i] = 1.0;
        }
        NoiseChannel { classes, eta }
    }

    /// Uniform channel: every off-diagonal entry equals `eta`, diagonal
    /// `1 − (K−1)η`. Valid for `η ∈ (0, 1/K]`.
    pub fn uniform(classes: usize, eta: f64) -> Result<Self> {
        let k = classes as f64;
        if !(eta > 0.0 && eta <= 1.0 / k) {
            return Err(Error::InvalidValue(format!(
                "uniform channel needs eta in (0, 1/K], got {eta} for K = {classes}"
            )));
        }
        let mut m = vec![eta; classes * classes];
        for i in 0..classes {
            m[i * classes + i] = 1.0 - (k - 1.0) * eta;
        }
        NoiseChannel::new(classes, m)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn prob(&self, observed: usize, truth: usize) -> f64 {
        self.eta[observed * self.classes + truth]
    }

    /// Flip mass of a uniform channel, if the matrix has that shape.
    pub fn uniform_rate(&self) -> Option<f64> {
        let off = self.prob(0, 1);
        for i in 0..self.classes {
            for j in 0..self.classes {
                let want = if i == j {
                    1.0 - (self.classes as f64 - 1.0) * off
                } else {
                    off
                };
                if (self.prob(i, j) - want).abs() > 1e-12 {
                    return None;
                }
            }
        }
        Some(off)
    }

    /// Sample a noisy class for a clean class `truth`.
    pub fn sample(&self, truth: usize, rng: &mut impl rand::Rng) -> usize {
        let u: f64 = rng.random_range(0.0..1.0);
        let mut acc = 0.0;
        for i in 0..self.classes {
            acc += self.prob(i, truth);
            if u < acc {
                return i;
            }
        }
        self.classes - 1
    }
}

/// Feature/label pairs with optional noisy labels. Labels are one-hot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<SimplexLabel>,
    pub noisy_labels: Option<Vec<SimplexLabel>>,
}

impl LabeledDataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<SimplexLabel>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch(
                "points and labels differ in length".into(),
            ));
        }
        if let Some(first) = points.first() {
            let d = first.len();
            if points.iter().any(|p| p.len() != d) {
                return Err(Error::DimensionMismatch("inconsistent feature dims".into()));
            }
        }
        if let Some(first) = labels.first() {
            let k = first.dim();
            if labels.iter().any(|l| l.dim() != k) {
                return Err(Error::DimensionMismatch("inconsistent label dims".into()));
            }
            if labels.iter().any(|l| l.hot_index().is_none()) {
                return Err(Error::InvalidValue("dataset labels must be one-hot".into()));
            }
        }
        Ok(LabeledDataset {
            points,
            labels,
            noisy_labels: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Sample noisy labels through the channel, independently per point.
pub fn corrupt(channel: &NoiseChannel, data: &LabeledDataset, seed: u64) -> LabeledDataset {
    let mut rng = rng_from(seed);
    let k = channel.classes();
    let noisy = data
        .labels
        .iter()
        .map(|y| {
            let j = y.hot_index().expect("dataset labels are one-hot");
            SimplexLabel::one_hot(k, channel.sample(j, &mut rng))
        })
        .collect();
    LabeledDataset {
        points: data.points.clone(),
        labels: data.labels.clone(),
        noisy_labels: Some(noisy),
    }
}

/// Clean empirical risk of precomputed predictions.
pub fn empirical_risk(
    spec: &LossSpec,
    predictions: &[SimplexLabel],
    labels: &[SimplexLabel],
) -> f64 {
    assert_eq!(predictions.len(), labels.len());
    let n = predictions.len() as f64;
    predictions
        .iter()
        .zip(labels)
        .map(|(p, y)| loss(spec, p, y).value)
        .sum::<f64>()
        / n
}

/// Channel-expected noisy empirical risk:
/// `(1/n) Σ_i Σ_j Prob(e_j | y_i) ℓ(f(x_i), e_j)`. Deterministic; no
/// sampling is involved.
pub fn exact_noisy_empirical_risk(
    spec: &LossSpec,
    predictions: &[SimplexLabel],
    labels: &[SimplexLabel],
    channel: &NoiseChannel,
) -> f64 {
    assert_eq!(predictions.len(), labels.len());
    let k = channel.classes();
    let n = predictions.len() as f64;
    let mut total = 0.0;
    for (pred, y) in predictions.iter().zip(labels) {
        let truth = y.hot_index().expect("dataset labels are one-hot");
        for j in 0..k {
            let p = channel.prob(j, truth);
            if p > 0.0 {
                total += p * loss(spec, pred, &SimplexLabel::one_hot(k, j)).value;
            }
        }
    }
    total / n
}

/// A finite hypothesis: one precomputed prediction per data point.
pub type Hypothesis = Vec<SimplexLabel>;

/// Verdict of an argmin-preservation check over a finite hypothesis grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToleranceVerdict {
    /// Indices minimizing the clean empirical risk (within tolerance).
    pub clean_minimizers: Vec<usize>,
    /// Indices minimizing the channel-expected noisy empirical risk.
    pub noisy_minimizers: Vec<usize>,
    pub clean_min: f64,
    pub noisy_min: f64,
    /// `1 − ηK` for the uniform channel; zero slope makes every hypothesis
    /// a noisy minimizer.
    pub affine_slope: Option<f64>,
    pub pass: bool,
}

/// Relative tolerance used to call two risks tied.
const TIE_TOL: f64 = 1e-12;

fn minimizer_set(risks: &[f64]) -> (Vec<usize>, f64) {
    let min = risks.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = TIE_TOL * min.abs().max(1.0);
    let set = risks
        .iter()
        .enumerate()
        .filter(|(_, r)| **r <= min + tol)
        .map(|(i, _)| i)
        .collect();
    (set, min)
}

/// Compare argmin sets of clean and channel-expected noisy risks over a
/// finite hypothesis grid.
///
/// For a uniform channel with `η < 1/K` the verdict requires the two sets to
/// coincide. At the boundary `η = 1/K` the noisy risk is constant, so the
/// check degrades to containment of the clean minimizers.
pub fn tolerance_check(
    spec: &LossSpec,
    hypothesis_grid: &[Hypothesis],
    data: &LabeledDataset,
    channel: &NoiseChannel,
) -> Result<ToleranceVerdict> {
    if hypothesis_grid.is_empty() {
        return Err(Error::InvalidValue("empty hypothesis grid".into()));
    }
    let clean: Vec<f64> = hypothesis_grid
        .iter()
        .map(|h| empirical_risk(spec, h, &data.labels))
        .collect();
    let noisy: Vec<f64> = hypothesis_grid
        .iter()
        .map(|h| exact_noisy_empirical_risk(spec, h, &data.labels, channel))
        .collect();
    let (clean_set, clean_min) = minimizer_set(&clean);
    let (noisy_set, noisy_min) = minimizer_set(&noisy);

    let slope = channel
        .uniform_rate()
        .map(|eta| 1.0 - eta * channel.classes() as f64);
    let boundary = matches!(slope, Some(s) if s.abs() <= 1e-12);
    let pass = if boundary {
        clean_set.iter().all(|i| noisy_set.contains(i))
    } else {
        clean_set == noisy_set
    };
    Ok(ToleranceVerdict {
        clean_minimizers: clean_set,
        noisy_minimizers: noisy_set,
        clean_min,
        noisy_min,
        affine_slope: slope,
        pass,
    })
}
