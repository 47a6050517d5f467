//! Simplex-valued loss functions with symmetry certification and
//! Lipschitz-type audits.
//!
//! Three families are implemented: the `ℓ_p` losses (`p ≥ 1`), cross
//! entropy, and reverse cross entropy. Composed with softmax, all three are
//! Lipschitz in the logits:
//!
//! ```text
//! |ℓ(softmax(a), q) − ℓ(softmax(b), q)| ≤ λ ‖a − b‖₂
//! ```
//!
//! with `λ = √2·K` for ℓ_p and cross entropy and `λ = −√2·K·A` for reverse
//! cross entropy, where `A < 0` is the value assigned to `log 0`.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from};

/// A point on the probability simplex in `R^K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexLabel(Vec<f64>);

impl SimplexLabel {
    /// Validate nonnegativity and unit sum (tolerance 1e-12).
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidValue("simplex label needs K >= 1".into()));
        }
        if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidValue(
                "simplex entries must be finite and >= 0".into(),
            ));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidValue(format!("simplex entries sum to {sum}")));
        }
        Ok(SimplexLabel(p))
    }

    /// One-hot vector `e_j` in `R^k`.
    pub fn one_hot(k: usize, j: usize) -> Self {
        assert!(j < k, "class index out of range");
        let mut p = vec![0.0; k];
        p[j] = 1.0;
        SimplexLabel(p)
    }

    /// Draw a uniform point on the simplex (normalized exponentials).
    pub fn sample_uniform(k: usize, rng: &mut impl rand::Rng) -> Self {
        let mut p: Vec<f64> = (0..k)
            .map(|_| -(rng.random_range(0.0_f64..1.0).max(f64::MIN_POSITIVE)).ln())
            .collect();
        let sum: f64 = p.iter().sum();
        for v in &mut p {
            *v /= sum;
        }
        SimplexLabel(p)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Index of the unit entry, if the label is exactly one-hot.
    pub fn hot_index(&self) -> Option<usize> {
        let mut hot = None;
        for (i, &v) in self.0.iter().enumerate() {
            if v == 1.0 {
                if hot.is_some() {
                    return None;
                }
                hot = Some(i);
            } else if v != 0.0 {
                return None;
            }
        }
        hot
    }
}

/// Loss family selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossKind {
    /// `‖pred − label‖_p`, `p ≥ 1`.
    Lp { p: f64 },
    /// `−Σ label_i · ln pred_i`.
    CrossEntropy,
    /// `−Σ pred_i · log_A(label_i)` with `log_A(t) = max(ln t, A)`, `A < 0`.
    ReverseCrossEntropy { a: f64 },
}

/// A loss family instantiated for `K` classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    pub classes: usize,
}

/// Default `log 0` value for reverse cross entropy.
pub const DEFAULT_REVERSE_CE_A: f64 = -4.0;

impl LossSpec {
    pub fn lp(p: f64, classes: usize) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidValue(format!(
                "lp loss needs p >= 1, got {p}"
            )));
        }
        Ok(LossSpec {
            kind: LossKind::Lp { p },
            classes,
        })
    }

    pub fn l1(classes: usize) -> Self {
        LossSpec {
            kind: LossKind::Lp { p: 1.0 },
            classes,
        }
    }

    pub fn cross_entropy(classes: usize) -> Self {
        LossSpec {
            kind: LossKind::CrossEntropy,
            classes,
        }
    }

    pub fn reverse_cross_entropy(a: f64, classes: usize) -> Result<Self> {
        if !a.is_finite() || a >= 0.0 {
            return Err(Error::InvalidValue(format!(
                "reverse CE needs A < 0, got {a}"
            )));
        }
        Ok(LossSpec {
            kind: LossKind::ReverseCrossEntropy { a },
            classes,
        })
    }

    /// λ such that the softmax-composed loss is λ-Lipschitz in the logits.
    pub fn lipschitz_lambda(&self) -> f64 {
        let k = self.classes as f64;
        match self.kind {
            LossKind::Lp { .. } | LossKind::CrossEntropy => std::f64::consts::SQRT_2 * k,
            LossKind::ReverseCrossEntropy { a } => -std::f64::consts::SQRT_2 * k * a,
        }
    }

    /// True if the family satisfies the symmetry identity
    /// `Σ_j ℓ(f, e_j) = C₀` by construction.
    pub fn is_symmetric(&self) -> bool {
        match self.kind {
            LossKind::Lp { p } => p == 1.0,
            LossKind::CrossEntropy => false,
            LossKind::ReverseCrossEntropy { .. } => true,
        }
    }

    /// Closed-form symmetry constant, where one exists.
    pub fn symmetry_constant_closed_form(&self) -> Option<f64> {
        let k = self.classes as f64;
        match self.kind {
            LossKind::Lp { p } => (p == 1.0).then_some(2.0 * (k - 1.0)),
            LossKind::ReverseCrossEntropy { a } => Some(-a * (k - 1.0)),
            _ => None,
        }
    }
}

/// Result of a loss evaluation; `clamped` flags a cross-entropy evaluation
/// that hit the probability floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossValue {
    pub value: f64,
    pub clamped: bool,
}

/// Floor applied to predicted probabilities inside cross entropy.
const CE_PROB_FLOOR: f64 = 1e-300;

/// Evaluate `ℓ(prediction, label)`.
pub fn loss(spec: &LossSpec, prediction: &SimplexLabel, label: &SimplexLabel) -> LossValue {
    debug_assert_eq!(prediction.dim(), spec.classes);
    debug_assert_eq!(label.dim(), spec.classes);
    let (p, q) = (prediction.as_slice(), label.as_slice());
    match spec.kind {
        LossKind::Lp { p: ord } => {
            let value = if ord == 1.0 {
                p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
            } else {
                p.iter()
                    .zip(q)
                    .map(|(a, b)| (a - b).abs().powf(ord))
                    .sum::<f64>()
                    .powf(1.0 / ord)
            };
            LossValue {
                value,
                clamped: false,
            }
        }
        LossKind::CrossEntropy => {
            let mut clamped = false;
            let mut value = 0.0;
            for (pi, qi) in p.iter().zip(q) {
                if *qi == 0.0 {
                    continue;
                }
                let mut prob = *pi;
                if prob < CE_PROB_FLOOR {
                    prob = CE_PROB_FLOOR;
                    clamped = true;
                }
                value -= qi * prob.ln();
            }
            LossValue { value, clamped }
        }
        LossKind::ReverseCrossEntropy { a } => {
            let value = -p
                .iter()
                .zip(q)
                .map(|(pi, qi)| pi * log_floored(*qi, a))
                .sum::<f64>();
            LossValue {
                value,
                clamped: false,
            }
        }
    }
}

/// `log_A(t) = max(ln t, A)`: the `log 0 = A` convention, extended so that
/// `|log_A| ≤ −A` on [0, 1]. This keeps the reverse-CE Lipschitz constant
/// valid for interior simplex labels, not only one-hot ones.
fn log_floored(t: f64, a: f64) -> f64 {
    if t == 0.0 {
        a
    } else {
        t.ln().max(a)
    }
}

/// Certify the symmetry identity on a sample of prediction values: returns
/// `Σ_j ℓ(pred, e_j)` if it is constant across the sample within 1e-9.
pub fn symmetry_constant(spec: &LossSpec, f_values: &[SimplexLabel]) -> Option<f64> {
    let k = spec.classes;
    let mut sums = f_values.iter().map(|pred| {
        (0..k)
            .map(|j| loss(spec, pred, &SimplexLabel::one_hot(k, j)).value)
            .sum::<f64>()
    });
    let first = sums.next()?;
    if sums.all(|s| (s - first).abs() <= 1e-9) {
        Some(first)
    } else {
        None
    }
}

/// Outcome of a Lipschitz audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LipschitzAudit {
    pub classes: usize,
    pub trials: usize,
    pub max_ratio: f64,
    pub bound: f64,
    pub pass: bool,
    pub seed: u64,
}

/// Sample logit pairs and simplex labels, and compare the observed
/// difference quotients of the softmax-composed loss against λ.
///
/// Logits are standard normal scaled by 3 to exercise saturated-softmax
/// regions; pairs with `‖a−b‖₂` below 1e-12 are skipped.
pub fn lipschitz_audit(spec: &LossSpec, trials: usize, seed: u64) -> LipschitzAudit {
    let k = spec.classes;
    let bound = spec.lipschitz_lambda();
    let chunk = 4096;
    let chunks: Vec<(usize, usize)> = (0..trials.div_ceil(chunk))
        .map(|i| (i, chunk.min(trials - i * chunk)))
        .collect();
    let max_ratio = chunks
        .par_iter()
        .map(|&(i, len)| {
            let mut rng = rng_from(derive_seed(seed, "lipschitz", i as u64));
            let mut worst = 0.0_f64;
            for _ in 0..len {
                let a: Vec<f64> = (0..k)
                    .map(|_| {
                        3.0 * <StandardNormal as Distribution<f64>>::sample(
                            &StandardNormal,
                            &mut rng,
                        )
                    })
                    .collect();
                let b: Vec<f64> = (0..k)
                    .map(|_| {
                        3.0 * <StandardNormal as Distribution<f64>>::sample(
                            &StandardNormal,
                            &mut rng,
                        )
                    })
                    .collect();
                let q = SimplexLabel::sample_uniform(k, &mut rng);
                let dist = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                if dist < 1e-12 {
                    continue;
                }
                let sa = SimplexLabel::new(crate::net::softmax(&a)).expect("softmax on simplex");
                let sb = SimplexLabel::new(crate::net::softmax(&b)).expect("softmax on simplex");
                let diff = (loss(spec, &sa, &q).value - loss(spec, &sb, &q).value).abs();
                worst = worst.max(diff / dist);
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    LipschitzAudit {
        classes: k,
        trials,
        max_ratio,
        bound,
        pass: max_ratio <= bound,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex(v: &[f64]) -> SimplexLabel {
        SimplexLabel::new(v.to_vec()).unwrap()
    }

    #[test]
    fn simplex_validation() {
        assert!(SimplexLabel::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexLabel::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexLabel::new(vec![-0.1, 1.1]).is_err());
        assert_eq!(SimplexLabel::one_hot(3, 1).hot_index(), Some(1));
        assert_eq!(simplex(&[0.5, 0.5]).hot_index(), None);
    }

    #[test]
    fn zero_loss_at_equal_interior_points() {
        let p = simplex(&[0.3, 0.7]);
        for spec in [LossSpec::l1(2), LossSpec::lp(2.0, 2).unwrap()] {
            assert_eq!(loss(&spec, &p, &p).value, 0.0);
        }
        // CE at pred == label equals the label entropy.
        let ce = LossSpec::cross_entropy(2);
        let want = -(0.3_f64 * 0.3_f64.ln() + 0.7 * 0.7_f64.ln());
        assert!((loss(&ce, &p, &p).value - want).abs() < 1e-15);
    }

    #[test]
    fn l1_hand_example() {
        let spec = LossSpec::l1(2);
        let v = loss(&spec, &simplex(&[0.5, 0.5]), &SimplexLabel::one_hot(2, 0));
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn reverse_ce_hand_example() {
        let spec = LossSpec::reverse_cross_entropy(-4.0, 2).unwrap();
        let v = loss(&spec, &simplex(&[0.5, 0.5]), &SimplexLabel::one_hot(2, 0));
        assert!((v.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ce_clamps_zero_predictions() {
        let spec = LossSpec::cross_entropy(2);
        let v = loss(&spec, &simplex(&[0.0, 1.0]), &SimplexLabel::one_hot(2, 0));
        assert!(v.clamped);
        assert!(v.value.is_finite() && v.value > 600.0);
    }

    #[test]
    fn symmetry_constants_match_closed_forms() {
        let mut rng = rng_from(9);
        for k in [2usize, 3, 5] {
            let preds: Vec<SimplexLabel> = (0..100)
                .map(|_| SimplexLabel::sample_uniform(k, &mut rng))
                .collect();

            let l1 = LossSpec::l1(k);
            let c0 = symmetry_constant(&l1, &preds).expect("l1 is symmetric");
            assert!((c0 - 2.0 * (k as f64 - 1.0)).abs() < 1e-12);
            assert_eq!(
                l1.symmetry_constant_closed_form(),
                Some(2.0 * (k as f64 - 1.0))
            );

            let rce = LossSpec::reverse_cross_entropy(-4.0, k).unwrap();
            let c0 = symmetry_constant(&rce, &preds).expect("reverse CE is symmetric");
            assert!((c0 - 4.0 * (k as f64 - 1.0)).abs() < 1e-12);

            let ce = LossSpec::cross_entropy(k);
            assert_eq!(symmetry_constant(&ce, &preds), None);
        }
    }

    #[test]
    fn nonnegativity() {
        let mut rng = rng_from(21);
        for _ in 0..500 {
            let p = SimplexLabel::sample_uniform(3, &mut rng);
            let q = SimplexLabel::sample_uniform(3, &mut rng);
            assert!(loss(&LossSpec::l1(3), &p, &q).value >= 0.0);
            assert!(loss(&LossSpec::lp(2.0, 3).unwrap(), &p, &q).value >= 0.0);
            assert!(loss(&LossSpec::cross_entropy(3), &p, &q).value >= 0.0);
            let rce = LossSpec::reverse_cross_entropy(-4.0, 3).unwrap();
            assert!(loss(&rce, &p, &q).value >= 0.0);
        }
    }

    #[test]
    fn lipschitz_audit_small() {
        for spec in [
            LossSpec::l1(3),
            LossSpec::cross_entropy(3),
            LossSpec::reverse_cross_entropy(-4.0, 3).unwrap(),
        ] {
            let audit = lipschitz_audit(&spec, 5_000, 7);
            assert!(
                audit.pass,
                "{spec:?}: ratio {} > {}",
                audit.max_ratio, audit.bound
            );
            assert!(audit.max_ratio > 0.0);
        }
    }

    #[test]
    fn lambda_values() {
        assert!(
            (LossSpec::l1(3).lipschitz_lambda() - 3.0 * std::f64::consts::SQRT_2).abs() < 1e-15
        );
        let rce = LossSpec::reverse_cross_entropy(-4.0, 2).unwrap();
        assert!((rce.lipschitz_lambda() - 8.0 * std::f64::consts::SQRT_2).abs() < 1e-15);
    }
}
