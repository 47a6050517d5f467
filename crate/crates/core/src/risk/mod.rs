//! ERM training, Rademacher complexity estimation, and excess-risk bound
//! evaluation.
//!
//! The bound evaluator is closed-form arithmetic over
//!
//! ```text
//! term1 = 8 λ √K · M √(D + 2 + ln d) / √(n·a_n)
//! term2 = 4 λ √K · n β_{a_n} / a_n
//! term3 =   λ √K · M^{−τ/(d+1)}
//! ```
//!
//! where the first two cap the statistical error of the empirical risk
//! minimizer over the norm-constrained class and the third caps the
//! approximation error. All terms are reproducible bit for bit from their
//! inputs.

mod experiment;
mod rademacher;
mod train;

pub use experiment::{
    decomposition_report, excess_risk_experiment, expected_risk, statistical_gap, Decomposition,
    ExcessRiskConfig, GridCell, RiskReport, TruthModel,
};
pub use rademacher::{rademacher_estimate, ClassSpec, RademacherEstimate};
pub use train::{
    predictions, train_erm, train_erm_with_objective, RiskObjective, TrainConfig, TrainableNetwork,
};

use serde::{Deserialize, Serialize};

/// The three summands of the excess-risk bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    pub statistical: f64,
    pub dependence: f64,
    pub approximation: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.statistical + self.dependence + self.approximation
    }
}

/// Evaluate the bound terms.
///
/// `lambda` is the softmax-composed Lipschitz constant of the loss, `classes`
/// is K, `budget` the class norm cap M, `depth` the hidden-layer count D,
/// `input_dim` d, `n = a_n·μ_n` the sample size, `beta_an` the β-mixing
/// coefficient at lag `a_n`, and `tau` the Hölder smoothness of the target.
#[allow(clippy::too_many_arguments)]
pub fn bound_terms(
    lambda: f64,
    classes: usize,
    budget: f64,
    depth: usize,
    input_dim: usize,
    n: usize,
    a_n: usize,
    beta_an: f64,
    tau: f64,
) -> BoundTerms {
    let sqrt_k = (classes as f64).sqrt();
    let cap = (depth as f64 + 2.0 + (input_dim as f64).ln()).sqrt();
    let statistical = 8.0 * lambda * sqrt_k * budget * cap / ((n as f64) * (a_n as f64)).sqrt();
    let dependence = 4.0 * lambda * sqrt_k * (n as f64) * beta_an / a_n as f64;
    let approximation = lambda * sqrt_k * budget.powf(-tau / (input_dim as f64 + 1.0));
    BoundTerms {
        statistical,
        dependence,
        approximation,
    }
}
