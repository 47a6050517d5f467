//! Desk-scale numerical laboratory for excess-risk bounds of ReLU-network
//! classifiers trained on noisy labels and dependent (β-mixing) samples.
//!
//! The crate builds every object the bounds talk about explicitly:
//!
//! * [`net`] — explicit ReLU networks with exact width/depth/size/norm
//!   accounting and the combinator calculus (compose, sum, pair).
//! * [`approx`] — the constructive approximation pipeline: hat functions,
//!   partitions of unity, product gadgets, local Taylor assembly, and the
//!   chart-composed variant for low-dimensional feature manifolds.
//! * [`loss`] — simplex-valued losses (ℓ_p, cross entropy, reverse cross
//!   entropy) with symmetry certification and Lipschitz audits.
//! * [`noise`] — label-corruption channels, channel-expected noisy risks,
//!   and noise-tolerance (argmin preservation) checks.
//! * [`mixing`] — finite-state stationary Markov chains with an exact
//!   β-mixing oracle, independent-block resampling, and the block-swap gap.
//! * [`risk`] — ERM training, Rademacher complexity estimation, bound-term
//!   evaluation, and excess-risk decomposition experiments.

pub mod approx;
pub mod error;
pub mod loss;
pub mod mixing;
pub mod net;
pub mod noise;
pub mod risk;
pub mod rng;

pub use error::{Error, Result};
