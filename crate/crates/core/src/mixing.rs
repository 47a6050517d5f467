//! Strictly stationary finite-state Markov chains with a computable
//! β-mixing oracle, independent-block resampling, and the block-swap gap.
//!
//! For a stationary Markov chain conditioning on the past collapses to the
//! current state, so the lag-`s` coefficient reduces to total variation:
//!
//! ```text
//! β_s = Σ_i π_i · (1/2) Σ_j |(T^s)_ij − π_j|
//! ```
//!
//! which this module computes exactly from the transition matrix. The
//! reduction is Markov-specific; β from data alone is out of scope.
//!
//! Block machinery follows the 2n-point convention: a path of length
//! `2·a_n·μ_n` is split into `2μ_n` blocks of length `a_n`; the odd blocks
//! `G_j` are kept and compared against freshly drawn independent blocks with
//! the same within-block law.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::SimplexLabel;
use crate::rng::{derive_seed, rng_from, Rng};

/// Per-state emission: a feature vector and a one-hot label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Emission {
    pub x: Vec<f64>,
    pub y: SimplexLabel,
}

/// Finite-state stationary Markov chain with deterministic per-state
/// emissions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixingChain {
    /// Row-stochastic transition matrix, row-major.
    transition: Vec<f64>,
    stationary: Vec<f64>,
    emissions: Vec<Emission>,
}

impl MixingChain {
    /// Build a chain; the stationary distribution is computed from the
    /// transition matrix and validated to satisfy `π T = π` within 1e-12.
    pub fn new(transition: Vec<f64>, emissions: Vec<Emission>) -> Result<Self> {
        let m = emissions.len();
        if m == 0 || transition.len() != m * m {
            return Err(Error::DimensionMismatch(
                "transition must be m x m for m emissions".into(),
            ));
        }
        for i in 0..m {
            let row: f64 = transition[i * m..(i + 1) * m].iter().sum();
            if (row - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidValue(format!("row {i} sums to {row}")));
            }
            if transition[i * m..(i + 1) * m].iter().any(|p| *p < 0.0) {
                return Err(Error::InvalidValue(
                    "negative transition probability".into(),
                ));
            }
        }
        let stationary = stationary_distribution(&transition, m)?;
        let residual = stationary_residual(&transition, &stationary, m);
        if residual > 1e-12 {
            return Err(Error::InvalidValue(format!(
                "stationary residual {residual} exceeds 1e-12"
            )));
        }
        Ok(MixingChain {
            transition,
            stationary,
            emissions,
        })
    }

    /// Two-state chain with stay probability `p` and the given emissions.
    pub fn two_state_sticky(p: f64, emissions: [Emission; 2]) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidValue(
                "stay probability must be in [0,1]".into(),
            ));
        }
        MixingChain::new(vec![p, 1.0 - p, 1.0 - p, p], emissions.to_vec())
    }

    /// I.i.d. chain: every row equals the given distribution.
    pub fn iid(probs: &[f64], emissions: Vec<Emission>) -> Result<Self> {
        let m = probs.len();
        let mut t = Vec::with_capacity(m * m);
        for _ in 0..m {
            t.extend_from_slice(probs);
        }
        MixingChain::new(t, emissions)
    }

    pub fn states(&self) -> usize {
        self.emissions.len()
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn transition(&self, from: usize, to: usize) -> f64 {
        self.transition[from * self.states() + to]
    }

    pub fn emission(&self, state: usize) -> &Emission {
        &self.emissions[state]
    }

    fn sample_from(&self, probs: &[f64], rng: &mut Rng) -> usize {
        let u: f64 = rng.random_range(0.0..1.0);
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// Sample a state path of the given length, started from the stationary
    /// distribution (strict stationarity).
    pub fn sample_states(&self, length: usize, seed: u64) -> Vec<usize> {
        let mut rng = rng_from(seed);
        let mut out = Vec::with_capacity(length);
        if length == 0 {
            return out;
        }
        let m = self.states();
        let mut s = self.sample_from(&self.stationary, &mut rng);
        out.push(s);
        for _ in 1..length {
            s = self.sample_from(&self.transition[s * m..(s + 1) * m], &mut rng);
            out.push(s);
        }
        out
    }

    /// Sample an emitted path `(x_t, y_t)`.
    pub fn sample_path(&self, length: usize, seed: u64) -> Vec<Emission> {
        self.sample_states(length, seed)
            .into_iter()
            .map(|s| self.emissions[s].clone())
            .collect()
    }

    /// True if every transition row is (bitwise) the same distribution, i.e.
    /// the chain draws i.i.d. states.
    pub fn is_iid(&self) -> bool {
        let m = self.states();
        let first = &self.transition[0..m];
        self.transition.chunks(m).all(|row| row == first)
    }

    /// Exact β-mixing coefficients for lags `1..=max_lag`.
    ///
    /// For an i.i.d. chain the coefficients are exactly zero; that case is
    /// detected structurally so no linear-algebra rounding leaks in.
    pub fn beta_coefficients(&self, max_lag: usize) -> BetaProfile {
        if self.is_iid() {
            return BetaProfile {
                coefficients: (1..=max_lag)
                    .map(|lag| BetaCoefficient { lag, beta: 0.0 })
                    .collect(),
            };
        }
        let m = self.states();
        let mut power = self.transition.clone();
        let mut coefficients = Vec::with_capacity(max_lag);
        for s in 1..=max_lag {
            if s > 1 {
                power = mat_mul(&power, &self.transition, m);
            }
            let mut beta = 0.0;
            for i in 0..m {
                let tv: f64 = (0..m)
                    .map(|j| (power[i * m + j] - self.stationary[j]).abs())
                    .sum::<f64>()
                    / 2.0;
                beta += self.stationary[i] * tv;
            }
            coefficients.push(BetaCoefficient { lag: s, beta });
        }
        BetaProfile { coefficients }
    }
}

fn mat_mul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for k in 0..m {
            let aik = a[i * m + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i * m + j] += aik * b[k * m + j];
            }
        }
    }
    out
}

/// Solve `π T = π`, `Σ π = 1` by Gaussian elimination on `(Tᵀ − I)`.
fn stationary_distribution(t: &[f64], m: usize) -> Result<Vec<f64>> {
    // Rows 0..m-1: (Tᵀ − I) π = 0 with the last equation replaced by Σπ = 1.
    let mut a = vec![0.0; m * (m + 1)];
    for i in 0..m {
        for j in 0..m {
            a[i * (m + 1) + j] = t[j * m + i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..m {
        a[(m - 1) * (m + 1) + j] = 1.0;
    }
    a[(m - 1) * (m + 1) + m] = 1.0;

    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&r1, &r2| {
                a[r1 * (m + 1) + col]
                    .abs()
                    .total_cmp(&a[r2 * (m + 1) + col].abs())
            })
            .unwrap();
        if a[pivot * (m + 1) + col].abs() < 1e-14 {
            return Err(Error::InvalidValue(
                "transition matrix has no unique stationary distribution".into(),
            ));
        }
        for j in 0..=m {
            a.swap(col * (m + 1) + j, pivot * (m + 1) + j);
        }
        let inv = 1.0 / a[col * (m + 1) + col];
        for j in col..=m {
            a[col * (m + 1) + j] *= inv;
        }
        for r in 0..m {
            if r != col {
                let f = a[r * (m + 1) + col];
                if f != 0.0 {
                    for j in col..=m {
                        a[r * (m + 1) + j] -= f * a[col * (m + 1) + j];
                    }
                }
            }
        }
    }
    let mut pi: Vec<f64> = (0..m).map(|i| a[i * (m + 1) + m].max(0.0)).collect();
    let sum: f64 = pi.iter().sum();
    for p in &mut pi {
        *p /= sum;
    }
    Ok(pi)
}

fn stationary_residual(t: &[f64], pi: &[f64], m: usize) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..m {
        let v: f64 = (0..m).map(|i| pi[i] * t[i * m + j]).sum();
        worst = worst.max((v - pi[j]).abs());
    }
    worst
}

/// Block bookkeeping: `n = a_n · μ_n` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockScheme {
    pub block_len: usize,
    pub block_count: usize,
}

impl BlockScheme {
    pub fn new(block_len: usize, block_count: usize) -> Result<Self> {
        if block_len == 0 || block_count == 0 {
            return Err(Error::InvalidValue(
                "block scheme needs positive sizes".into(),
            ));
        }
        Ok(BlockScheme {
            block_len,
            block_count,
        })
    }

    /// `n = a_n μ_n`.
    pub fn n(&self) -> usize {
        self.block_len * self.block_count
    }

    /// Factor `n` with the given block length; errors if it does not divide.
    pub fn for_n(n: usize, block_len: usize) -> Result<Self> {
        if block_len == 0 || !n.is_multiple_of(block_len) {
            return Err(Error::InvalidValue(format!(
                "block length {block_len} does not divide n = {n}"
            )));
        }
        BlockScheme::new(block_len, n / block_len)
    }
}

/// One β coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaCoefficient {
    pub lag: usize,
    pub beta: f64,
}

/// β coefficients over a range of lags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaProfile {
    pub coefficients: Vec<BetaCoefficient>,
}

impl BetaProfile {
    pub fn beta(&self, lag: usize) -> Option<f64> {
        self.coefficients
            .iter()
            .find(|c| c.lag == lag)
            .map(|c| c.beta)
    }
}

/// Odd-block view of a 2n path plus a freshly sampled independent-block
/// sequence with the same within-block law.
#[derive(Debug, Clone)]
pub struct IndependentBlocks<T> {
    /// `G_j` blocks of the original path, `j = 1..=μ_n`.
    pub odd_blocks: Vec<Vec<T>>,
    /// Independent blocks: each is a fresh stationary path of length `a_n`.
    pub independent: Vec<Vec<T>>,
}

/// Extract the odd blocks `G_j = [2(j−1)a_n, (2j−1)a_n)` of `path`
/// (0-indexed) and draw `μ_n` mutually independent fresh blocks.
pub fn independent_blocks(
    chain: &MixingChain,
    path: &[usize],
    scheme: &BlockScheme,
    seed: u64,
) -> Result<IndependentBlocks<usize>> {
    let (a, mu) = (scheme.block_len, scheme.block_count);
    if path.len() != 2 * a * mu {
        return Err(Error::DimensionMismatch(format!(
            "path length {} != 2 a_n mu_n = {}",
            path.len(),
            2 * a * mu
        )));
    }
    let odd_blocks = (0..mu)
        .map(|j| path[2 * j * a..(2 * j + 1) * a].to_vec())
        .collect();
    let independent = (0..mu)
        .map(|j| chain.sample_states(a, derive_seed(seed, "ib-block", j as u64)))
        .collect();
    Ok(IndependentBlocks {
        odd_blocks,
        independent,
    })
}

/// Monte-Carlo estimate of `|E g(odd blocks) − E g(IB blocks)|` together
/// with the theoretical cap `M̃ (μ_n − 1) β_{a_n}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockSwapGap {
    pub gap_estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub beta: f64,
    pub pass: bool,
}

/// Estimate the block-swap gap for a bounded functional `g` of a block
/// sequence (`|g| ≤ g_bound`).
///
/// `pass` holds iff `|gap| ≤ bound + 3·(combined standard error)`.
pub fn block_swap_gap<G>(
    g: &G,
    g_bound: f64,
    chain: &MixingChain,
    scheme: &BlockScheme,
    trials: usize,
    seed: u64,
) -> Result<BlockSwapGap>
where
    G: Fn(&[Vec<usize>]) -> f64 + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidValue("need at least one trial".into()));
    }
    let samples: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let path =
                chain.sample_states(2 * scheme.n(), derive_seed(seed, "swap-path", t as u64));
            let ib =
                independent_blocks(chain, &path, scheme, derive_seed(seed, "swap-ib", t as u64))
                    .expect("path length matches scheme");
            let orig = g(&ib.odd_blocks);
            let fresh = g(&ib.independent);
            debug_assert!(orig.abs() <= g_bound + 1e-9 && fresh.abs() <= g_bound + 1e-9);
            (orig, fresh)
        })
        .collect();

    let n = trials as f64;
    let mean_orig: f64 = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_ib: f64 = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let var_orig: f64 = samples
        .iter()
        .map(|s| (s.0 - mean_orig).powi(2))
        .sum::<f64>()
        / n;
    let var_ib: f64 = samples.iter().map(|s| (s.1 - mean_ib).powi(2)).sum::<f64>() / n;
    let std_error = ((var_orig + var_ib) / n).sqrt();

    let beta = chain
        .beta_coefficients(scheme.block_len)
        .beta(scheme.block_len)
        .expect("beta at a_n");
    let bound = g_bound * (scheme.block_count as f64 - 1.0) * beta;
    let gap = (mean_orig - mean_ib).abs();
    Ok(BlockSwapGap {
        gap_estimate: gap,
        std_error,
        bound,
        beta,
        pass: gap <= bound + 3.0 * std_error,
    })
}

/// Demo emissions: states laid out on a ring in `[0,1]^2` with alternating
/// one-hot labels.
pub fn ring_emissions(states: usize, classes: usize) -> Vec<Emission> {
    (0..states)
        .map(|s| {
            let angle = 2.0 * std::f64::consts::PI * s as f64 / states as f64;
            Emission {
                x: vec![0.5 + 0.4 * angle.cos(), 0.5 + 0.4 * angle.sin()],
                y: SimplexLabel::one_hot(classes, s % classes),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(p: f64) -> MixingChain {
        MixingChain::two_state_sticky(
            p,
            [
                Emission {
                    x: vec![0.2, 0.2],
                    y: SimplexLabel::one_hot(2, 0),
                },
                Emission {
                    x: vec![0.8, 0.8],
                    y: SimplexLabel::one_hot(2, 1),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn stationary_solves_pi_t_eq_pi() {
        let chain = MixingChain::new(
            vec![0.2, 0.3, 0.5, 0.8, 0.1, 0.1, 0.3, 0.3, 0.4],
            ring_emissions(3, 2),
        )
        .unwrap();
        let pi = chain.stationary();
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(stationary_residual(&chain.transition, pi, 3) <= 1e-12);
    }

    #[test]
    fn single_state_chain_is_constant() {
        let chain = MixingChain::new(vec![1.0], ring_emissions(1, 2)).unwrap();
        let path = chain.sample_states(100, 1);
        assert!(path.iter().all(|&s| s == 0));
    }

    #[test]
    fn iid_chain_has_zero_beta() {
        let chain = MixingChain::iid(&[0.3, 0.7], ring_emissions(2, 2)).unwrap();
        let profile = chain.beta_coefficients(10);
        for c in &profile.coefficients {
            assert_eq!(c.beta, 0.0, "beta at lag {} is {}", c.lag, c.beta);
        }
    }

    #[test]
    fn sticky_chain_beta_matches_eigen_decay() {
        // beta_s = |2p − 1|^s / 2 for the symmetric two-state chain.
        for p in [0.6, 0.9, 0.97] {
            let chain = two_state(p);
            let profile = chain.beta_coefficients(20);
            for c in &profile.coefficients {
                let want = (2.0 * p - 1.0_f64).abs().powi(c.lag as i32) / 2.0;
                assert!(
                    (c.beta - want).abs() <= 1e-10,
                    "p={p} lag={}: {} vs {}",
                    c.lag,
                    c.beta,
                    want
                );
            }
        }
    }

    #[test]
    fn beta_profile_non_increasing() {
        let chain = two_state(0.85);
        let profile = chain.beta_coefficients(20);
        for w in profile.coefficients.windows(2) {
            assert!(w[1].beta <= w[0].beta + 1e-12);
            assert!(w[0].beta <= 1.0 && w[1].beta >= 0.0);
        }
    }

    #[test]
    fn lag_one_autocorrelation_tracks_second_eigenvalue() {
        // State autocorrelation of the symmetric 2-state chain is 2p − 1.
        let chain = two_state(0.9);
        let states = chain.sample_states(200_000, 42);
        let vals: Vec<f64> = states.iter().map(|&s| s as f64).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        let cov = vals
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum::<f64>()
            / (vals.len() - 1) as f64;
        assert!((cov / var - 0.8).abs() < 0.01, "autocorr {}", cov / var);
    }

    #[test]
    fn stationarity_of_marginals() {
        // Frequencies at fixed positions across many paths match pi.
        let chain = two_state(0.8);
        let paths = 10_000;
        let len = 33;
        let mut counts = [[0usize; 2]; 3];
        let positions = [0usize, len / 2, len - 1];
        for p in 0..paths {
            let states = chain.sample_states(len, derive_seed(7, "marginal", p));
            for (ci, &pos) in positions.iter().enumerate() {
                counts[ci][states[pos]] += 1;
            }
        }
        for row in counts {
            let freq = row[0] as f64 / paths as f64;
            // pi = (1/2, 1/2); 3 sigma of a fair binomial over 10^4 draws.
            assert!((freq - 0.5).abs() < 3.0 * 0.005, "freq {freq}");
        }
    }

    #[test]
    fn block_index_layout() {
        // n = 12, a_n = 3, mu_n = 4: G_1 = {0,1,2}, G_2 = {6,7,8}, ...
        let chain = two_state(0.7);
        let scheme = BlockScheme::new(3, 4).unwrap();
        let path: Vec<usize> = (0..24).map(|i| i % 2).collect();
        let ib = independent_blocks(&chain, &path, &scheme, 3).unwrap();
        assert_eq!(ib.odd_blocks.len(), 4);
        assert_eq!(ib.odd_blocks[0], path[0..3].to_vec());
        assert_eq!(ib.odd_blocks[1], path[6..9].to_vec());
        let total: usize = ib.odd_blocks.iter().map(|b| b.len()).sum();
        assert_eq!(total, 12);
        assert_eq!(ib.independent.len(), 4);
        assert!(ib.independent.iter().all(|b| b.len() == 3));
    }

    #[test]
    fn single_block_scheme_is_one_fresh_path() {
        // a_n = n, mu_n = 1: the IB sequence is one fresh stationary path.
        let chain = two_state(0.7);
        let n = 8;
        let scheme = BlockScheme::new(n, 1).unwrap();
        let path = chain.sample_states(2 * n, 21);
        let ib = independent_blocks(&chain, &path, &scheme, 22).unwrap();
        assert_eq!(ib.odd_blocks.len(), 1);
        assert_eq!(ib.odd_blocks[0], path[..n].to_vec());
        assert_eq!(ib.independent.len(), 1);
        assert_eq!(ib.independent[0].len(), n);
    }

    #[test]
    fn iid_chain_has_no_lag_one_dependence() {
        let chain = MixingChain::iid(&[0.5, 0.5], ring_emissions(2, 2)).unwrap();
        let states = chain.sample_states(100_000, 23);
        let vals: Vec<f64> = states.iter().map(|&s| s as f64).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        let cov = vals
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum::<f64>()
            / (vals.len() - 1) as f64;
        assert!((cov / var).abs() < 0.02, "autocorr {}", cov / var);
    }

    #[test]
    fn length_mismatch_rejected() {
        let chain = two_state(0.7);
        let scheme = BlockScheme::new(3, 4).unwrap();
        let path: Vec<usize> = vec![0; 23];
        assert!(independent_blocks(&chain, &path, &scheme, 3).is_err());
    }

    #[test]
    fn ib_blocks_match_transition_law() {
        // Empirical within-block transition counts of the IB sequence match
        // the chain's transition matrix.
        let chain = two_state(0.8);
        let scheme = BlockScheme::new(8, 4).unwrap();
        let mut stay = 0usize;
        let mut moves = 0usize;
        for t in 0..2_000 {
            let path = chain.sample_states(2 * scheme.n(), derive_seed(5, "law-path", t));
            let ib =
                independent_blocks(&chain, &path, &scheme, derive_seed(5, "law-ib", t)).unwrap();
            for block in &ib.independent {
                for w in block.windows(2) {
                    if w[0] == w[1] {
                        stay += 1;
                    } else {
                        moves += 1;
                    }
                }
            }
        }
        let rate = stay as f64 / (stay + moves) as f64;
        let n = (stay + moves) as f64;
        let sigma = (0.8 * 0.2 / n).sqrt();
        assert!((rate - 0.8).abs() < 4.0 * sigma, "stay rate {rate}");
    }

    /// Fraction of adjacent odd blocks whose endpoints agree; sensitive to
    /// dependence across the a_n-sized gaps.
    fn endpoint_agreement(blocks: &[Vec<usize>]) -> f64 {
        let pairs = blocks.windows(2).count().max(1);
        let agree = blocks
            .windows(2)
            .filter(|w| w[0].last() == w[1].first())
            .count();
        agree as f64 / pairs as f64
    }

    #[test]
    fn swap_gap_zero_for_iid() {
        let chain = MixingChain::iid(&[0.5, 0.5], ring_emissions(2, 2)).unwrap();
        let scheme = BlockScheme::new(4, 8).unwrap();
        let gap = block_swap_gap(&endpoint_agreement, 1.0, &chain, &scheme, 2_000, 11).unwrap();
        assert_eq!(gap.bound, 0.0);
        assert!(
            gap.pass,
            "iid gap {} above 3 sigma {}",
            gap.gap_estimate, gap.std_error
        );
    }

    #[test]
    fn swap_gap_within_bound_for_sticky_chain() {
        let chain = two_state(0.9);
        for a in [1usize, 2, 4, 8] {
            let scheme = BlockScheme::new(a, 8).unwrap();
            let gap = block_swap_gap(&endpoint_agreement, 1.0, &chain, &scheme, 3_000, 13).unwrap();
            assert!(
                gap.pass,
                "a_n={a}: gap {} bound {} se {}",
                gap.gap_estimate, gap.bound, gap.std_error
            );
        }
    }

    #[test]
    fn swap_bound_decays_geometrically() {
        let chain = two_state(0.9);
        let mut prev = f64::INFINITY;
        for a in [1usize, 2, 4, 8] {
            let scheme = BlockScheme::new(a, 8).unwrap();
            let beta = chain.beta_coefficients(a).beta(a).unwrap();
            let bound = 1.0 * (scheme.block_count as f64 - 1.0) * beta;
            assert!(bound < prev);
            prev = bound;
        }
    }

    #[test]
    fn scheme_requires_exact_factorization() {
        assert!(BlockScheme::for_n(12, 5).is_err());
        assert_eq!(BlockScheme::for_n(12, 3).unwrap().block_count, 4);
    }
}
