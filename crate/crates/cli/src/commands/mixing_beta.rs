//! `risklab mixing-beta` — exact β coefficients from a chain description.

use std::path::PathBuf;

use clap::Parser;
use serde::{Deserialize, Serialize};

use risklab::loss::SimplexLabel;
use risklab::mixing::{Emission, MixingChain};

use crate::output::{self, AnyError, Summary};

/// On-disk chain description: `{states, transition, emit}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub states: usize,
    /// Row-stochastic matrix, one row per state.
    pub transition: Vec<Vec<f64>>,
    pub emit: Vec<EmitEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitEntry {
    pub x: Vec<f64>,
    pub label: usize,
    pub classes: usize,
}

pub fn load_chain(path: &std::path::Path) -> Result<MixingChain, AnyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read chain {}: {e}", path.display()))?;
    let file: ChainFile = serde_json::from_str(&text)
        .map_err(|e| format!("invalid chain {}: {e}", path.display()))?;
    if file.transition.len() != file.states || file.emit.len() != file.states {
        return Err("states count disagrees with transition/emit".into());
    }
    let flat: Vec<f64> = file.transition.into_iter().flatten().collect();
    let emissions = file
        .emit
        .into_iter()
        .map(|e| Emission {
            x: e.x,
            y: SimplexLabel::one_hot(e.classes, e.label),
        })
        .collect();
    Ok(MixingChain::new(flat, emissions)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Stay probability of the built-in two-state chain (ignored when a
    /// chain file is given).
    pub sticky: f64,
    pub max_lag: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            sticky: 0.9,
            max_lag: 20,
        }
    }
}

#[derive(Parser)]
pub struct Args {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Chain description JSON ({states, transition, emit}).
    #[arg(long)]
    chain: Option<PathBuf>,
    /// Stay probability of the built-in two-state chain.
    #[arg(long)]
    sticky: Option<f64>,
    /// Largest lag to report.
    #[arg(long)]
    max_lag: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Serialize)]
struct BetaResults {
    chain_states: usize,
    stationary: Vec<f64>,
    coefficients: Vec<(usize, f64)>,
    envelope_non_increasing: bool,
}

pub fn run(args: Args) -> Result<bool, AnyError> {
    let mut p: Params = super::load_config(args.config.as_deref())?;
    if let Some(v) = args.sticky {
        p.sticky = v;
    }
    if let Some(v) = args.max_lag {
        p.max_lag = v;
    }

    let chain = match &args.chain {
        Some(path) => load_chain(path)?,
        None => MixingChain::two_state_sticky(
            p.sticky,
            [
                Emission {
                    x: vec![0.25, 0.25],
                    y: SimplexLabel::one_hot(2, 0),
                },
                Emission {
                    x: vec![0.75, 0.75],
                    y: SimplexLabel::one_hot(2, 1),
                },
            ],
        )?,
    };

    let profile = chain.beta_coefficients(p.max_lag.max(1));
    let non_increasing = profile
        .coefficients
        .windows(2)
        .all(|w| w[1].beta <= w[0].beta + 1e-12);
    output::verdict(
        non_increasing,
        &format!("beta envelope non-increasing over lags 1..={}", p.max_lag),
    );
    let in_range = profile
        .coefficients
        .iter()
        .all(|c| (0.0..=1.0).contains(&c.beta));
    output::verdict(in_range, "beta coefficients lie in [0, 1]");

    let rows: Vec<Vec<String>> = profile
        .coefficients
        .iter()
        .map(|c| vec![c.lag.to_string(), output::fmt_f64(c.beta)])
        .collect();
    output::write_csv(&args.out, "beta_profile.csv", "s,beta_s", &rows)?;

    let pass = non_increasing && in_range;
    output::write_json(
        &args.out,
        "mixing_beta.json",
        &Summary {
            tool_version: output::tool_version(),
            command: "mixing-beta",
            seed: args.seed,
            config: p,
            results: BetaResults {
                chain_states: chain.states(),
                stationary: chain.stationary().to_vec(),
                coefficients: profile
                    .coefficients
                    .iter()
                    .map(|c| (c.lag, c.beta))
                    .collect(),
                envelope_non_increasing: non_increasing,
            },
            pass,
        },
    )?;
    Ok(pass)
}
