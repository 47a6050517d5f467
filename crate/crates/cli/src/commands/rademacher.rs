//! `risklab rademacher` — Monte-Carlo/ascent estimate against the
//! norm-based cap, plus the exact 1/√n halving check.

use std::path::PathBuf;

use clap::Parser;
use serde::{Deserialize, Serialize};

use risklab::risk::{rademacher_estimate, ClassSpec, RademacherEstimate};
use risklab::rng::{derive_seed, rng_from};

use rand::Rng as _;

use crate::output::{self, AnyError, Summary};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub d: usize,
    pub hidden: Vec<usize>,
    pub budget: f64,
    pub n: usize,
    pub draws: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            d: 2,
            hidden: vec![4],
            budget: 1.0,
            n: 100,
            draws: 4,
        }
    }
}

#[derive(Parser)]
pub struct Args {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Hidden layer widths.
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    /// Norm-budget cap M of the class.
    #[arg(long)]
    budget: Option<f64>,
    /// Sample size n.
    #[arg(long)]
    n: Option<usize>,
    /// Rademacher sign draws.
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Serialize)]
struct Results {
    estimate: RademacherEstimate,
    bound_at_n: f64,
    bound_at_4n: f64,
    halving_exact: bool,
}

fn unit_ball_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from(seed);
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
            x.into_iter().map(|v| v / norm).collect()
        })
        .collect()
}

pub fn run(args: Args) -> Result<bool, AnyError> {
    let mut p: Params = super::load_config(args.config.as_deref())?;
    if let Some(v) = args.d {
        p.d = v;
    }
    if let Some(v) = args.hidden {
        p.hidden = v;
    }
    if let Some(v) = args.budget {
        p.budget = v;
    }
    if let Some(v) = args.n {
        p.n = v;
    }
    if let Some(v) = args.draws {
        p.draws = v;
    }

    let mut dims = vec![p.d];
    dims.extend(&p.hidden);
    dims.push(1);
    let class = ClassSpec {
        dims,
        budget_cap: p.budget,
    };
    let points = unit_ball_points(p.n, p.d, derive_seed(args.seed, "radem-data", 0));
    let estimate = rademacher_estimate(&class, &points, p.draws, args.seed)?;
    output::verdict(
        estimate.pass,
        &format!(
            "estimate {:.5} <= bound {:.5} (n={}, draws={})",
            estimate.estimate, estimate.theoretical_bound, p.n, p.draws
        ),
    );

    // Closed-form halving: the bound at 4n is exactly half the bound at n.
    let bound = |n: usize| -> f64 {
        let depth = class.dims.len() - 2;
        2.0 * estimate.data_radius * p.budget * (depth as f64 + 2.0 + (p.d as f64).ln()).sqrt()
            / (n as f64).sqrt()
    };
    let (b1, b4) = (bound(p.n), bound(4 * p.n));
    let halving = b4 * 2.0 == b1;
    output::verdict(halving, &format!("bound(4n)*2 == bound(n): {b4} vs {b1}"));

    let pass = estimate.pass && halving;
    output::write_json(
        &args.out,
        "rademacher.json",
        &Summary {
            tool_version: output::tool_version(),
            command: "rademacher",
            seed: args.seed,
            config: p,
            results: Results {
                estimate,
                bound_at_n: b1,
                bound_at_4n: b4,
                halving_exact: halving,
            },
            pass,
        },
    )?;
    Ok(pass)
}
