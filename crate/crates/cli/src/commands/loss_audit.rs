//! `risklab loss-audit` — Lipschitz ratios and symmetry constants.

use std::path::PathBuf;

use clap::Parser;
use serde::{Deserialize, Serialize};

use risklab::loss::{lipschitz_audit, symmetry_constant, LipschitzAudit, SimplexLabel};
use risklab::rng::{derive_seed, rng_from};

use crate::output::{self, AnyError, Summary};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub loss: String,
    pub classes: Vec<usize>,
    pub trials: usize,
    pub a: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            loss: "l1".into(),
            classes: vec![2, 3, 5, 10],
            trials: 100_000,
            a: -4.0,
        }
    }
}

#[derive(Parser)]
pub struct Args {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Loss family: l1 | l2 | ce | rce.
    #[arg(long)]
    loss: Option<String>,
    /// Class counts to audit.
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<usize>>,
    /// Trials per class count.
    #[arg(long)]
    trials: Option<usize>,
    /// log 0 value A for reverse cross entropy.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Serialize)]
struct ClassResult {
    classes: usize,
    audit: LipschitzAudit,
    symmetry_constant: Option<f64>,
    symmetry_closed_form: Option<f64>,
}

pub fn run(args: Args) -> Result<bool, AnyError> {
    let mut p: Params = super::load_config(args.config.as_deref())?;
    if let Some(v) = args.loss {
        p.loss = v;
    }
    if let Some(v) = args.classes {
        p.classes = v;
    }
    if let Some(v) = args.trials {
        p.trials = v;
    }
    if let Some(v) = args.a {
        p.a = v;
    }

    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut pass = true;
    for &k in &p.classes {
        let spec = super::parse_loss(&p.loss, k, p.a)?;
        let audit = lipschitz_audit(&spec, p.trials, derive_seed(args.seed, "audit", k as u64));
        output::verdict(
            audit.pass,
            &format!(
                "{} K={k}: max ratio {:.4} <= lambda {:.4} over {} trials",
                p.loss, audit.max_ratio, audit.bound, p.trials
            ),
        );
        pass &= audit.pass;

        let mut rng = rng_from(derive_seed(args.seed, "symmetry", k as u64));
        let preds: Vec<SimplexLabel> = (0..100)
            .map(|_| SimplexLabel::sample_uniform(k, &mut rng))
            .collect();
        let c0 = symmetry_constant(&spec, &preds);
        let closed = spec.symmetry_constant_closed_form();
        if let (Some(measured), Some(expect)) = (c0, closed) {
            let ok = (measured - expect).abs() <= 1e-9;
            output::verdict(
                ok,
                &format!("{} K={k}: symmetry constant {measured:.6}", p.loss),
            );
            pass &= ok;
        }

        rows.push(vec![
            k.to_string(),
            output::fmt_f64(audit.max_ratio),
            output::fmt_f64(audit.bound),
            audit.pass.to_string(),
            c0.map(output::fmt_f64).unwrap_or_default(),
        ]);
        results.push(ClassResult {
            classes: k,
            audit,
            symmetry_constant: c0,
            symmetry_closed_form: closed,
        });
    }

    output::write_csv(
        &args.out,
        "loss_audit.csv",
        "classes,max_ratio,bound,pass,symmetry_constant",
        &rows,
    )?;
    output::write_json(
        &args.out,
        "loss_audit.json",
        &Summary {
            tool_version: output::tool_version(),
            command: "loss-audit",
            seed: args.seed,
            config: p,
            results,
            pass,
        },
    )?;
    Ok(pass)
}
