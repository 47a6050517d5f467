//! `risklab approx` — build approximation networks over a sweep of accuracy
//! parameters and verify structural caps plus error decay.

use std::path::PathBuf;

use clap::Parser;
use serde::{Deserialize, Serialize};

use risklab::approx::{
    build_approximant, structural_caps, ApproxReport, BuildOptions, TargetFunction,
};

use crate::output::{self, AnyError, Summary};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub d: usize,
    pub classes: usize,
    pub r: usize,
    /// Hölder exponent; defaults to r + 1 when absent.
    pub tau: Option<f64>,
    pub target: String,
    pub k: Vec<u32>,
    pub mc_samples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            d: 1,
            classes: 2,
            r: 0,
            tau: None,
            target: "sin".into(),
            k: vec![2, 3, 4],
            mc_samples: 100_000,
        }
    }
}

#[derive(Parser)]
pub struct Args {
    /// JSON parameter file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input dimension d.
    #[arg(long)]
    d: Option<usize>,
    /// Output dimension K.
    #[arg(long)]
    classes: Option<usize>,
    /// Smoothness order r (τ = r + 1 for the built-in targets).
    #[arg(long)]
    r: Option<usize>,
    /// Hölder exponent τ ∈ (r, r+1]; lowers the grid resolution exponent.
    #[arg(long)]
    tau: Option<f64>,
    /// Built-in target: constant | coordinate | sin | gaussian-bump.
    #[arg(long)]
    target: Option<String>,
    /// Accuracy parameters to sweep.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    /// Monte-Carlo samples for the L² estimate.
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Serialize)]
struct KResult {
    report: ApproxReport,
    width_cap: f64,
    depth_exact: usize,
    budget_cap: f64,
    caps_ok: bool,
}

pub fn run(args: Args) -> Result<bool, AnyError> {
    let mut p: Params = super::load_config(args.config.as_deref())?;
    if let Some(v) = args.d {
        p.d = v;
    }
    if let Some(v) = args.classes {
        p.classes = v;
    }
    if let Some(v) = args.r {
        p.r = v;
    }
    if let Some(v) = args.tau {
        p.tau = Some(v);
    }
    if let Some(v) = args.target {
        p.target = v;
    }
    if let Some(v) = args.k {
        p.k = v;
    }
    if let Some(v) = args.mc_samples {
        p.mc_samples = v;
    }
    if p.k.is_empty() {
        return Err("need at least one k".into());
    }

    let mut target = TargetFunction::builtin(&p.target, p.d, p.classes, p.r)?;
    if let Some(tau) = p.tau {
        target = target.with_tau(tau)?;
    }
    let opts = BuildOptions {
        mc_samples: p.mc_samples,
        seed: args.seed,
        ..Default::default()
    };

    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut pass = true;
    let mut prev_linf = f64::INFINITY;
    for &k in &p.k {
        let (_net, report) = build_approximant(&target, k, &opts)?;
        let caps = structural_caps(p.d, p.classes, p.r, report.grid_n, k);
        let caps_ok = (report.width as f64) <= caps.width_cap
            && report.depth == caps.depth_exact
            && report.budget <= caps.budget_cap;
        output::verdict(
            caps_ok,
            &format!(
                "k={k}: structural caps (W {} <= {:.3e}, D {} == {}, M {:.3e} <= {:.3e})",
                report.width,
                caps.width_cap,
                report.depth,
                caps.depth_exact,
                report.budget,
                caps.budget_cap
            ),
        );
        let decayed = report.linf_error < prev_linf;
        output::verdict(
            decayed,
            &format!("k={k}: L∞ error {:.3e} decreased", report.linf_error),
        );
        pass &= caps_ok && decayed;
        prev_linf = report.linf_error;
        rows.push(vec![
            k.to_string(),
            report.grid_n.to_string(),
            output::fmt_f64(report.linf_error),
            output::fmt_f64(report.l2_error),
            output::fmt_f64(report.l2_std_error),
            report.width.to_string(),
            report.depth.to_string(),
            output::fmt_f64(report.budget),
        ]);
        results.push(KResult {
            report,
            width_cap: caps.width_cap,
            depth_exact: caps.depth_exact,
            budget_cap: caps.budget_cap,
            caps_ok,
        });
    }

    output::write_csv(
        &args.out,
        "approx_error_vs_k.csv",
        "k,N,linf_error,l2_error,l2_std_error,width,depth,budget",
        &rows,
    )?;
    output::write_json(
        &args.out,
        "approx.json",
        &Summary {
            tool_version: output::tool_version(),
            command: "approx",
            seed: args.seed,
            config: p,
            results,
            pass,
        },
    )?;
    Ok(pass)
}
