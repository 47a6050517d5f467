//! `risklab noise-tolerance` — argmin preservation under uniform label
//! noise, checked at the channel-expectation level.

use std::path::PathBuf;

use clap::Parser;
use serde::{Deserialize, Serialize};

use risklab::loss::SimplexLabel;
use risklab::noise::{
    corrupt, tolerance_check, Hypothesis, LabeledDataset, NoiseChannel, ToleranceVerdict,
};
use risklab::rng::{derive_seed, rng_from};

use rand::Rng as _;

use crate::output::{self, AnyError, Summary};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub loss: String,
    pub classes: usize,
    pub eta: f64,
    pub hypotheses: usize,
    pub data_size: usize,
    pub instances: usize,
    pub a: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            loss: "l1".into(),
            classes: 3,
            eta: 0.25,
            hypotheses: 200,
            data_size: 20,
            instances: 1,
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
    /// Number of classes K.
    #[arg(long, visible_alias = "k")]
    classes: Option<usize>,
    /// Uniform off-diagonal flip mass, in (0, 1/K].
    #[arg(long, required_unless_present = "config")]
    eta: Option<f64>,
    /// Hypothesis grid size per instance.
    #[arg(long)]
    hypotheses: Option<usize>,
    /// Data points per instance.
    #[arg(long)]
    data_size: Option<usize>,
    /// Number of random (grid, dataset) instances.
    #[arg(long)]
    instances: Option<usize>,
    /// log 0 value A for reverse cross entropy.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Dataset CSV (`x0..x{d-1},label[,noisy_label]`) instead of generated data.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Serialize)]
struct InstanceResult {
    instance: usize,
    verdict: ToleranceVerdict,
}

fn random_dataset(n: usize, k: usize, seed: u64) -> LabeledDataset {
    let mut rng = rng_from(seed);
    let points: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(0.0..1.0)]).collect();
    let labels = (0..n)
        .map(|_| SimplexLabel::one_hot(k, rng.random_range(0..k)))
        .collect();
    LabeledDataset::new(points, labels).expect("generated data is valid")
}

/// Parse a dataset CSV with header `x0..x{d-1},label[,noisy_label]`.
fn read_dataset_csv(path: &std::path::Path, classes: usize) -> Result<LabeledDataset, AnyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read data {}: {e}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or("empty dataset file")?
        .split(',')
        .collect();
    let d = header.iter().filter(|h| h.starts_with('x')).count();
    let label_col = header
        .iter()
        .position(|h| *h == "label")
        .ok_or("dataset header needs a 'label' column")?;
    let noisy_col = header.iter().position(|h| *h == "noisy_label");

    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut noisy = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(format!("line {}: wrong field count", lineno + 2).into());
        }
        let x = fields[..d]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| format!("line {}: {e}", lineno + 2))?;
        points.push(x);
        let label: usize = fields[label_col]
            .parse()
            .map_err(|e| format!("line {}: label: {e}", lineno + 2))?;
        labels.push(SimplexLabel::one_hot(classes, label));
        if let Some(col) = noisy_col {
            let nl: usize = fields[col]
                .parse()
                .map_err(|e| format!("line {}: noisy label: {e}", lineno + 2))?;
            noisy.push(SimplexLabel::one_hot(classes, nl));
        }
    }
    let mut data = LabeledDataset::new(points, labels)?;
    if noisy_col.is_some() {
        data.noisy_labels = Some(noisy);
    }
    Ok(data)
}

fn dataset_csv(data: &LabeledDataset) -> (String, Vec<Vec<String>>) {
    let d = data.points.first().map_or(0, |p| p.len());
    let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    header.push("label".into());
    let has_noisy = data.noisy_labels.is_some();
    if has_noisy {
        header.push("noisy_label".into());
    }
    let rows = (0..data.len())
        .map(|i| {
            let mut row: Vec<String> = data.points[i].iter().map(|v| output::fmt_f64(*v)).collect();
            row.push(data.labels[i].hot_index().unwrap().to_string());
            if let Some(noisy) = &data.noisy_labels {
                row.push(noisy[i].hot_index().unwrap().to_string());
            }
            row
        })
        .collect();
    (header.join(","), rows)
}

pub fn run(args: Args) -> Result<bool, AnyError> {
    let mut p: Params = super::load_config(args.config.as_deref())?;
    if let Some(v) = args.loss {
        p.loss = v;
    }
    if let Some(v) = args.classes {
        p.classes = v;
    }
    if let Some(v) = args.eta {
        p.eta = v;
    }
    if let Some(v) = args.hypotheses {
        p.hypotheses = v;
    }
    if let Some(v) = args.data_size {
        p.data_size = v;
    }
    if let Some(v) = args.instances {
        p.instances = v;
    }
    if let Some(v) = args.a {
        p.a = v;
    }

    let spec = super::parse_loss(&p.loss, p.classes, p.a)?;
    let channel = NoiseChannel::uniform(p.classes, p.eta)?;

    let provided = args
        .data
        .as_deref()
        .map(|pth| read_dataset_csv(pth, p.classes))
        .transpose()?;

    let mut results = Vec::new();
    let mut all_preserved = true;
    for instance in 0..p.instances.max(1) {
        let data = match &provided {
            Some(d) => d.clone(),
            None => random_dataset(
                p.data_size,
                p.classes,
                derive_seed(args.seed, "nt-data", instance as u64),
            ),
        };
        let mut rng = rng_from(derive_seed(args.seed, "nt-grid", instance as u64));
        let grid: Vec<Hypothesis> = (0..p.hypotheses)
            .map(|_| {
                (0..data.len())
                    .map(|_| SimplexLabel::sample_uniform(p.classes, &mut rng))
                    .collect()
            })
            .collect();
        let verdict = tolerance_check(&spec, &grid, &data, &channel)?;
        output::verdict(
            verdict.pass,
            &format!(
                "instance {instance}: clean argmins {:?} vs noisy {:?}",
                verdict.clean_minimizers, verdict.noisy_minimizers
            ),
        );
        all_preserved &= verdict.pass;

        if instance == 0 {
            // Persist the first instance's dataset with sampled noisy labels.
            let noisy = corrupt(&channel, &data, derive_seed(args.seed, "nt-corrupt", 0));
            let (header, rows) = dataset_csv(&noisy);
            output::write_csv(&args.out, "noise_tolerance_data.csv", &header, &rows)?;
        }
        results.push(InstanceResult { instance, verdict });
    }

    // For symmetric losses, failing to preserve argmins is a property
    // violation; for cross entropy a witness is the expected outcome and is
    // simply recorded.
    let pass = if spec.is_symmetric() {
        all_preserved
    } else {
        true
    };
    if !spec.is_symmetric() {
        output::verdict(
            true,
            &format!(
                "{} is not symmetric; argmin preservation {}",
                p.loss,
                if all_preserved {
                    "held anyway"
                } else {
                    "failed (witness recorded)"
                }
            ),
        );
    }

    output::write_json(
        &args.out,
        "noise_tolerance.json",
        &Summary {
            tool_version: output::tool_version(),
            command: "noise-tolerance",
            seed: args.seed,
            config: p,
            results,
            pass,
        },
    )?;
    Ok(pass)
}
