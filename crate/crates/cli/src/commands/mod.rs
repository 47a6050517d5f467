//! Subcommand implementations.

pub mod approx;
pub mod excess_risk;
pub mod loss_audit;
pub mod mixing_beta;
pub mod mixing_swap;
pub mod noise_tolerance;
pub mod rademacher;

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::output::AnyError;

/// Load a JSON parameter file; unknown keys are rejected by the parameter
/// types' `deny_unknown_fields`.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, AnyError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            let parsed = serde_json::from_str(&text)
                .map_err(|e| format!("invalid config {}: {e}", p.display()))?;
            Ok(parsed)
        }
    }
}

/// Parse a loss family name.
pub fn parse_loss(name: &str, classes: usize, a: f64) -> Result<risklab::loss::LossSpec, AnyError> {
    use risklab::loss::LossSpec;
    Ok(match name {
        "l1" => LossSpec::l1(classes),
        "l2" => LossSpec::lp(2.0, classes)?,
        "ce" | "cross-entropy" => LossSpec::cross_entropy(classes),
        "rce" | "reverse-ce" => LossSpec::reverse_cross_entropy(a, classes)?,
        other => return Err(format!("unknown loss '{other}' (try l1, l2, ce, rce)").into()),
    })
}
