//! Command-line entry point for the excess-risk laboratory.
//!
//! Every subcommand runs one reproducible experiment, prints one verdict
//! line per check, and writes machine-readable artifacts (a JSON summary
//! plus CSV tables) into the output directory. Artifacts embed the tool
//! version, the effective configuration, and the seed.
//!
//! Exit status: 0 when all checks pass, 2 when a property check fails,
//! 1 on usage errors.

mod commands;
mod output;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "risklab",
    version,
    about = "Numerical laboratory for excess-risk bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build approximation networks for a smooth target and report errors.
    Approx(commands::approx::Args),
    /// Audit loss Lipschitz constants and symmetry identities.
    LossAudit(commands::loss_audit::Args),
    /// Check argmin preservation under uniform label noise.
    NoiseTolerance(commands::noise_tolerance::Args),
    /// Compute exact beta-mixing coefficients of a Markov chain.
    MixingBeta(commands::mixing_beta::Args),
    /// Estimate the independent-block swap gap against its cap.
    MixingSwap(commands::mixing_swap::Args),
    /// Estimate Rademacher complexity against the norm-based cap.
    Rademacher(commands::rademacher::Args),
    /// Run the end-to-end excess-risk grid.
    ExcessRisk(commands::excess_risk::Args),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are not usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Approx(a) => commands::approx::run(a),
        Command::LossAudit(a) => commands::loss_audit::run(a),
        Command::NoiseTolerance(a) => commands::noise_tolerance::run(a),
        Command::MixingBeta(a) => commands::mixing_beta::run(a),
        Command::MixingSwap(a) => commands::mixing_swap::run(a),
        Command::Rademacher(a) => commands::rademacher::run(a),
        Command::ExcessRisk(a) => commands::excess_risk::run(a),
    };
    match outcome {
        Ok(true) => std::process::exit(0),
        Ok(false) => std::process::exit(2),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
