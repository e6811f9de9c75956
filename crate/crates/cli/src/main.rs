use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use smartedge_cli::config::{load_config, ExperimentConfig};
use smartedge_cli::experiments::{
    load_policies, output_dir, run_all, run_attack_impact, run_detection_benchmark, run_train,
};

/// Edge offloading experiments: DQN training, false-state-injection impact,
/// and attack detection benchmarks.
#[derive(Parser)]
#[command(name = "smartedge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (JSON); defaults to the built-in reference
    /// setup when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Run a single seed instead of the configured seed list.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for policies, datasets, and reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Exit nonzero when any threshold check fails (used by `all`).
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Train one policy per seed and evaluate the baselines.
    Train,
    /// Evaluate trained policies under the attack conditions.
    AttackImpact,
    /// Generate detection datasets and benchmark the five classifiers.
    Detect,
    /// Run train, attack-impact, and detect, then write the manifest.
    All,
}

fn effective_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seeds = vec![seed];
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<bool> {
    let config = effective_config(&cli)?;
    let out = output_dir(&cli.out)?;
    match cli.command {
        Command::Train => {
            let outcome = run_train(&config, &out)?;
            for row in &outcome.rows {
                println!(
                    "seed {}: trained cost {:.4} (random {:.4}, best fixed {:.4})",
                    row.seed, row.trained_cost, row.random_cost, row.best_fixed_cost
                );
            }
            Ok(true)
        }
        Command::AttackImpact => {
            let policies = load_policies(&config, &out)?;
            let outcome = run_attack_impact(&config, &out, &policies)?;
            for agg in &outcome.aggregates {
                println!(
                    "{}: normalized cost median {:.3} (mean {:.3}, std {:.3})",
                    agg.condition,
                    agg.median_normalized_cost,
                    agg.mean_normalized_cost,
                    agg.std_normalized_cost
                );
            }
            Ok(true)
        }
        Command::Detect => {
            let policies = load_policies(&config, &out)?;
            let outcome = run_detection_benchmark(&config, &out, &policies)?;
            for row in outcome.rows.iter().filter(|r| r.class == "macro") {
                println!(
                    "{} ({}): macro-F {:.3}",
                    row.model, row.task, row.f_measure
                );
            }
            for (kind, f) in &outcome.check_macro_f {
                println!("{} (fine, gamma >= 1): macro-F {f:.3}", kind.name());
            }
            Ok(true)
        }
        Command::All => {
            let report = run_all(&config, &out)?;
            for check in &report.checks {
                println!(
                    "[{}] {}: {}",
                    if check.passed { "pass" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            println!("manifest: {}", out.manifest_path().display());
            Ok(!cli.check || report.all_checks_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
