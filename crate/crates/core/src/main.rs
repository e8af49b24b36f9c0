use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cvar_bandit::bounds::{bound_report, Table1Params, XiChoice};
use cvar_bandit::cvar::{c_star, gaussian_cvar, mc_cvar_oracle};
use cvar_bandit::experiment::{flags_csv_to, load_config, run_and_write, run_experiment, ExperimentConfig};
use cvar_bandit::presets::Preset;
use cvar_bandit::stats::RngStream;
use cvar_bandit::{Error, Result};

#[derive(Parser)]
#[command(name = "cvar-bandit", version, about = "CVaR-constrained Gaussian bandit simulations and bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write regret.csv, flags.csv, summary.json and bounds.json.
    Simulate(SimulateArgs),
    /// Print the bound report for the configured instance as JSON.
    Bounds(BoundsArgs),
    /// Run an experiment and print only the wrong-flag table.
    Flags(ConfigArgs),
    /// Closed-form and Monte-Carlo checks.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use a named preset instance instead of the config's instance.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    parallelism: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: ConfigArgs,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Fixed weight ξ in (0, 1].
    #[arg(long, conflicts_with = "xi_auto")]
    xi: Option<f64>,
    /// Use each arm's optimized ξ_α (the default).
    #[arg(long)]
    xi_auto: bool,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// CVaR of a Gaussian loss: both closed forms and a Monte-Carlo estimate.
    Cvar {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Config from `--config`, with the preset and seed overrides applied.
fn resolve(config: Option<&PathBuf>, preset: Option<&str>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = match (config, preset) {
        (Some(path), _) => load_config(path)?,
        (None, Some(name)) => ExperimentConfig::from_preset(Preset::from_name(name)?, 1000, 100, 0)?,
        (None, None) => return Err(Error::Usage("give --config or --preset".into())),
    };
    if let Some(name) = preset {
        let p = Preset::from_name(name)?;
        cfg.instance = p.instance();
        cfg.preset = Some(p.name().to_string());
    }
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let c = &args.common;
            let mut cfg = resolve(c.config.as_ref(), c.preset.as_deref(), c.seed)?;
            if c.parallelism.is_some() {
                cfg.parallelism = c.parallelism;
            }
            if let Some(out) = args.out {
                cfg.output_dir = out;
            }
            let (result, files) = run_and_write(&cfg)?;
            for p in &result.policies {
                let regrets: Vec<String> = p
                    .regrets
                    .iter()
                    .map(|t| format!("{} {:.2} ± {:.2}", t.kind, t.final_mean(), t.final_std()))
                    .collect();
                println!("{:<10} wrong-flag {:.2}  {}", p.label, p.wrong_flag_proportion, regrets.join("  "));
            }
            println!("wrote {}", files.regret_csv.parent().unwrap_or(&files.regret_csv).display());
        }
        Command::Bounds(args) => {
            let cfg = resolve(args.config.as_ref(), args.preset.as_deref(), None)?;
            let xi = match args.xi {
                Some(v) => XiChoice::Fixed(v),
                None => XiChoice::Auto,
            };
            let table1 = Table1Params { n: cfg.horizon.max(2) as u64, ..Default::default() };
            let report = bound_report(&cfg.instance, xi, &table1)?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Serialize { path: "<stdout>".into(), reason: e.to_string() })?;
            println!("{text}");
        }
        Command::Flags(args) => {
            let mut cfg = resolve(args.config.as_ref(), args.preset.as_deref(), args.seed)?;
            if args.parallelism.is_some() {
                cfg.parallelism = args.parallelism;
            }
            let result = run_experiment(&cfg)?;
            flags_csv_to(&result, std::io::stdout().lock())
                .map_err(|e| Error::Serialize { path: "<stdout>".into(), reason: e.to_string() })?;
        }
        Command::Oracle(OracleCommand::Cvar { mu, sigma, alpha, samples, seed }) => {
            let scaled = gaussian_cvar(mu, sigma, alpha)?;
            let textbook = mu + sigma * c_star(alpha)?;
            let mc = mc_cvar_oracle(&mut RngStream::new(seed), mu, sigma, alpha, samples)?;
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "c_star          {:.10}", c_star(alpha)?);
            let _ = writeln!(out, "cvar (scaled)   {scaled:.10}");
            let _ = writeln!(out, "cvar (textbook) {textbook:.10}");
            let _ = writeln!(out, "cvar (mc, n={samples}) {mc:.10}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
