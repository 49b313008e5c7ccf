mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use commands::{Context, Outcome};
use config::Config;
use error::CliError;
use output::{OutputDir, BUILD_ID};

/// Reflected hard-ball diffusions: simulation, estimators and closed forms.
#[derive(Parser)]
#[command(name = "hardball", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides params.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides the replicate (or chain) count of the command.
    #[arg(long, global = true)]
    replicates: Option<usize>,
    /// Worker threads; HARDBALL_THREADS caps this.
    #[arg(long, global = true)]
    parallel: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Record trajectories to CSV.
    Simulate,
    /// Sample the invariant law and compare with closed forms.
    Invariant,
    /// Hitting times of contact or of the cluster set, with bounds.
    Hit,
    /// Spectral gap table of the affine diffusion.
    Gap,
    /// Run a nondecreasing attraction schedule.
    Anneal,
    /// Closed-form reproductions and an audited short run.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Invariant => "invariant",
            Command::Hit => "hit",
            Command::Gap => "gap",
            Command::Anneal => "anneal",
            Command::Verify => "verify",
        }
    }
}

fn thread_count(requested: Option<usize>) -> Result<Option<usize>, CliError> {
    let cap = match std::env::var("HARDBALL_THREADS") {
        Ok(v) => Some(
            v.parse::<usize>()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| CliError::Usage(format!("HARDBALL_THREADS must be a positive integer, got {v:?}")))?,
        ),
        Err(_) => None,
    };
    if requested == Some(0) {
        return Err(CliError::Usage("--parallel must be positive".into()));
    }
    Ok(match (requested, cap) {
        (Some(r), Some(c)) => Some(r.min(c)),
        (r, c) => r.or(c),
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn load_config(cli: &Cli) -> Result<Option<Config>, CliError> {
    let Some(path) = &cli.config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg: Config = toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
    if let Some(seed) = cli.seed {
        cfg.params.seed = seed;
    }
    Ok(Some(cfg))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(n) = thread_count(cli.parallel)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let config = load_config(cli)?;
    let params = match &config {
        Some(c) => {
            let p = c.params.to_params();
            p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            Some(p)
        }
        None => None,
    };
    // hash of the effective configuration, after command-line overrides
    let canonical = serde_json::to_vec(&json!({ "config": config, "replicates": cli.replicates })).unwrap();
    let sha = hex(&Sha256::digest(&canonical));
    let seed = params.map(|p| p.seed).unwrap_or(0);
    let mut out = OutputDir::create(&cli.out, cli.command.name(), &sha, seed)?;
    let ctx = Context {
        config: config.as_ref(),
        params,
        replicates: cli.replicates,
    };
    let outcome = match cli.command {
        Command::Simulate => commands::simulate(&ctx, &mut out),
        Command::Invariant => commands::invariant(&ctx, &mut out),
        Command::Hit => commands::hit(&ctx, &mut out),
        Command::Gap => commands::gap(&ctx, &mut out),
        Command::Anneal => commands::anneal_cmd(&ctx, &mut out),
        Command::Verify => commands::verify(&ctx, &mut out),
    }?;
    out.json("report.json", &json!({ "passed": outcome.passed, "report": outcome.report }))?;
    let manifest = json!({
        "command": cli.command.name(),
        "config_sha256": sha,
        "seed": seed,
        "build_id": BUILD_ID,
        "passed": outcome.passed,
        "files": out.files(),
    });
    out.json("manifest.json", &manifest)?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) if o.passed => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("hardball {}: check failed; see report.json", cli.command.name());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("hardball {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
