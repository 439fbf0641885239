mod commands;
mod config;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{CliError, CliResult, Format, RunConfig};

#[derive(Parser)]
#[command(name = "graf", version, about = "Exact Clifford algebra, pairing and Fierz identity checks on differential forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Signature as `p,q`.
    #[arg(long, value_name = "P,Q")]
    signature: Option<String>,
    /// JSON metric file `{"p":..,"q":..,"gram":[[..]]}`.
    #[arg(long, value_name = "PATH")]
    metric: Option<PathBuf>,
    /// Sign of the volume element in the representation.
    #[arg(long, default_value = "+", allow_hyphen_values = true, value_name = "+|-")]
    volume_sign: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Product, volume form, Hodge and truncation checks.
    CheckAlgebra {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Builds the representation, its commutant structure and the pairing.
    BuildRep {
        #[command(flatten)]
        common: Common,
    },
    /// Fierz identities on seeded random spinors.
    VerifyFierz {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Classifies one spinor, or injected covariant forms.
    Classify {
        #[command(flatten)]
        common: Common,
        /// JSON array of rationals.
        #[arg(long, value_name = "PATH", conflicts_with = "covariants")]
        spinor: Option<PathBuf>,
        /// JSON object of forms (`phi0`, `phi2` or `psi0`, `psi1`, `psi4`).
        #[arg(long, value_name = "PATH")]
        covariants: Option<PathBuf>,
        /// Majorana-project the spinor first.
        #[arg(long)]
        project: bool,
    },
    /// Seeded census of class populations.
    Census {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Product expansions between forms of grades 0, 1 and 4 in (9,0).
    AppendixCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn config(common: &Common, samples: usize, trials: usize) -> CliResult<RunConfig> {
    let cap = config::max_dim_from_env()?;
    let signature = common.signature.as_deref().map(|s| config::parse_signature(s, cap)).transpose()?;
    let metric = common.metric.as_deref().map(|p| config::read_metric(p, cap)).transpose()?;
    let signature = signature.or(metric.as_ref().map(|m| m.signature()));
    Ok(RunConfig {
        signature,
        metric,
        volume_sign: config::parse_volume_sign(&common.volume_sign)?,
        seed: common.seed,
        samples,
        trials,
        format: common.format,
        out: common.out.clone(),
        max_dim: cap,
    })
}

fn run(cli: Cli) -> CliResult<(RunConfig, commands::Outcome)> {
    match cli.command {
        Command::CheckAlgebra { common, trials } => {
            let cfg = config(&common, 0, trials)?;
            let out = commands::check_algebra(&cfg)?;
            Ok((cfg, out))
        }
        Command::BuildRep { common } => {
            let cfg = config(&common, 0, 0)?;
            let out = commands::build_rep_cmd(&cfg)?;
            Ok((cfg, out))
        }
        Command::VerifyFierz { common, trials } => {
            let cfg = config(&common, 0, trials)?;
            let out = commands::verify_fierz(&cfg)?;
            Ok((cfg, out))
        }
        Command::Classify { common, spinor, covariants, project } => {
            let cfg = config(&common, 0, 0)?;
            let out = commands::classify_cmd(&cfg, spinor.as_deref(), covariants.as_deref(), project)?;
            Ok((cfg, out))
        }
        Command::Census { common, samples } => {
            let cfg = config(&common, samples, 0)?;
            let out = commands::census_cmd(&cfg)?;
            Ok((cfg, out))
        }
        Command::AppendixCheck { common, trials } => {
            let cfg = config(&common, 0, trials)?;
            let out = commands::appendix_cmd(&cfg)?;
            Ok((cfg, out))
        }
    }
}

fn emit(cfg: &RunConfig, report: &serde_json::Value) -> CliResult<()> {
    let mut text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(report).map_err(|e| CliError::Failure(e.to_string()))?,
        Format::Text => render::to_text(report),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Failure(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(cfg, out)| {
        emit(&cfg, &out.report)?;
        Ok(out.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("graf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
