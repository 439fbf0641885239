use std::fmt;
use std::path::{Path, PathBuf};

use graf_core::exterior::{MetricJson, DEFAULT_MAX_DIM, HARD_MAX_DIM};
use graf_core::{GrafError, Metric, Signature};

/// Failure classes, mapped to exit codes 1 and 2.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input files, unsupported requests.
    Usage(String),
    /// An oracle-level check failed or the input is not a spinor.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<GrafError> for CliError {
    fn from(e: GrafError) -> Self {
        match e {
            GrafError::NotASpinor(_) | GrafError::NotAPinor(_) => CliError::Failure(e.to_string()),
            GrafError::Representation(_) | GrafError::Structure(_) | GrafError::NoPairing(_) => {
                CliError::Failure(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub signature: Option<Signature>,
    pub metric: Option<Metric>,
    pub volume_sign: i32,
    pub seed: u64,
    pub samples: usize,
    pub trials: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub max_dim: usize,
}

impl RunConfig {
    /// The orthonormal signature, or an error when none was given.
    pub fn require_signature(&self) -> CliResult<Signature> {
        self.signature
            .ok_or_else(|| CliError::Usage("--signature p,q is required for this command".into()))
    }

    /// Refuses a custom metric for commands that work in an orthonormal coframe.
    pub fn require_orthonormal(&self) -> CliResult<()> {
        match &self.metric {
            Some(m) if !m.is_orthonormal() => Err(CliError::Usage(
                "this command works in an orthonormal coframe; drop --metric".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// `GRAF_MAX_DIM`, defaulting to 12 and never above 16.
pub fn max_dim_from_env() -> CliResult<usize> {
    match std::env::var("GRAF_MAX_DIM") {
        Err(_) => Ok(DEFAULT_MAX_DIM),
        Ok(v) => {
            let cap: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("GRAF_MAX_DIM={v:?} is not a number")))?;
            if cap > HARD_MAX_DIM {
                return Err(CliError::Usage(format!("GRAF_MAX_DIM={cap} exceeds {HARD_MAX_DIM}")));
            }
            Ok(cap)
        }
    }
}

pub fn parse_signature(text: &str, cap: usize) -> CliResult<Signature> {
    let s = Signature::parse(text)?;
    Ok(Signature::with_cap(s.p, s.q, cap)?)
}

pub fn parse_volume_sign(text: &str) -> CliResult<i32> {
    match text.trim() {
        "+" | "+1" | "1" | "plus" => Ok(1),
        "-" | "-1" | "minus" => Ok(-1),
        other => Err(CliError::Usage(format!("volume sign must be + or -, got {other:?}"))),
    }
}

pub fn read_json(path: &Path) -> CliResult<serde_json::Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn read_metric(path: &Path, cap: usize) -> CliResult<Metric> {
    let json: MetricJson = serde_json::from_value(read_json(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(json.to_metric(cap)?)
}
