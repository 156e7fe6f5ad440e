//! Report schema, error classification and output files.

use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use z2flow::Z2Error;
use z2flow_models::ModelError;

use crate::GlobalOpts;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Z2Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        let refusal = match self {
            CliError::Core(e) => e.is_numerical_refusal(),
            CliError::Model(e) => e.is_numerical_refusal(),
            _ => false,
        };
        if refusal {
            2
        } else {
            1
        }
    }

    /// Variant name of the underlying error, e.g. `AmbiguousKernel`.
    pub fn kind(&self) -> String {
        let debug = match self {
            CliError::Core(e) => format!("{e:?}"),
            CliError::Model(ModelError::Core(e)) => format!("{e:?}"),
            CliError::Model(e) => format!("{e:?}"),
            CliError::Usage(_) => return "Usage".into(),
            CliError::Io { .. } => return "Io".into(),
            CliError::Json(_) => return "Json".into(),
            CliError::Csv(_) => return "Csv".into(),
        };
        debug
            .chars()
            .take_while(|c| c.is_alphanumeric() || *c == '_')
            .collect()
    }
}

/// Result of a command before it is wrapped into a [`Report`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub value: Value,
    pub segments: Vec<Value>,
    pub diagnostics: Value,
    /// Spectra for `--csv`, as `(parameter, eigenvalues)`.
    pub spectra: Option<Vec<(f64, Vec<f64>)>>,
    /// A check inside the command failed; exit code 2.
    pub failed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub started_unix_ms: u64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub config: Value,
    pub value: Value,
    pub segments: Vec<Value>,
    pub diagnostics: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<Value>,
    pub timings: Timings,
}

fn timings(started: Instant) -> Timings {
    let elapsed = started.elapsed();
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default()
        .saturating_sub(elapsed);
    Timings {
        started_unix_ms: now.as_millis() as u64,
        elapsed_ms: elapsed.as_secs_f64() * 1e3,
    }
}

impl Report {
    pub fn from_outcome(command: &str, config: Value, out: Outcome, started: Instant) -> Self {
        Report {
            schema: REPORT_SCHEMA,
            command: command.to_string(),
            config,
            value: out.value,
            segments: out.segments,
            diagnostics: out.diagnostics,
            error: None,
            timings: timings(started),
        }
    }

    pub fn from_error(command: &str, config: Value, e: &CliError, started: Instant) -> Self {
        Report {
            schema: REPORT_SCHEMA,
            command: command.to_string(),
            config,
            value: Value::Null,
            segments: Vec::new(),
            diagnostics: Value::Null,
            error: Some(serde_json::json!({
                "kind": e.kind(),
                "message": e.to_string(),
                "exit_code": e.exit_code(),
            })),
            timings: timings(started),
        }
    }
}

/// Print the report to stdout (if asked) and write `--json`.
pub fn emit(g: &GlobalOpts, report: &Report, to_stdout: bool) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)?;
    if to_stdout {
        let mut out = std::io::stdout().lock();
        match writeln!(out, "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(CliError::io(Path::new("<stdout>"), e)),
            _ => {}
        }
    }
    if let Some(path) = &g.json {
        std::fs::write(path, format!("{text}\n")).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

/// Write `--csv` spectra.
pub fn write_outputs(g: &GlobalOpts, out: &Outcome) -> Result<(), CliError> {
    let Some(path) = &g.csv else {
        return Ok(());
    };
    match &out.spectra {
        Some(spectra) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            z2flow_models::io::write_spectra(std::io::BufWriter::new(file), spectra)?;
        }
        None => eprintln!("note: this command produces no spectra; --csv ignored"),
    }
    Ok(())
}
