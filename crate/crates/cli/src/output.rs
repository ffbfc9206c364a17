use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use serde_json::{json, Value};
use threshold_lab::Error;

use crate::Common;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unreadable input: exit 2.
    Usage(String),
    /// Rejected by the library: exit 1.
    Domain(Error),
    /// Could not write the output: exit 1.
    Output(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => Self::Usage(msg),
            other => Self::Domain(other),
        }
    }
}

fn kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

impl CliError {
    pub fn report(self) -> ExitCode {
        let (code, body) = match &self {
            Self::Usage(msg) => (2, json!({"error": {"kind": "Usage", "message": msg}})),
            Self::Domain(e) => (1, json!({"error": {"kind": kind(e), "message": e.to_string()}})),
            Self::Output(msg) => (1, json!({"error": {"kind": "Output", "message": msg}})),
        };
        eprintln!("{body}");
        ExitCode::from(code)
    }
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let fail = |e: &dyn std::fmt::Display| CliError::Output(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(text.as_bytes()).map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

pub fn emit_text(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => write_atomic(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

pub fn emit_json(common: &Common, value: &Value) -> Result<(), CliError> {
    emit_text(common, &threshold_lab::io::to_pretty(value))
}
