//! Output directory, manifest and error plumbing shared by the subcommands.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qii_core::QgError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("violation: {0}")]
    Violation(String),

    #[error(transparent)]
    Core(#[from] QgError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

/// Bad configuration values are usage errors; everything else from the
/// library is a failed run.
pub fn config_err(e: QgError) -> CliError {
    match e {
        QgError::InvalidConfig(m) | QgError::BadResolution(m) | QgError::OutOfRange(m) => CliError::Usage(m),
        e => CliError::Core(e),
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Reads the `--config` file, if any, as a JSON object.
pub fn load_config(path: Option<&Path>) -> CliResult<Value> {
    let Some(path) = path else {
        return Ok(json!({}));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    if !v.is_object() {
        return Err(CliError::Usage("config file must hold a JSON object".into()));
    }
    Ok(v)
}

/// Lays the flags that were given over the config file values.
pub fn overlay<A: Serialize + DeserializeOwned>(flags: &A, file: &Value) -> CliResult<A> {
    let mut merged = file.as_object().cloned().unwrap_or_default();
    if let Value::Object(given) = serde_json::to_value(flags).expect("flag structs serialize") {
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

pub struct Run {
    pub dir: PathBuf,
    pub format: Format,
}

impl Run {
    pub fn create(dir: PathBuf, format: Format) -> CliResult<Self> {
        std::fs::create_dir_all(&dir)?;
        Ok(Run { dir, format })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `rows` as `<stem>.csv` or `<stem>.json` per the run format.
    pub fn table<S: Serialize>(&self, stem: &str, rows: &[S]) -> CliResult<PathBuf> {
        match self.format {
            Format::Csv => {
                let p = self.path(&format!("{stem}.csv"));
                qii_core::io::write_rows_csv(BufWriter::new(File::create(&p)?), rows)?;
                Ok(p)
            }
            Format::Json => {
                let p = self.path(&format!("{stem}.json"));
                qii_core::io::write_json(&p, &rows)?;
                Ok(p)
            }
        }
    }

    pub fn json<S: Serialize>(&self, name: &str, value: &S) -> CliResult<PathBuf> {
        let p = self.path(name);
        qii_core::io::write_json(&p, value)?;
        Ok(p)
    }

    pub fn manifest<S: Serialize>(&self, command: &str, config: &S, seed: Option<u64>) -> CliResult<()> {
        let m = json!({
            "tool": "qii",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "format": self.format,
            "seed": seed,
            "config": config,
        });
        self.json("manifest.json", &m)?;
        Ok(())
    }
}
