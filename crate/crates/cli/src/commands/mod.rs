pub mod apps;
pub mod figure1;
pub mod loop_io;
pub mod models;
pub mod search;
pub mod verify;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;
use qii_core::{Band, ModelConfig, ModelSpec64};
use serde::{Deserialize, Serialize};

use crate::run::{config_err, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BandArg {
    Lower,
    Upper,
}

impl From<BandArg> for Band {
    fn from(b: BandArg) -> Band {
        match b {
            BandArg::Lower => Band::Lower,
            BandArg::Upper => Band::Upper,
        }
    }
}

/// Model selection flags shared by `models` and `apps`.
#[derive(Debug, Clone, Default, Serialize, Deserialize, clap::Args)]
#[serde(default, rename_all = "kebab-case")]
pub struct ModelFlags {
    /// ssh, creutz, rhombohedral, dirac or tabulated.
    #[arg(long)]
    pub model: Option<String>,
    /// SSH intra-cell hopping.
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    /// SSH inter-cell hopping.
    #[arg(long, allow_negative_numbers = true)]
    pub w: Option<f64>,
    /// Creutz ladder hopping.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Rhombohedral layer count N.
    #[arg(long)]
    pub layers: Option<u32>,
    /// Rhombohedral energy scale.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Dirac velocity.
    #[arg(long)]
    pub vf: Option<f64>,
    /// CSV table (k,dx,dy,dz) for the tabulated model.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Lattice constant.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, value_enum)]
    pub band: Option<BandArg>,
}

impl ModelFlags {
    pub fn to_config(&self) -> CliResult<ModelConfig> {
        let kind = self.model.clone().ok_or_else(|| CliError::Usage("--model is required".into()))?;
        let mut parameters = BTreeMap::new();
        for (key, val) in [("v", self.v), ("w", self.w), ("t", self.t), ("scale", self.scale), ("v_f", self.vf)] {
            if let Some(x) = val {
                parameters.insert(key.to_string(), x);
            }
        }
        if let Some(n) = self.layers {
            parameters.insert("N".into(), n as f64);
        }
        Ok(ModelConfig { kind, parameters, lattice_const: self.a.unwrap_or(1.0), table: self.table.clone() })
    }

    /// The model plus the band to use: lower for chains, upper for Fermi
    /// surfaces of two-dimensional models, unless `--band` says otherwise.
    pub fn resolve(&self) -> CliResult<(ModelConfig, ModelSpec64, Band)> {
        let cfg = self.to_config()?;
        let spec: ModelSpec64 = cfg.to_spec().map_err(config_err)?;
        let band = match self.band {
            Some(b) => b.into(),
            None if spec.dim_k() == 1 => Band::Lower,
            None => Band::Upper,
        };
        Ok((cfg, spec, band))
    }
}

pub fn band_name(b: Band) -> &'static str {
    match b {
        Band::Lower => "lower",
        Band::Upper => "upper",
    }
}

pub fn params_label(cfg: &ModelConfig) -> String {
    let mut parts: Vec<String> = cfg.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
    if cfg.lattice_const != 1.0 {
        parts.push(format!("a={}", cfg.lattice_const));
    }
    if let Some(t) = &cfg.table {
        parts.push(format!("table={}", t.display()));
    }
    parts.join(";")
}
