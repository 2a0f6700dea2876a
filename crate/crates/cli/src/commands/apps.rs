//! `qii apps`: the Wannier, speed-limit, electron–phonon and
//! superfluid-weight bound chains.

use std::f64::consts::PI;

use clap::ValueEnum;
use qii_core::{
    adiabatic_cone_demo, eph_bound_chain, superfluid_weight_1d, wannier_bound_chain, BoundChain, MetricConvention,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{band_name, ModelFlags};
use crate::run::{config_err, CliError, CliResult, Run};

/// Absolute slack allowed between neighbouring chain entries.
const CHAIN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum App {
    Wannier,
    Speed,
    Eph,
    Sfweight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Computed,
    Minimal,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, clap::Args)]
#[serde(default, rename_all = "kebab-case")]
pub struct AppsArgs {
    #[arg(long, value_enum)]
    pub app: Option<App>,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelFlags,
    /// k-points, or samples on the Fermi circle.
    #[arg(long)]
    pub nk: Option<usize>,
    /// Fermi energy (eph).
    #[arg(long)]
    pub ef: Option<f64>,
    /// Attractive interaction strength (sfweight).
    #[arg(long)]
    pub u: Option<f64>,
    /// Band filling in (0, 1) (sfweight).
    #[arg(long)]
    pub nu: Option<f64>,
    /// Metric convention for sfweight.
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    /// Cone half-angle of the precessing field (speed).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Drive period in Larmor periods (speed, at least 50).
    #[arg(long)]
    pub periods: Option<f64>,
    /// Integrator steps (speed).
    #[arg(long)]
    pub steps: Option<usize>,
}

pub fn run(args: &AppsArgs, out: &Run) -> CliResult<()> {
    let app = args.app.ok_or_else(|| CliError::Usage("--app is required (wannier, speed, eph, sfweight)".into()))?;
    let nk = args.nk.unwrap_or(4096);
    if nk < 3 {
        return Err(CliError::Usage("--nk must be at least 3".into()));
    }
    let (chain, extra) = match app {
        App::Speed => {
            let theta = args.theta.unwrap_or(PI / 3.0);
            let periods = args.periods.unwrap_or(100.0);
            let steps = args.steps.unwrap_or(20_000);
            let cfg = json!({"app": app, "theta": theta, "periods": periods, "steps": steps});
            out.manifest("apps", &cfg, None)?;
            let demo = adiabatic_cone_demo(theta, periods, steps).map_err(config_err)?;
            let chain = demo.report.chain.clone().expect("cyclic demo carries a chain");
            let extra = json!({
                "residual": demo.report.residual,
                "mean_spread": demo.report.mean_spread,
                "gamma_b": demo.gamma_b,
                "adiabatic_gamma": demo.adiabatic_gamma,
            });
            (chain, extra)
        }
        _ => {
            let (mcfg, spec, band) = args.model.resolve()?;
            let mut cfg = json!({"app": app, "model": mcfg, "band": band_name(band), "nk": nk});
            let chain = match app {
                App::Wannier => {
                    out.manifest("apps", &cfg, None)?;
                    wannier_bound_chain(&spec, band, nk).map_err(config_err)?
                }
                App::Eph => {
                    let ef = args.ef.unwrap_or(1.0);
                    cfg["ef"] = json!(ef);
                    out.manifest("apps", &cfg, None)?;
                    eph_bound_chain(&spec, ef, nk, band).map_err(config_err)?
                }
                App::Sfweight => {
                    let u = args.u.unwrap_or(1.0);
                    let nu = args.nu.unwrap_or(0.5);
                    let conv = match args.convention.unwrap_or(ConventionArg::Computed) {
                        ConventionArg::Computed => MetricConvention::Computed,
                        ConventionArg::Minimal => MetricConvention::MinimalDimerized,
                    };
                    cfg["u"] = json!(u);
                    cfg["nu"] = json!(nu);
                    cfg["convention"] = json!(conv);
                    out.manifest("apps", &cfg, None)?;
                    superfluid_weight_1d(&spec, u, nu, nk, band, conv).map_err(config_err)?
                }
                App::Speed => unreachable!(),
            };
            (chain, json!({}))
        }
    };
    report(&chain, extra, out)
}

fn report(chain: &BoundChain, extra: serde_json::Value, out: &Run) -> CliResult<()> {
    out.table(&format!("chain_{}", chain.name), &chain.entries)?;
    let monotone = chain.is_monotone(CHAIN_TOL);
    out.json(
        "chain.json",
        &json!({"chain": chain, "monotone": monotone, "max_violation": chain.max_violation(), "details": extra}),
    )?;
    println!("{}:", chain.name);
    for e in &chain.entries {
        println!("  {:<28} {:>18.12} {}", e.label, e.value, e.unit);
    }
    for n in &chain.notes {
        println!("  note: {n}");
    }
    if !monotone {
        return Err(CliError::Violation(format!(
            "chain {} is not monotone (excess {:e})",
            chain.name,
            chain.max_violation()
        )));
    }
    Ok(())
}
