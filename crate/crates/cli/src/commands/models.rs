//! `qii models`: distance and Berry phase of a band loop, per sub-loop and
//! in aggregate.

use qii_core::{aggregate_subloops, strong_qii, summarize, summarize_split, weak_qii, Loop64};
use serde::{Deserialize, Serialize};

use super::{band_name, params_label, ModelFlags};
use crate::run::{config_err, CliError, CliResult, Run};
use crate::svg::qii_scatter;

#[derive(Debug, Clone, Default, Serialize, Deserialize, clap::Args)]
#[serde(default, rename_all = "kebab-case")]
pub struct ModelsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelFlags,
    /// k-points across the zone, or samples on the Fermi circle.
    #[arg(long)]
    pub nk: Option<usize>,
    /// Fermi energy for two-dimensional models.
    #[arg(long)]
    pub ef: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelsConfig {
    pub model: qii_core::ModelConfig,
    pub band: String,
    pub nk: usize,
    pub ef: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct ModelRow {
    model: String,
    params: String,
    band: String,
    n: usize,
    d_fs: f64,
    gamma_b: f64,
    subloops: usize,
    sum_d: f64,
    sum_gamma: f64,
    strong_margin: f64,
    weak_margin: f64,
}

pub fn run(args: &ModelsArgs, out: &Run) -> CliResult<()> {
    let (mcfg, spec, band) = args.model.resolve()?;
    let nk = args.nk.unwrap_or(1024);
    if nk < 3 {
        return Err(CliError::Usage("--nk must be at least 3".into()));
    }
    let two_d = spec.dim_k() == 2;
    let ef = two_d.then(|| args.ef.unwrap_or(1.0));
    let cfg = ModelsConfig { model: mcfg.clone(), band: band_name(band).into(), nk, ef };
    out.manifest("models", &cfg, None)?;

    let lp: Loop64 = match ef {
        Some(e) => spec.fermi_surface_loop(e, nk, band).map_err(config_err)?.lp,
        None => spec.bz_loop(band, nk).map_err(config_err)?,
    };
    let whole = summarize(&lp);
    let parts = summarize_split(&lp);
    let agg = aggregate_subloops(&parts)?;
    let strong = parts.iter().map(strong_qii).map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let row = ModelRow {
        model: spec.name().into(),
        params: params_label(&mcfg),
        band: band_name(band).into(),
        n: lp.len(),
        d_fs: whole.d_fs,
        gamma_b: whole.gamma_b,
        subloops: parts.len(),
        sum_d: agg.lhs,
        sum_gamma: agg.rhs,
        strong_margin: strong,
        weak_margin: weak_qii(&whole).margin,
    };
    println!(
        "{} [{}] band={} n={}: d={:.9} gamma={:.9} subloops={} sum_d={:.9} sum_gamma={:.9}",
        row.model, row.params, row.band, row.n, row.d_fs, row.gamma_b, row.subloops, row.sum_d, row.sum_gamma
    );
    let points: Vec<(f64, f64)> = parts.iter().map(|s| (s.d_fs, s.gamma_b)).collect();
    out.table("models", &[row])?;
    qii_scatter(&points, &format!("{} band loop", spec.name())).save(&out.path("models.svg"))?;

    let bad = parts.iter().map(strong_qii).find(|r| !r.holds());
    if let Some(r) = bad {
        return Err(CliError::Violation(format!("strong inequality margin {:e} below -{:e}", r.margin, r.tol)));
    }
    Ok(())
}
