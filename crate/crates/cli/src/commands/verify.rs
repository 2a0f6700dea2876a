//! `qii verify`: strong and weak inequalities on a batch of random loops.

use qii_core::io::{save_loop, LoopHeader};
use qii_core::{fourier_loop, strong_qii, summarize, summarize_split, weak_qii, FourierLoopSpec64, Loop64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::run::{CliError, CliResult, Run};
use crate::svg::qii_scatter;

#[derive(Debug, Clone, Default, Serialize, Deserialize, clap::Args)]
#[serde(default, rename_all = "kebab-case")]
pub struct VerifyArgs {
    /// Hilbert-space dimension (at least 2).
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of random loops.
    #[arg(long)]
    pub loops: Option<usize>,
    /// Harmonic cutoff of the random Fourier loops.
    #[arg(long)]
    pub k: Option<usize>,
    /// Points per loop.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Coefficient amplitude scale.
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub m: usize,
    pub loops: usize,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub scale: f64,
}

impl VerifyArgs {
    pub fn resolve(&self) -> CliResult<VerifyConfig> {
        let c = VerifyConfig {
            m: self.m.unwrap_or(2),
            loops: self.loops.unwrap_or(1000),
            k: self.k.unwrap_or(2),
            n: self.n.unwrap_or(2048),
            seed: self.seed.unwrap_or(0),
            scale: self.scale.unwrap_or(1.0),
        };
        if c.m < 2 {
            return Err(CliError::Usage(format!(
                "--m {} describes a single point in state space; loops need m >= 2",
                c.m
            )));
        }
        if c.loops == 0 {
            return Err(CliError::Usage("--loops must be positive".into()));
        }
        if c.n < 8 * (c.k + 1) {
            return Err(CliError::Usage(format!("--n {} is below 8(k+1) = {}", c.n, 8 * (c.k + 1))));
        }
        if !(c.scale > 0.0 && c.scale.is_finite()) {
            return Err(CliError::Usage("--scale must be positive".into()));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Serialize)]
struct MarginRow {
    index: usize,
    d_fs: f64,
    gamma_b: f64,
    weak_margin: f64,
    weak_magnitude_margin: f64,
    weak_tol: f64,
    subloops: usize,
    strong_margin: f64,
    strong_tol: f64,
    conjecture: bool,
}

impl MarginRow {
    fn weak_violated(&self) -> bool {
        self.weak_margin < -self.weak_tol || self.weak_magnitude_margin < -self.weak_tol
    }

    fn strong_violated(&self) -> bool {
        self.strong_margin < -self.strong_tol
    }
}

fn check(index: usize, lp: &Loop64) -> MarginRow {
    let s = summarize(lp);
    let weak = weak_qii(&s);
    let parts = summarize_split(lp);
    let strong: Vec<_> = parts.iter().map(strong_qii).collect();
    let worst = strong
        .iter()
        .min_by(|a, b| (a.margin + a.tol).total_cmp(&(b.margin + b.tol)))
        .expect("split yields at least one loop");
    MarginRow {
        index,
        d_fs: s.d_fs,
        gamma_b: s.gamma_b,
        weak_margin: weak.margin,
        weak_magnitude_margin: weak.magnitude_margin.unwrap_or(weak.margin),
        weak_tol: weak.tol,
        subloops: parts.len(),
        strong_margin: worst.margin,
        strong_tol: worst.tol,
        conjecture: strong.iter().any(|r| r.conjecture),
    }
}

pub fn run(args: &VerifyArgs, out: &Run) -> CliResult<()> {
    let cfg = args.resolve()?;
    out.manifest("verify", &cfg, Some(cfg.seed))?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let specs: Vec<FourierLoopSpec64> =
        (0..cfg.loops).map(|_| FourierLoopSpec64::random(cfg.m, cfg.k, cfg.n, cfg.scale, &mut rng)).collect();
    let rows = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| fourier_loop(spec).map(|lp| check(i, &lp)))
        .collect::<Result<Vec<_>, _>>()?;

    out.table("margins", &rows)?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.d_fs, r.gamma_b)).collect();
    qii_scatter(&points, &format!("random loops, m = {}", cfg.m)).save(&out.path("scatter.svg"))?;

    let min = |f: fn(&MarginRow) -> f64| rows.iter().map(f).fold(f64::INFINITY, f64::min);
    let bad: Vec<&MarginRow> = rows.iter().filter(|r| r.weak_violated() || r.strong_violated()).collect();
    let summary = json!({
        "loops": rows.len(),
        "min_weak_margin": min(|r| r.weak_margin),
        "min_weak_magnitude_margin": min(|r| r.weak_magnitude_margin),
        "min_strong_margin": min(|r| r.strong_margin),
        "weak_violations": rows.iter().filter(|r| r.weak_violated()).count(),
        "strong_violations": rows.iter().filter(|r| r.strong_violated()).count(),
    });
    out.json("summary.json", &summary)?;
    println!(
        "verify m={} loops={}: min weak margin {:.3e}, min |weak| margin {:.3e}, min strong margin {:.3e}",
        cfg.m,
        rows.len(),
        summary["min_weak_margin"].as_f64().unwrap_or(f64::NAN),
        summary["min_weak_magnitude_margin"].as_f64().unwrap_or(f64::NAN),
        summary["min_strong_margin"].as_f64().unwrap_or(f64::NAN),
    );

    if let Some(first) = bad.first() {
        let lp = fourier_loop(&specs[first.index])?;
        let header = LoopHeader::new(
            &lp,
            "fourier",
            json!({"k": cfg.k, "scale": cfg.scale, "index": first.index, "spec": specs[first.index]}),
            Some(cfg.seed),
        );
        let path = out.path(&format!("violation_{}.csv", first.index));
        save_loop(&path, &lp, &header)?;
        return Err(CliError::Violation(format!(
            "{} of {} loops violate a bound; first offender written to {}",
            bad.len(),
            rows.len(),
            path.display()
        )));
    }
    Ok(())
}
