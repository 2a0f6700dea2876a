//! `qii search`: multi-restart minimisation of the strong-inequality margin.
//!
//! With `--seeds` each seed gets its own run record; a record already present
//! in the output directory is reused, so an interrupted list can be resumed.

use qii_core::io::{save_loop, LoopHeader};
use qii_core::{fourier_loop, minimize_margin, SearchConfig, SearchResult};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::run::{config_err, CliError, CliResult, Run};

#[derive(Debug, Clone, Default, Serialize, Deserialize, clap::Args)]
#[serde(default, rename_all = "kebab-case")]
pub struct SearchArgs {
    /// Hilbert-space dimension.
    #[arg(long)]
    pub m: Option<usize>,
    /// Harmonic cutoff.
    #[arg(long)]
    pub k: Option<usize>,
    /// Loop resolution.
    #[arg(long)]
    pub n: Option<usize>,
    /// Objective evaluations per seed, split across restarts.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run one search per listed seed (overrides --seed).
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Box bound on the Fourier coefficients.
    #[arg(long)]
    pub coeff_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchRunConfig {
    #[serde(flatten)]
    pub search: SearchConfig,
    pub seeds: Vec<u64>,
}

impl SearchArgs {
    pub fn resolve(&self) -> CliResult<SearchRunConfig> {
        let d = SearchConfig::default();
        let search = SearchConfig {
            m: self.m.unwrap_or(d.m),
            k: self.k.unwrap_or(d.k),
            n: self.n.unwrap_or(d.n),
            budget: self.budget.unwrap_or(d.budget),
            restarts: self.restarts.unwrap_or(d.restarts),
            seed: self.seed.unwrap_or(d.seed),
            coeff_bound: self.coeff_bound.unwrap_or(d.coeff_bound),
        };
        search.validate().map_err(config_err)?;
        let seeds = self.seeds.clone().unwrap_or_else(|| vec![search.seed]);
        if seeds.is_empty() {
            return Err(CliError::Usage("--seeds is empty".into()));
        }
        Ok(SearchRunConfig { search, seeds })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RunRecord {
    config: SearchConfig,
    result: SearchResult,
}

pub fn run(args: &SearchArgs, out: &Run) -> CliResult<()> {
    let cfg = args.resolve()?;
    out.manifest("search", &cfg, Some(cfg.seeds[0]))?;

    let mut summary = Vec::new();
    let mut found = Vec::new();
    for &seed in &cfg.seeds {
        let sc = SearchConfig { seed, ..cfg.search.clone() };
        let path = out.path(&format!("search_seed{seed}.json"));
        let previous = std::fs::read_to_string(&path)
            .ok()
            .and_then(|t| serde_json::from_str::<RunRecord>(&t).ok())
            .filter(|r| r.config == sc);
        let rec = match previous {
            Some(r) => {
                println!("seed {seed}: reusing {}", path.display());
                r
            }
            None => {
                let rec = RunRecord { result: minimize_margin(&sc)?, config: sc };
                out.json(&format!("search_seed{seed}.json"), &rec)?;
                rec
            }
        };
        let r = &rec.result;
        println!(
            "seed {seed}: best margin {:.3e} (tol {:.1e}) after {} evaluations{}",
            r.best_margin,
            r.tol,
            r.evals,
            if r.violation { ", VIOLATION" } else { "" }
        );
        summary.push(json!({
            "seed": seed,
            "best_margin": r.best_margin,
            "tol": r.tol,
            "evals": r.evals,
            "recheck_margin": r.recheck_margin,
            "violation": r.violation,
        }));
        if r.violation {
            let spec = r.best_spec.with_resolution(4 * rec.config.n);
            let lp = fourier_loop(&spec)?;
            let header = LoopHeader::new(&lp, "fourier", json!({"spec": spec}), Some(seed));
            let p = out.path(&format!("counterexample_seed{seed}.csv"));
            save_loop(&p, &lp, &header)?;
            found.push(p);
        }
    }
    out.json("search_summary.json", &summary)?;
    if !found.is_empty() {
        let list: Vec<String> = found.iter().map(|p| p.display().to_string()).collect();
        return Err(CliError::Violation(format!("negative margin survived the re-check: {}", list.join(", "))));
    }
    Ok(())
}
