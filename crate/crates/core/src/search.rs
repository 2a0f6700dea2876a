//! Derivative-free search for loops that minimize the strong-QII margin,
//! and the circle-perturbation scan.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QgError, Result};
use crate::geometry::loop_berry_phase;
use crate::inequalities::{strong_qii, summarize_split};
use crate::loops::{bloch_circle, fourier_loop, perturb_circle, FourierLoopSpec};
use crate::scalar::principal_angle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Hilbert-space dimension.
    pub m: usize,
    /// Harmonic cutoff.
    pub k: usize,
    /// Loop resolution.
    pub n: usize,
    /// Total objective evaluations across restarts.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Coefficients are confined to `[−coeff_bound, coeff_bound]`.
    pub coeff_bound: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { m: 3, k: 2, n: 256, budget: 10_000, restarts: 4, seed: 0, coeff_bound: 2.0 }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(QgError::InvalidConfig(format!("dimension {} < 2", self.m)));
        }
        if self.budget < 100 {
            return Err(QgError::InvalidConfig(format!("budget {} < 100", self.budget)));
        }
        if self.restarts == 0 || self.restarts > self.budget {
            return Err(QgError::InvalidConfig(format!("restarts {} must be in 1..=budget", self.restarts)));
        }
        if !(self.coeff_bound > 0.0) || !self.coeff_bound.is_finite() {
            return Err(QgError::InvalidConfig(format!("coefficient bound {} must be positive", self.coeff_bound)));
        }
        if self.n < 8 * (self.k + 1) {
            return Err(QgError::BadResolution(format!("n = {} below 8(K+1)", self.n)));
        }
        Ok(())
    }

    fn dims(&self) -> usize {
        FourierLoopSpec::<f64>::param_count(self.m, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Smallest margin found, at resolution `n`.
    pub best_margin: f64,
    /// Saturation tolerance of the best loop at resolution `n`.
    pub tol: f64,
    pub best_spec: FourierLoopSpec<f64>,
    pub evals: usize,
    /// `(evaluation index, best margin so far)` at every improvement.
    pub history: Vec<(usize, f64)>,
    /// Margin of the best spec re-evaluated at `4n`, when `best_margin < −tol`.
    pub recheck_margin: Option<f64>,
    /// A negative margin that survived the re-check.
    pub violation: bool,
}

/// Smallest strong-QII margin over the simple sub-loops of a Fourier loop,
/// together with the largest saturation tolerance among them.
pub fn qii_objective_with_tol(spec: &FourierLoopSpec<f64>) -> Result<(f64, f64)> {
    let lp = fourier_loop(spec)?;
    let parts = summarize_split(&lp);
    let mut worst = f64::INFINITY;
    let mut tol: f64 = 0.0;
    for s in &parts {
        let r = strong_qii(s);
        worst = worst.min(r.margin);
        tol = tol.max(r.tol);
    }
    Ok((worst, tol))
}

pub fn qii_objective(spec: &FourierLoopSpec<f64>) -> Result<f64> {
    qii_objective_with_tol(spec).map(|(m, _)| m)
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    // splitmix64 step keeps per-restart streams decorrelated
    let mut z = seed.wrapping_add((restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Objective<'a> {
    cfg: &'a SearchConfig,
    evals: usize,
    limit: usize,
    offset: usize,
    best: f64,
    best_x: Vec<f64>,
    history: Vec<(usize, f64)>,
}

impl Objective<'_> {
    fn exhausted(&self) -> bool {
        self.evals >= self.limit
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let value = FourierLoopSpec::from_params(self.cfg.m, self.cfg.k, self.cfg.n, x)
            .and_then(|s| qii_objective(&s))
            .unwrap_or(f64::INFINITY);
        let value = if value.is_nan() { f64::INFINITY } else { value };
        if value < self.best {
            self.best = value;
            self.best_x = x.to_vec();
            self.history.push((self.offset + self.evals, value));
        }
        value
    }
}

fn clamp(x: &mut [f64], b: f64) {
    for v in x {
        *v = v.clamp(-b, b);
    }
}

/// Nelder–Mead on the coefficient box, re-seeding a fresh simplex around the
/// best point whenever the current one collapses.
fn nelder_mead(obj: &mut Objective<'_>, x0: Vec<f64>, rng: &mut ChaCha8Rng) {
    let b = obj.cfg.coeff_bound;
    let dim = x0.len();
    let mut step = 0.25 * b;
    let mut centre = x0;
    while !obj.exhausted() {
        // build a simplex around `centre`
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        let f0 = obj.eval(&centre);
        simplex.push((centre.clone(), f0));
        for i in 0..dim {
            if obj.exhausted() {
                return;
            }
            let mut x = centre.clone();
            x[i] += if rng.gen_bool(0.5) { step } else { -step };
            clamp(&mut x, b);
            let f = obj.eval(&x);
            simplex.push((x, f));
        }
        loop {
            if obj.exhausted() {
                return;
            }
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[dim].1 - simplex[0].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if (spread.is_finite() && spread.abs() <= 1e-12 * (1.0 + simplex[0].1.abs())) || diameter < 1e-9 * b {
                break;
            }
            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / dim as f64;
                }
            }
            let worst = simplex[dim].clone();
            let toward = |t: f64| {
                let mut p: Vec<f64> = centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect();
                clamp(&mut p, b);
                p
            };
            let xr = toward(1.0);
            let fr = obj.eval(&xr);
            if fr < simplex[0].1 {
                if obj.exhausted() {
                    return;
                }
                let xe = toward(2.0);
                let fe = obj.eval(&xe);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
                continue;
            }
            if obj.exhausted() {
                return;
            }
            let (xc, fc) = if fr < worst.1 {
                let x = toward(0.5);
                let f = obj.eval(&x);
                (x, f)
            } else {
                let x = toward(-0.5);
                let f = obj.eval(&x);
                (x, f)
            };
            if fc < worst.1.min(fr) {
                simplex[dim] = (xc, fc);
                continue;
            }
            // shrink toward the best vertex
            let best = simplex[0].0.clone();
            for v in simplex.iter_mut().skip(1) {
                if obj.exhausted() {
                    return;
                }
                let x: Vec<f64> = best.iter().zip(&v.0).map(|(a, c)| a + 0.5 * (c - a)).collect();
                let f = obj.eval(&x);
                *v = (x, f);
            }
        }
        // stagnation: new simplex around the best point with a fresh scale
        centre = obj.best_x.clone();
        step = (step * 0.5).max(1e-3 * b);
        if step <= 1e-3 * b {
            step = 0.25 * b * rng.gen_range(0.1..1.0);
        }
    }
}

/// Best margin, best parameters, evaluations used and improvement history.
type RestartRun = (f64, Vec<f64>, usize, Vec<(usize, f64)>);

/// Multi-restart minimization of [`qii_objective`]. Restarts run in parallel
/// with seeds derived from `cfg.seed`, so results do not depend on scheduling.
pub fn minimize_margin(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let per = cfg.budget / cfg.restarts;
    let extra = cfg.budget % cfg.restarts;
    let runs: Vec<RestartRun> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.seed, r));
            let limit = per + usize::from(r < extra);
            let offset = r * per + r.min(extra);
            let x0: Vec<f64> =
                (0..cfg.dims()).map(|_| rng.gen_range(-cfg.coeff_bound..=cfg.coeff_bound) * 0.5).collect();
            let mut obj = Objective {
                cfg,
                evals: 0,
                limit,
                offset,
                best: f64::INFINITY,
                best_x: x0.clone(),
                history: Vec::new(),
            };
            nelder_mead(&mut obj, x0, &mut rng);
            (obj.best, obj.best_x, obj.evals, obj.history)
        })
        .collect();

    let evals = runs.iter().map(|r| r.2).sum();
    let mut history: Vec<(usize, f64)> = runs.iter().flat_map(|r| r.3.iter().copied()).collect();
    history.sort_by_key(|h| h.0);
    let mut running = f64::INFINITY;
    history.retain(|&(_, v)| {
        let keep = v < running;
        running = running.min(v);
        keep
    });
    let (best_margin, best_x) = runs
        .into_iter()
        .map(|r| (r.0, r.1))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one restart");
    let best_spec = FourierLoopSpec::from_params(cfg.m, cfg.k, cfg.n, &best_x)?;
    let (margin, tol) = qii_objective_with_tol(&best_spec)?;
    debug_assert!((margin - best_margin).abs() <= 1e-12 || !best_margin.is_finite());

    let (recheck_margin, violation) = if margin < -tol {
        let (fine, fine_tol) = qii_objective_with_tol(&best_spec.with_resolution(4 * cfg.n))?;
        (Some(fine), fine < -fine_tol)
    } else {
        (None, false)
    };
    Ok(SearchResult { best_margin: margin, tol, best_spec, evals, history, recheck_margin, violation })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeFit {
    pub mode: usize,
    /// Fitted exponent `p` in `|δγ| ∝ ε^p`.
    pub slope: f64,
    pub intercept: f64,
    /// `(ε, |γ(ε) − γ(0)|)` rows used in the fit.
    pub points: Vec<(f64, f64)>,
}

impl ModeFit {
    /// Phase change is at least second order in the perturbation.
    pub fn is_extremal(&self) -> bool {
        self.slope >= 2.0 - 0.1
    }
}

/// Log–log fit of the Berry-phase change under polar-angle perturbations
/// `θ + ε cos(mode·φ)` of the circle at `theta`. Zero amplitudes are skipped.
pub fn extremality_scan(theta: f64, modes: &[usize], eps_grid: &[f64], n: usize) -> Result<Vec<ModeFit>> {
    let base = loop_berry_phase(&bloch_circle(theta, n)?);
    modes
        .iter()
        .map(|&mode| {
            let mut points = Vec::new();
            for &eps in eps_grid.iter().filter(|&&e| e > 0.0) {
                let g = loop_berry_phase(&perturb_circle(theta, eps, mode, n)?);
                let dg = principal_angle(g - base).abs();
                if dg > 0.0 {
                    points.push((eps, dg));
                }
            }
            if points.len() < 4 {
                return Err(QgError::OutOfRange(format!(
                    "need at least 4 positive amplitudes with nonzero phase change, got {}",
                    points.len()
                )));
            }
            let (slope, intercept) = fit_line(points.iter().map(|(e, d)| (e.ln(), d.ln())));
            Ok(ModeFit { mode, slope, intercept, points })
        })
        .collect()
}

/// Ordinary least squares `y = slope·x + intercept`.
fn fit_line(pts: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let n = pts.clone().count() as f64;
    let (sx, sy) = pts.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
