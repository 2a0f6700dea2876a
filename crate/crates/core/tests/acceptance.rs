//! The twelve acceptance criteria, one line each. Runs with its own
//! harness so the lines are printed under plain `cargo test`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qii_core::{
    adiabatic_cone_demo, bloch_circle, bloch_solid_angle, dirac_metric, eph_bound_chain, evolve, extremality_scan,
    fourier_loop, great_circle, minimize_margin, qgt_at, random_simple_two_band, regular_polygon_quotient, speed_residual,
    strong_qii, summarize, summarize_split, superfluid_weight_1d, wannier_bound_chain, Band, BlochFourier, BoundChain,
    CMatrix64, FourierLoopSpec64, MetricConvention, ModelSpec64, SearchConfig, StateVector64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: {got} differs from {want} by more than {tol:e}"))
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn budget(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("took {t:.2?}, limit {limit:?}"))
    }
}

fn c1_planar_quotients() -> Outcome {
    let start = Instant::now();
    for (n, want) in [(3, 1.653), (4, 1.273), (6, 1.103)] {
        within(&format!("N = {n}"), regular_polygon_quotient::<f64>(n).map_err(err)?, want, 1e-3)?;
    }
    let q = regular_polygon_quotient::<f64>(10_000).map_err(err)?;
    within("N = 10^4", q, 1.0, 1e-6)?;
    budget(start, Duration::from_secs(1))?;
    Ok(format!("N=10^4 quotient {q:.9}"))
}

fn c2_circle_saturation() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 1..=30 {
        let theta = i as f64 / 10.0;
        let r = strong_qii(&summarize(&bloch_circle(theta, 8192).map_err(err)?));
        within(&format!("margin at theta = {theta}"), r.margin, 0.0, 1e-5)?;
        worst = worst.max(r.margin.abs());
    }
    budget(start, Duration::from_secs(10))?;
    Ok(format!("max |margin| {worst:.2e}"))
}

fn c3_weak_suite() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for (seed, m) in (2..=5).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let specs: Vec<_> = (0..10_000).map(|_| FourierLoopSpec64::random(m, 2, 2048, 1.0, &mut rng)).collect();
        let margins = specs
            .par_iter()
            .map(|s| {
                let sum = summarize(&fourier_loop(s)?);
                Ok((sum.d_fs - sum.gamma_b).min(sum.d_fs - sum.gamma_b.abs()))
            })
            .collect::<qii_core::Result<Vec<f64>>>()
            .map_err(err)?;
        let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-6 {
            return Err(format!("M = {m}: margin {min:e}"));
        }
        worst = worst.min(min);
    }
    budget(start, Duration::from_secs(300))?;
    Ok(format!("4 x 10^4 loops, smallest d - |gamma| {worst:.4}"))
}

fn c4_great_circle() -> Outcome {
    let s = summarize(&great_circle([0.3, -0.5, 0.8], 8192).map_err(err)?);
    within("d_FS", s.d_fs, PI, 1e-6)?;
    within("gamma_B", s.gamma_b, PI, 1e-6)?;
    Ok(format!("d - pi = {:.1e}, gamma - pi = {:.1e}", s.d_fs - PI, s.gamma_b - PI))
}

fn c5_solid_angle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let lp = random_simple_two_band(1024, &mut rng).map_err(err)?;
        let gamma = summarize(&lp).gamma_b;
        let omega = bloch_solid_angle(&lp).map_err(err)?;
        within(&format!("loop {i}"), gamma.abs(), omega.abs() / 2.0, 1e-6)?;
        worst = worst.max((gamma.abs() - omega.abs() / 2.0).abs());
    }
    Ok(format!("max deviation {worst:.1e}"))
}

fn c6_dirac_metric() -> Outcome {
    let model = ModelSpec64::dirac(1.0);
    let chart = model.band_chart(Band::Upper).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = 10f64.powf(rng.gen_range(-1.0..1.0));
        let phi = rng.gen_range(0.0..2.0 * PI);
        let kv = [k * phi.cos(), k * phi.sin()];
        let q = qgt_at(&chart, &kv).map_err(err)?;
        let exact = dirac_metric(kv).map_err(err)?;
        let scale = 1.0 / (4.0 * k * k);
        for i in 0..2 {
            for j in 0..2 {
                let rel = (q.g[i][j] - exact[i][j]).abs() / scale;
                worst = worst.max(rel);
                if rel > 1e-6 {
                    return Err(format!("|k| = {k}: g[{i}][{j}] relative error {rel:e}"));
                }
            }
        }
        let tr_rel = (q.trace_g() - scale).abs() / scale;
        let grr_rel = q.metric_along(&[phi.cos(), phi.sin()]).abs() / scale;
        if tr_rel > 1e-6 || grr_rel > 1e-6 {
            return Err(format!("|k| = {k}: Tr g error {tr_rel:e}, g_rr {grr_rel:e}"));
        }
    }
    Ok(format!("max relative error {worst:.1e}"))
}

fn c7_eph_chain() -> Outcome {
    for (vf, ef) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)] {
        let chain = eph_bound_chain(&ModelSpec64::dirac(vf), ef, 8192, Band::Upper).map_err(err)?;
        let want = PI * vf / (2.0 * ef);
        for e in &chain.entries {
            within(&format!("(v_F, E_F) = ({vf}, {ef}) {}", e.label), e.value, want, 1e-6)?;
        }
    }
    Ok("all entries equal pi v_F / 2E_F".into())
}

fn c8_quantization() -> Outcome {
    let n = 4096;
    let trivial = summarize(&ModelSpec64::ssh(1.0, 0.5).bz_loop(Band::Lower, n).map_err(err)?);
    within("SSH v > w gamma", trivial.gamma_b, 0.0, 1e-5)?;
    let topo = summarize(&ModelSpec64::ssh(0.5, 1.0).bz_loop(Band::Lower, n).map_err(err)?);
    within("SSH v < w |gamma|", topo.gamma_b.abs(), PI, 1e-5)?;
    let creutz = summarize(&ModelSpec64::creutz(1.0).bz_loop(Band::Lower, n).map_err(err)?);
    within("Creutz d", creutz.d_fs, PI, 1e-5)?;
    within("Creutz |gamma|", creutz.gamma_b.abs(), PI, 1e-5)?;
    for layers in 1..=5u32 {
        let m = ModelSpec64::rhombohedral(layers, 1.0).map_err(err)?;
        let fl = m.fermi_surface_loop(1.0, n, Band::Upper).map_err(err)?;
        let parts = summarize_split(&fl.lp);
        let d: f64 = parts.iter().map(|s| s.d_fs).sum();
        let g: f64 = parts.iter().map(|s| s.gamma_b).sum();
        let want = layers as f64 * PI;
        within(&format!("N = {layers} aggregate d"), d, want, 1e-5)?;
        within(&format!("N = {layers} aggregate |gamma|"), g.abs(), want, 1e-5)?;
    }
    Ok("SSH 0 / pi, Creutz pi, rhombohedral N pi for N = 1..5".into())
}

fn random_drive(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> CMatrix64 {
    let mut c = [[0.0; 4]; 3];
    for row in &mut c {
        *row = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI)];
    }
    move |t: f64| CMatrix64::bloch_hamiltonian(0.0, c.map(|[a, b, w, p]| a + b * (w * t + p).cos()))
}

fn c9_speed_limit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let h = random_drive(&mut rng);
        let theta = rng.gen_range(0.1..3.0);
        let psi0 = StateVector64::bloch(theta, rng.gen_range(0.0..2.0 * PI));
        let traj = evolve(&h, &psi0, 2.0 * PI, 10_000).map_err(err)?;
        let r = speed_residual(&traj);
        if r > 1e-4 {
            return Err(format!("drive {i}: residual {r:e}"));
        }
        worst = worst.max(r);
    }
    let demo = adiabatic_cone_demo(PI / 3.0, 100.0, 20_000).map_err(err)?;
    let chain = demo.report.chain.as_ref().ok_or("cone demo is not cyclic")?;
    let margin = chain.entries[0].value - chain.entries[1].value;
    if margin.is_nan() || margin <= 0.0 {
        return Err(format!("cone demo margin {margin}"));
    }
    Ok(format!("max residual {worst:.1e}; cone demo tau - |gamma|/<dE> = {margin:.3}"))
}

fn monotone(label: &str, chain: &BoundChain) -> Result<(), String> {
    if chain.is_monotone(1e-6) {
        Ok(())
    } else {
        Err(format!("{label}: {} chain {:?} not monotone", chain.name, chain.values()))
    }
}

fn c10_chains() -> Outcome {
    let n_k = 4096;
    let builtins = [
        ("ssh(1, 0.5)", ModelSpec64::ssh(1.0, 0.5)),
        ("ssh(0.5, 1)", ModelSpec64::ssh(0.5, 1.0)),
        ("ssh(0, 1)", ModelSpec64::ssh(0.0, 1.0)),
        ("ssh(1, 0)", ModelSpec64::ssh(1.0, 0.0)),
        ("creutz(1)", ModelSpec64::creutz(1.0)),
    ];
    for (label, m) in &builtins {
        monotone(label, &wannier_bound_chain(m, Band::Lower, n_k).map_err(err)?)?;
        for conv in [MetricConvention::Computed, MetricConvention::MinimalDimerized] {
            monotone(label, &superfluid_weight_1d(m, 1.0, 0.5, n_k, Band::Lower, conv).map_err(err)?)?;
        }
    }
    for layers in 1..=5 {
        let m = ModelSpec64::rhombohedral(layers, 1.0).map_err(err)?;
        monotone(&format!("rhombohedral N = {layers}"), &eph_bound_chain(&m, 1.0, 4096, Band::Upper).map_err(err)?)?;
    }
    let creutz = superfluid_weight_1d(&ModelSpec64::creutz(1.0), 1.0, 0.5, n_k, Band::Lower, MetricConvention::Computed)
        .map_err(err)?;
    if !creutz.is_saturated(1e-6) {
        return Err(format!("Creutz superfluid chain not saturated: {:?}", creutz.values()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let models: Vec<_> = (0..1000).map(|_| ModelSpec64::fourier(BlochFourier::random_gapped(2, &mut rng))).collect();
    let worst = models
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let w = wannier_bound_chain(m, Band::Lower, 512).map_err(err)?;
            let s = superfluid_weight_1d(m, 1.0, 0.5, 512, Band::Lower, MetricConvention::Computed).map_err(err)?;
            monotone(&format!("random model {i}"), &w)?;
            monotone(&format!("random model {i}"), &s)?;
            Ok(w.max_violation().max(s.max_violation()))
        })
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(format!("built-ins and 10^3 random models monotone (largest step-up {worst:.1e}); Creutz saturated"))
}

fn c11_extremality() -> Outcome {
    let fits = extremality_scan(PI / 3.0, &[1, 2, 3, 4], &[1e-2, 5e-3, 2.5e-3, 1.25e-3], 8192).map_err(err)?;
    let slopes: Vec<String> = fits.iter().map(|f| format!("{:.3}", f.slope)).collect();
    if let Some(f) = fits.iter().find(|f| !f.is_extremal()) {
        return Err(format!("mode {} slope {:.3}", f.mode, f.slope));
    }
    Ok(format!("slopes {}", slopes.join(", ")))
}

fn c12_conjecture_probe() -> Outcome {
    let cfg = SearchConfig { m: 3, k: 2, n: 256, budget: 100_000, restarts: 20, seed: 0, coeff_bound: 2.0 };
    let r = minimize_margin(&cfg).map_err(err)?;
    if r.violation || r.best_margin < -1e-5 {
        let spec = serde_json::to_string(&r.best_spec).unwrap_or_default();
        return Err(format!("best margin {:e}, re-check {:?}; spec {spec}", r.best_margin, r.recheck_margin));
    }
    Ok(format!("best margin {:.2e} after {} evaluations", r.best_margin, r.evals))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("planar polygon quotients", c1_planar_quotients),
        ("Bloch-circle saturation", c2_circle_saturation),
        ("weak inequality on random loops", c3_weak_suite),
        ("great-circle equality", c4_great_circle),
        ("solid-angle oracle", c5_solid_angle),
        ("Dirac quantum metric", c6_dirac_metric),
        ("electron-phonon chain", c7_eph_chain),
        ("model quantizations", c8_quantization),
        ("speed limit", c9_speed_limit),
        ("superfluid-weight and Wannier chains", c10_chains),
        ("extremality scan", c11_extremality),
        ("conjecture probe", c12_conjecture_probe),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let t = start.elapsed();
        match outcome {
            Ok(msg) => println!("criterion {:>2}: PASS  {name} ({msg}) [{t:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {msg} [{t:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
