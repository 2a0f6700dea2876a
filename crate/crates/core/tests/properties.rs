//! Randomized invariants of states, loops, inequalities, models and the
//! integrator.

use std::f64::consts::PI;

use num_complex::Complex;
use proptest::prelude::*;
use qii_core::{
    bloch_circle, bloch_solid_angle, evolve, figure_eight, fourier_loop, great_circle_turns, loop_berry_phase, loop_distance, overlap,
    projector, qgt_at, random_simple_two_band, refine, spherical_polygon, split_self_intersections, strong_qii, summarize,
    summarize_split, weak_qii, Band, CMatrix64, Chart, FourierLoopSpec64, Loop64, ModelSpec64, ProjectivePoint,
    StateVector, StateVector64, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> StateVector64 {
    let amps = (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    StateVector::from_amplitudes(amps).unwrap()
}

fn fourier(m: usize, n: usize, scale: f64, seed: u64) -> Loop64 {
    let spec = FourierLoopSpec64::random(m, 2, n, scale, &mut ChaCha8Rng::seed_from_u64(seed));
    fourier_loop(&spec).unwrap()
}

fn max_abs_diff(a: &CMatrix64, b: &CMatrix64) -> f64 {
    a.sub(b).max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn overlap_is_conjugate_symmetric(seed in any::<u64>(), dim in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_state(dim, &mut rng), random_state(dim, &mut rng));
        let ab = overlap(&a, &b).unwrap();
        let ba = overlap(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-15);
    }

    #[test]
    fn projector_is_idempotent_with_unit_trace(seed in any::<u64>(), dim in 2usize..8) {
        let psi = random_state(dim, &mut ChaCha8Rng::seed_from_u64(seed));
        let p = projector(&psi);
        prop_assert!(max_abs_diff(&p.matmul(&p), &p) < 1e-14);
        prop_assert!((p.trace() - C64::new(1.0, 0.0)).norm() < 1e-14);
        prop_assert!(p.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn gauge_fixing_is_canonical(seed in any::<u64>(), dim in 2usize..8, alpha in -10.0..10.0f64) {
        let psi = random_state(dim, &mut ChaCha8Rng::seed_from_u64(seed));
        let fixed = psi.gauge_fixed();
        let twice = fixed.gauge_fixed();
        let rotated = psi.with_phase(alpha).gauge_fixed();
        for ((a, b), c) in fixed.amplitudes().iter().zip(twice.amplitudes()).zip(rotated.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-15);
            prop_assert!((a - c).norm() < 1e-12);
        }
        prop_assert!(ProjectivePoint::new(&psi) == ProjectivePoint::new(&psi.with_phase(alpha)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn loop_scalars_are_gauge_invariant(seed in any::<u64>(), m in 2usize..5) {
        let lp = fourier(m, 256, 1.0, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let phases: Vec<f64> = (0..lp.len()).map(|_| rng.gen_range(-PI..PI)).collect();
        let moved = lp.with_phases(&phases);
        prop_assert!((loop_distance(&lp) - loop_distance(&moved)).abs() < 1e-12);
        let (g0, g1) = (loop_berry_phase(&lp), loop_berry_phase(&moved));
        prop_assert!(g1 > -PI && g1 <= PI);
        prop_assert!((g0 - g1).abs() < 1e-12 || ((g0 - g1).abs() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn reversal_negates_the_phase(seed in any::<u64>(), m in 2usize..5) {
        let lp = fourier(m, 256, 1.0, seed);
        let (a, b) = (summarize(&lp), summarize(&lp.reversed()));
        prop_assert!((a.d_fs - b.d_fs).abs() < 1e-12);
        if a.gamma_b.abs() < PI - 1e-9 {
            prop_assert!((a.gamma_b + b.gamma_b).abs() < 1e-12);
        }
    }

    #[test]
    fn refinement_never_shortens(seed in any::<u64>(), m in 2usize..5, factor in 2usize..5) {
        let lp = fourier(m, 64, 1.0, seed);
        prop_assert!(loop_distance(&refine(&lp, factor).unwrap()) >= loop_distance(&lp) - 1e-12);
    }

    #[test]
    fn weak_inequality_on_random_loops(seed in any::<u64>(), m in 2usize..6, scale in 0.1..3.0f64) {
        let s = summarize(&fourier(m, 1024, scale, seed));
        let r = weak_qii(&s);
        prop_assert!(r.holds(), "margin {}", r.margin);
        prop_assert!(r.magnitude_margin.unwrap() >= -r.tol);
    }

    #[test]
    fn split_preserves_total_distance(seed in any::<u64>(), turns in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let axis = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.0)];
        let n = 300 * turns;
        let lp = great_circle_turns(axis, n, turns).unwrap();
        let parts = split_self_intersections(&lp, 1e-7);
        prop_assert_eq!(parts.len(), turns);
        let total: f64 = parts.iter().map(loop_distance).sum();
        prop_assert!((total - loop_distance(&lp)).abs() <= n as f64 * 1e-12);
    }

    #[test]
    fn quarter_circle_bound_below_pi(seed in any::<u64>(), scale in 0.05..0.6f64) {
        // short two-level loops lie under the quarter circle even unsplit
        let s = summarize(&fourier(2, 1024, scale, seed));
        prop_assume!(s.d_fs <= PI);
        let r = strong_qii(&s);
        prop_assert!(r.holds(), "d = {}, gamma = {}, margin {}", s.d_fs, s.gamma_b, r.margin);
        prop_assert!(!r.saturated || r.margin.abs() <= r.tol);
    }

    #[test]
    fn metric_decomposition_on_random_charts(seed in any::<u64>(), dim in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<Vec<C64>> = (0..dim)
            .map(|_| (0..3).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let chart = Chart::with_default_step(2, move |l: &[f64]| {
            let amps = c
                .iter()
                .map(|row| row[0] + row[1] * Complex::from_polar(1.0, l[0]) + row[2] * Complex::from_polar(1.0, 2.0 * l[1]))
                .collect();
            StateVector::from_amplitudes(amps)
        })
        .unwrap();
        let at = [rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)];
        let Ok(q) = chart.eval(&at).and_then(|_| qgt_at(&chart, &at)) else {
            return Ok(());
        };
        for i in 0..2 {
            for j in 0..2 {
                let want = C64::new(q.g[i][j], -0.5 * q.f[i][j]);
                prop_assert!((q.chi.get(i, j) - want).norm() < 1e-10);
            }
        }
        let (a, b, d) = (q.g[0][0], q.g[0][1], q.g[1][1]);
        let lo = 0.5 * (a + d) - (0.25 * (a - d).powi(2) + b * b).sqrt();
        prop_assert!(lo >= -1e-10, "smallest metric eigenvalue {lo}");
    }

    #[test]
    fn chiral_partners_and_flat_creutz(k in -PI..PI, k2 in -3.0..3.0f64, v in -2.0..2.0f64, w in 0.1..2.0f64) {
        let models = [
            ModelSpec64::ssh(v, w),
            ModelSpec64::creutz(w),
            ModelSpec64::rhombohedral(3, w).unwrap(),
            ModelSpec64::dirac(w),
        ];
        for m in &models {
            let kv: Vec<f64> = if m.dim_k() == 1 { vec![k] } else { vec![k2, k] };
            let h = m.hamiltonian(&kv).unwrap();
            let c = m.chiral_operator().unwrap();
            let anti = c.matmul(&h).add(&h.matmul(&c));
            prop_assert!(anti.max_abs() < 1e-12);
        }
        let e = ModelSpec64::creutz(w).energies(&[k]).unwrap();
        prop_assert!((e[0] + 2.0 * w).abs() < 1e-12 && (e[1] - 2.0 * w).abs() < 1e-12);
    }

    #[test]
    fn evolution_accumulates_distance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let h = move |t: f64| CMatrix64::bloch_hamiltonian(0.0, [d[0] * t.cos(), d[1], d[2] * (2.0 * t).sin()]);
        let psi = StateVector64::bloch(rng.gen_range(0.1..3.0), rng.gen_range(0.0..6.0));
        let traj = evolve(&h, &psi, 3.0, 500).unwrap();
        prop_assert_eq!(traj.times.len(), traj.states.len());
        prop_assert_eq!(traj.d_accum.len(), traj.energies_var.len());
        prop_assert!(traj.d_accum.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn strong_inequality_on_simple_two_level_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..10_000 {
        let lp = random_simple_two_band(512, &mut rng).unwrap();
        for s in summarize_split(&lp) {
            let r = strong_qii(&s);
            assert!(r.margin >= -1e-6_f64.max(r.tol), "loop {i}: margin {}", r.margin);
        }
    }
}

#[test]
fn generator_outputs_are_valid_loops() {
    let loops = [
        bloch_circle(0.7, 64).unwrap(),
        spherical_polygon(5, 2.0, 7).unwrap(),
        figure_eight(1.2, 40).unwrap(),
        great_circle_turns([0.0, 1.0, 1.0], 99, 3).unwrap(),
        fourier(5, 128, 2.0, 11),
    ];
    for lp in &loops {
        let n = lp.len();
        for j in 0..n {
            let s = lp.state(j);
            let norm: f64 = s.amplitudes().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-12);
            assert!(overlap(s, lp.state((j + 1) % n)).unwrap().norm() > 1e-9);
        }
    }
}

#[test]
fn polygon_summary_approaches_the_circle() {
    let theta = 1.1f64;
    let p = summarize(&spherical_polygon(256, theta, 16).unwrap());
    let c = summarize(&bloch_circle(theta, 4096).unwrap());
    assert!((p.d_fs - c.d_fs).abs() < 1e-3);
    assert!((p.gamma_b - c.gamma_b).abs() < 1e-3);
}

#[test]
fn single_precision_matches_double() {
    let s32 = summarize(&bloch_circle(1.0f32, 512).unwrap());
    let s64 = summarize(&bloch_circle(1.0f64, 512).unwrap());
    assert!((s32.d_fs as f64 - s64.d_fs).abs() < 1e-4);
    assert!((s32.gamma_b as f64 - s64.gamma_b).abs() < 1e-4);
    let band = ModelSpec64::ssh(0.5, 1.0).band_state(&[0.3], Band::Lower).unwrap();
    assert!((band.amplitudes().iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn phase_is_half_the_solid_angle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4096);
    for i in 0..1000 {
        let lp = random_simple_two_band(4096, &mut rng).unwrap();
        let gamma = summarize(&lp).gamma_b;
        let omega = bloch_solid_angle(&lp).unwrap();
        assert!((gamma.abs() - omega.abs() / 2.0).abs() <= 1e-6, "loop {i}: {gamma} vs {omega}");
    }
}
