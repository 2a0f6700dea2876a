//! Physical bounds built from distance, phase and metric: Wannier spread,
//! quantum speed limit, electron–phonon coupling and superfluid weight.
//!
//! Units are `ħ = 1`; the lattice constant comes from the model.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{QgError, Result};
use crate::geometry::{loop_berry_phase, qgt_at, segment_distance, summarize, Loop};
use crate::inequalities::summarize_split;
use crate::linalg::{eigh, CMatrix};
use crate::models::{bz_point, Band, ModelKind, ModelSpec};
use crate::scalar::{Cx, Real};
use crate::state::{inner, StateVector};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub label: String,
    pub value: f64,
    pub unit: String,
}

/// Ordered quantities each claimed to be at least the next one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundChain {
    pub name: String,
    pub entries: Vec<ChainEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundChain {
    fn new(name: &str) -> Self {
        BoundChain { name: name.into(), entries: Vec::new(), notes: Vec::new() }
    }

    fn push(&mut self, label: &str, value: f64, unit: &str) {
        self.entries.push(ChainEntry { label: label.into(), value, unit: unit.into() });
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    /// Largest amount by which a later entry exceeds an earlier neighbour.
    pub fn max_violation(&self) -> f64 {
        self.entries.windows(2).map(|w| w[1].value - w[0].value).fold(0.0, f64::max)
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.value.is_finite()) && self.max_violation() <= tol
    }

    /// All entries agree within `tol`.
    pub fn is_saturated(&self, tol: f64) -> bool {
        let v = self.values();
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        hi - lo <= tol
    }
}

fn require_1d<T: Real>(m: &ModelSpec<T>) -> Result<()> {
    if m.dim_k() != 1 {
        return Err(QgError::WrongDimension { expected: 1, found: m.dim_k() });
    }
    Ok(())
}

/// `Σⱼ g_kk(kⱼ) · 2π/(n a)`, the periodic trapezoid rule for `∫_BZ Tr g dk`.
pub fn bz_metric_integral<T: Real>(m: &ModelSpec<T>, band: Band, n_k: usize) -> Result<T> {
    require_1d(m)?;
    if n_k < 3 {
        return Err(QgError::BadResolution(format!("need at least 3 k-points, got {n_k}")));
    }
    let chart = m.band_chart(band)?;
    let a = m.lattice_const;
    let mut sum = T::zero();
    for j in 0..n_k {
        sum = sum + qgt_at(&chart, &[bz_point(j, n_k, a)])?.trace_g();
    }
    Ok(sum * T::lit(2.0) * T::PI() / (T::from_count(n_k) * a))
}

/// Gauge-invariant Wannier spread `Ω₁ = (a/2π) ∫_BZ Tr g dk` (length²).
pub fn wannier_omega1<T: Real>(m: &ModelSpec<T>, band: Band, n_k: usize) -> Result<T> {
    let integral = bz_metric_integral(m, band, n_k)?;
    Ok(m.lattice_const / (T::lit(2.0) * T::PI()) * integral)
}

/// `[Ω₁, (a d/2π)², (a γ/2π)²]` for one band of a 1D model.
pub fn wannier_bound_chain<T: Real>(m: &ModelSpec<T>, band: Band, n_k: usize) -> Result<BoundChain> {
    let omega = wannier_omega1(m, band, n_k)?;
    let s = summarize(&m.bz_loop(band, n_k)?);
    let scale = m.lattice_const / (T::lit(2.0) * T::PI());
    let mut chain = BoundChain::new("wannier");
    chain.push("Omega_1", omega.as_f64(), "length^2");
    chain.push("(a d_FS / 2pi)^2", (scale * s.d_fs).powi(2).as_f64(), "length^2");
    chain.push("(a gamma_B / 2pi)^2", (scale * s.gamma_b).powi(2).as_f64(), "length^2");
    Ok(chain)
}

/// Sampled solution of `i ∂_t ψ = H(t) ψ`.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<StateVector<T>>,
    /// Energy uncertainty `ΔE = ‖(H − ⟨H⟩)ψ‖` at each time.
    pub energies_var: Vec<T>,
    /// Fubini–Study length travelled up to each time.
    pub d_accum: Vec<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn duration(&self) -> T {
        self.times[self.times.len() - 1] - self.times[0]
    }

    pub fn is_cyclic(&self, tol: T) -> bool {
        segment_distance(&self.states[0], &self.states[self.states.len() - 1]) <= tol
    }

    /// The visited states as a closed loop, dropping the final state which
    /// returns to the first.
    pub fn as_loop(&self) -> Result<Loop<T>> {
        Loop::new(self.states[..self.states.len() - 1].to_vec())
    }

    /// Geometric phase of a cyclic trajectory.
    pub fn berry_phase(&self) -> Result<T> {
        Ok(loop_berry_phase(&self.as_loop()?))
    }
}

fn apply<T: Real>(h: &CMatrix<T>, psi: &[Cx<T>]) -> Vec<Cx<T>> {
    // −i H ψ
    h.matvec(psi).into_iter().map(|z| Complex::new(z.im, -z.re)).collect()
}

fn axpy<T: Real>(psi: &[Cx<T>], k: &[Cx<T>], s: T) -> Vec<Cx<T>> {
    psi.iter().zip(k).map(|(a, b)| a + b * s).collect()
}

fn energy_spread<T: Real>(h: &CMatrix<T>, psi: &StateVector<T>) -> T {
    let hpsi = h.matvec(psi.amplitudes());
    let mean = inner(psi.amplitudes(), &hpsi).re;
    hpsi.iter().zip(psi.amplitudes()).map(|(a, b)| (a - b * mean).norm_sqr()).sum::<T>().sqrt()
}

fn checked_hamiltonian<T: Real>(h_of_t: &dyn Fn(T) -> CMatrix<T>, t: T, dim: usize) -> Result<CMatrix<T>> {
    let h = h_of_t(t);
    if h.rows() != dim || h.cols() != dim {
        return Err(QgError::DimensionMismatch { expected: dim, found: h.rows() });
    }
    if !h.is_finite() {
        return Err(QgError::NonFinite);
    }
    let defect = h.hermiticity_defect();
    if defect > T::lit(Tolerances::DEFAULT.hermitian) * h.max_abs().max(T::one()) {
        return Err(QgError::NotHermitian(defect.as_f64()));
    }
    Ok(h)
}

/// Fixed-step fourth-order Runge–Kutta for `i ∂_t ψ = H(t) ψ`, renormalizing
/// after every step.
pub fn evolve<T: Real>(
    h_of_t: &dyn Fn(T) -> CMatrix<T>,
    psi0: &StateVector<T>,
    duration: T,
    steps: usize,
) -> Result<Trajectory<T>> {
    if steps == 0 || !(duration > T::zero()) {
        return Err(QgError::BadResolution(format!("need steps ≥ 1 and duration > 0, got {steps}, {duration}")));
    }
    let dim = psi0.dim();
    let dt = duration / T::from_count(steps);
    let half = dt / T::lit(2.0);
    let drift_tol = T::lit(Tolerances::DEFAULT.norm_drift);

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut spread = Vec::with_capacity(steps + 1);
    let mut d_accum = Vec::with_capacity(steps + 1);

    let mut psi = psi0.clone();
    let mut h0 = checked_hamiltonian(h_of_t, T::zero(), dim)?;
    times.push(T::zero());
    spread.push(energy_spread(&h0, &psi));
    d_accum.push(T::zero());
    states.push(psi.clone());

    for step in 0..steps {
        let t = dt * T::from_count(step);
        let t1 = dt * T::from_count(step + 1);
        let hm = checked_hamiltonian(h_of_t, t + half, dim)?;
        let h1 = checked_hamiltonian(h_of_t, t1, dim)?;
        let y = psi.amplitudes();
        let k1 = apply(&h0, y);
        let k2 = apply(&hm, &axpy(y, &k1, half));
        let k3 = apply(&hm, &axpy(y, &k2, half));
        let k4 = apply(&h1, &axpy(y, &k3, dt));
        let sixth = dt / T::lit(6.0);
        let next: Vec<Cx<T>> = (0..dim)
            .map(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * T::lit(2.0) + k4[i]) * sixth)
            .collect();
        let norm = next.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if (norm - T::one()).abs() > drift_tol || !norm.is_finite() {
            return Err(QgError::NormDrift((norm - T::one()).as_f64()));
        }
        let next = StateVector::from_amplitudes(next)?;
        let d = d_accum[step] + segment_distance(&psi, &next);
        psi = next;
        times.push(t1);
        spread.push(energy_spread(&h1, &psi));
        d_accum.push(d);
        states.push(psi.clone());
        h0 = h1;
    }
    Ok(Trajectory { times, states, energies_var: spread, d_accum })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeedLimitReport {
    /// `max_t |Δd/Δt − ΔE|` over the steps.
    pub residual: f64,
    /// `[τ, |γ|/⟨ΔE⟩]` when the trajectory is cyclic.
    pub chain: Option<BoundChain>,
    pub mean_spread: f64,
}

/// Speed-of-travel residual and, for cyclic runs, the time bound
/// `τ ≥ |γ|/⟨ΔE⟩`. Non-cyclic trajectories fail with `NotCyclic`.
pub fn speed_limit_report<T: Real>(traj: &Trajectory<T>, gamma_b: T) -> Result<SpeedLimitReport> {
    let residual = speed_residual(traj);
    let first = &traj.states[0];
    let last = &traj.states[traj.states.len() - 1];
    let gap = segment_distance(first, last);
    if gap > T::lit(Tolerances::DEFAULT.cyclic) {
        return Err(QgError::NotCyclic(gap.as_f64()));
    }
    let tau = traj.duration();
    let mut integral = T::zero();
    for j in 1..traj.times.len() {
        let dt = traj.times[j] - traj.times[j - 1];
        integral = integral + (traj.energies_var[j] + traj.energies_var[j - 1]) * dt / T::lit(2.0);
    }
    let mean = integral / tau;
    let g = gamma_b.abs();
    let bound = if g <= T::lit(Tolerances::DEFAULT.saturation_floor) {
        T::zero()
    } else if mean > T::zero() {
        g / mean
    } else {
        T::infinity()
    };
    let mut chain = BoundChain::new("speed_limit");
    chain.push("tau", tau.as_f64(), "hbar/energy");
    chain.push("|gamma_B| / <Delta E>", bound.as_f64(), "hbar/energy");
    Ok(SpeedLimitReport { residual: residual.as_f64(), chain: Some(chain), mean_spread: mean.as_f64() })
}

/// `max |Δd/Δt − ΔE|`, with `ΔE` averaged over the step ends.
pub fn speed_residual<T: Real>(traj: &Trajectory<T>) -> T {
    (1..traj.times.len())
        .map(|j| {
            let dt = traj.times[j] - traj.times[j - 1];
            let rate = (traj.d_accum[j] - traj.d_accum[j - 1]) / dt;
            (rate - (traj.energies_var[j] + traj.energies_var[j - 1]) / T::lit(2.0)).abs()
        })
        .fold(T::zero(), T::max)
}

/// Spin-½ in a field of strength `ω₀` precessing on a cone of half-angle
/// `θ_c` with period `τ`: `H(t) = (ω₀/2) n(t)·σ`.
pub fn rotating_field<T: Real>(omega0: T, theta_c: T, tau: T) -> impl Fn(T) -> CMatrix<T> {
    move |t: T| {
        let phi = T::lit(2.0) * T::PI() * t / tau;
        let (s, c) = theta_c.sin_cos();
        let half = omega0 / T::lit(2.0);
        CMatrix::bloch_hamiltonian(T::zero(), [half * s * phi.cos(), half * s * phi.sin(), half * c])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeDemo<T: Real> {
    pub trajectory: Trajectory<T>,
    pub gamma_b: T,
    /// `π(1 − cos θ_c)`, the slow-drive value of `|γ|`.
    pub adiabatic_gamma: T,
    pub report: SpeedLimitReport,
}

/// Slow cone precession starting from the cyclic state of the drive (the
/// lower eigenvector of the rotating-frame Hamiltonian), with drive period
/// `periods` Larmor periods.
pub fn adiabatic_cone_demo<T: Real>(theta_c: T, periods: T, steps: usize) -> Result<ConeDemo<T>> {
    if !(theta_c > T::zero() && theta_c < T::PI()) {
        return Err(QgError::OutOfRange(format!("cone angle {theta_c} outside (0, π)")));
    }
    if periods < T::lit(50.0) {
        return Err(QgError::OutOfRange(format!("drive period {periods} Larmor periods is below 50")));
    }
    let omega0 = T::one();
    let two_pi = T::lit(2.0) * T::PI();
    let tau = periods * two_pi / omega0;
    let omega = two_pi / tau;
    let (s, c) = theta_c.sin_cos();
    let h_eff = CMatrix::bloch_hamiltonian(
        T::zero(),
        [omega0 * s / T::lit(2.0), T::zero(), (omega0 * c - omega) / T::lit(2.0)],
    );
    let psi0 = eigh(&h_eff)?.vectors.swap_remove(0);
    let h = rotating_field(omega0, theta_c, tau);
    let trajectory = evolve(&h, &psi0, tau, steps)?;
    let gamma_b = trajectory.berry_phase()?;
    let report = speed_limit_report(&trajectory, gamma_b)?;
    Ok(ConeDemo { trajectory, gamma_b, adiabatic_gamma: T::PI() * (T::one() - c), report })
}

/// Metric integrals around the Fermi circle and the geometric lower bounds,
/// `[∫Tr g dσ, ∫g_ℓℓ dk_ℓ, d²/ℓ_FS, γ²/ℓ_FS]`. Distances and phases are
/// summed over sub-loops when the band winds several times.
pub fn eph_bound_chain<T: Real>(m: &ModelSpec<T>, e_f: T, n: usize, band: Band) -> Result<BoundChain> {
    let fl = m.fermi_surface_loop(e_f, n, band)?;
    let n = fl.lp.len();
    let chart = m.band_chart(band)?;
    let kr = fl.k_radius;
    let dsigma = fl.perimeter / T::from_count(n);
    let mut trace = T::zero();
    let mut tangential = T::zero();
    for j in 0..n {
        let phi = T::lit(2.0) * T::PI() * T::from_count(j) / T::from_count(n);
        let (s, c) = phi.sin_cos();
        let q = qgt_at(&chart, &[kr * c, kr * s])?;
        trace = trace + q.trace_g();
        tangential = tangential + q.metric_along(&[-s, c]);
    }
    let parts = summarize_split(&fl.lp);
    let d: T = parts.iter().map(|p| p.d_fs).sum();
    let g: T = parts.iter().map(|p| p.gamma_b).sum();
    let l = fl.perimeter;
    let mut chain = BoundChain::new("electron_phonon");
    chain.push("int_FS Tr g dsigma", (trace * dsigma).as_f64(), "length");
    chain.push("int g_ll dk_l", (tangential * dsigma).as_f64(), "length");
    chain.push("d_FS^2 / l_FS", (d * d / l).as_f64(), "length");
    chain.push("gamma_B^2 / l_FS", (g * g / l).as_f64(), "length");
    if parts.len() > 1 {
        chain.notes.push(format!("Fermi loop split into {} sub-loops; d and gamma are sums", parts.len()));
    }
    Ok(chain)
}

/// How to obtain `d` and `γ` for the superfluid-weight bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricConvention {
    /// From the model's band loop as given.
    #[default]
    Computed,
    /// For a fully dimerized SSH chain, take the minimal-metric values
    /// `∫Tr g = d = γ = 0`; other models fall back to `Computed`.
    MinimalDimerized,
}

/// `[D_s, (aU/2π³M)ν(1−ν)d², (aU/2π³M)ν(1−ν)γ²]` with
/// `D_s = (U/π²M)ν(1−ν)∫Tr g dk` and `M` the orbital count.
pub fn superfluid_weight_1d<T: Real>(
    m: &ModelSpec<T>,
    u: T,
    nu: T,
    n_k: usize,
    band: Band,
    convention: MetricConvention,
) -> Result<BoundChain> {
    require_1d(m)?;
    if !(nu > T::zero() && nu < T::one()) {
        return Err(QgError::OutOfRange(format!("filling {nu} outside (0, 1)")));
    }
    if !u.is_finite() {
        return Err(QgError::NonFinite);
    }
    let mut chain = BoundChain::new("superfluid_weight");
    let dimerized = matches!(m.kind, ModelKind::Ssh { v, w } if v.is_zero() || w.is_zero());
    let (integral, d, g) = if convention == MetricConvention::MinimalDimerized && dimerized {
        chain.notes.push("minimal-metric convention for a fully dimerized chain: d = gamma = 0".into());
        (T::zero(), T::zero(), T::zero())
    } else {
        if convention == MetricConvention::MinimalDimerized {
            chain.notes.push("minimal-metric convention applies only to fully dimerized SSH; computed values used".into());
        }
        let s = summarize(&m.bz_loop(band, n_k)?);
        (bz_metric_integral(m, band, n_k)?, s.d_fs, s.gamma_b)
    };
    if !is_flat(m, band, n_k)? {
        chain.notes.push("dispersive band: flat-band formula used as a diagnostic only".into());
    }
    let orbitals = T::from_count(m.bands());
    let pi = T::PI();
    let fill = nu * (T::one() - nu);
    let ds = u / (pi * pi * orbitals) * fill * integral;
    let pref = m.lattice_const * u / (T::lit(2.0) * pi * pi * pi * orbitals) * fill;
    chain.push("D_s", ds.as_f64(), "energy*length");
    chain.push("bound from d_FS^2", (pref * d * d).as_f64(), "energy*length");
    chain.push("bound from gamma_B^2", (pref * g * g).as_f64(), "energy*length");
    Ok(chain)
}

fn is_flat<T: Real>(m: &ModelSpec<T>, band: Band, n_k: usize) -> Result<bool> {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for j in 0..n_k.min(256) {
        let e = m.energies(&[bz_point(j, n_k.min(256), m.lattice_const)])?[band.index()];
        lo = lo.min(e);
        hi = hi.max(e);
    }
    Ok(hi - lo <= T::lit(1e-9) * hi.abs().max(lo.abs()).max(T::one()))
}
