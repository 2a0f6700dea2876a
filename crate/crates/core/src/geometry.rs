//! Quantum geometric tensor, Fubini–Study lengths, Berry phases and
//! two-level solid angles of discretized loops.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{QgError, Result};
use crate::linalg::CMatrix;
use crate::scalar::{principal_angle, Cx, Real};
use crate::state::{inner, projector, StateVector};
use crate::tolerances::Tolerances;

/// A closed, discretized path in projective Hilbert space.
///
/// States are cyclic: the closing segment joins the last state back to the
/// first. No segment may join (nearly) orthogonal states.
#[derive(Debug, Clone, Serialize)]
pub struct Loop<T: Real> {
    states: Vec<StateVector<T>>,
}

impl<T: Real> Loop<T> {
    pub fn new(states: Vec<StateVector<T>>) -> Result<Self> {
        if states.len() < 3 {
            return Err(QgError::TooFewStates(states.len()));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(QgError::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        let floor = T::lit(Tolerances::DEFAULT.segment_overlap);
        let n = states.len();
        for j in 0..n {
            let o = inner(states[j].amplitudes(), states[(j + 1) % n].amplitudes()).norm();
            if !(o >= floor) {
                return Err(QgError::IllConditionedSegment { index: j, overlap: o.as_f64() });
            }
        }
        Ok(Loop { states })
    }

    /// Builds a loop from a path whose last state repeats the first; the
    /// duplicated end point is dropped.
    pub fn from_closed_path(mut states: Vec<StateVector<T>>) -> Result<Self> {
        if states.len() >= 2 {
            let first = &states[0];
            let last = &states[states.len() - 1];
            if segment_distance(first, last) <= T::tol(Tolerances::DEFAULT.self_intersection) {
                states.pop();
            }
        }
        Loop::new(states)
    }

    pub fn states(&self) -> &[StateVector<T>] {
        &self.states
    }

    pub fn into_states(self) -> Vec<StateVector<T>> {
        self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// State `j` of the cyclic sequence (indices wrap).
    pub fn state(&self, j: usize) -> &StateVector<T> {
        &self.states[j % self.states.len()]
    }

    /// Same loop traversed in the opposite direction, starting at the same
    /// state.
    pub fn reversed(&self) -> Self {
        let mut states = Vec::with_capacity(self.len());
        states.push(self.states[0].clone());
        states.extend(self.states[1..].iter().rev().cloned());
        Loop { states }
    }

    /// Every `stride`-th state, or `None` when the result is not a valid loop.
    pub fn subsample(&self, stride: usize) -> Option<Self> {
        let states: Vec<_> = self.states.iter().step_by(stride.max(1)).cloned().collect();
        Loop::new(states).ok()
    }

    /// Multiplies state `j` by `e^{i phases[j]}`; the ray sequence is unchanged.
    pub fn with_phases(&self, phases: &[T]) -> Self {
        assert_eq!(phases.len(), self.len());
        Loop {
            states: self.states.iter().zip(phases).map(|(s, &a)| s.with_phase(a)).collect(),
        }
    }

    /// Rotates the starting point to index `start`.
    pub fn rotated(&self, start: usize) -> Self {
        let n = self.len();
        Loop { states: (0..n).map(|j| self.states[(start + j) % n].clone()).collect() }
    }
}

/// Gauge-invariant scalars of one loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopSummary<T: Real> {
    /// Fubini–Study length (radians).
    pub d_fs: T,
    /// Principal Berry phase in `(−π, π]`.
    pub gamma_b: T,
    /// Accumulated phase before branch reduction; differs from `gamma_b`
    /// only for aggregates of sub-loops.
    pub gamma_total: T,
    pub n_segments: usize,
    /// Largest change of `d_fs` or `gamma_b` against the half-resolution loop.
    pub convergence_est: T,
    pub dim: usize,
    /// Set when the loop came out of a self-intersection split.
    pub subloop: bool,
}

impl<T: Real> LoopSummary<T> {
    /// Discretization-aware saturation tolerance for this summary.
    pub fn tolerance(&self) -> T {
        T::lit(Tolerances::DEFAULT.saturation(self.convergence_est.as_f64()))
    }
}

/// Geodesic (Fubini–Study) distance `arccos |⟨a|b⟩|`, in `[0, π/2]`.
///
/// Evaluated as `atan2(‖b − a⟨a|b⟩‖, |⟨a|b⟩|)`, which agrees with the
/// arccosine but keeps full relative precision for nearby states.
pub fn segment_distance<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> T {
    debug_assert_eq!(a.dim(), b.dim());
    let o = inner(a.amplitudes(), b.amplitudes());
    let perp: T = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (y - x * o).norm_sqr())
        .sum();
    perp.sqrt().atan2(o.norm().min(T::one()))
}

/// Fubini–Study length of the geodesic polygon through the loop's states.
pub fn loop_distance<T: Real>(lp: &Loop<T>) -> T {
    let n = lp.len();
    (0..n).map(|j| segment_distance(lp.state(j), lp.state(j + 1))).sum()
}

/// Pancharatnam phase `−arg Πⱼ ⟨ψⱼ|ψⱼ₊₁⟩` on the branch `(−π, π]`.
///
/// Values within the branch-snap tolerance of `−π` are reported as `π`.
pub fn loop_berry_phase<T: Real>(lp: &Loop<T>) -> T {
    let gamma = -accumulated_phase(lp);
    snap_branch(principal_angle(gamma))
}

pub(crate) fn snap_branch<T: Real>(gamma: T) -> T {
    if gamma <= -T::PI() + T::tol(Tolerances::DEFAULT.branch_snap) {
        T::PI()
    } else {
        gamma
    }
}

fn accumulated_phase<T: Real>(lp: &Loop<T>) -> T {
    let n = lp.len();
    let mut prod: Cx<T> = Cx::one();
    for j in 0..n {
        let o = inner(lp.state(j).amplitudes(), lp.state(j + 1).amplitudes());
        prod = prod * (o / o.norm());
        prod = prod / prod.norm();
    }
    prod.arg()
}

fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit<T: Real>(v: [T; 3]) -> Option<[T; 3]> {
    let n = dot(&v, &v).sqrt();
    (n > T::epsilon()).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

/// Reference direction for the fan of spherical triangles: the north pole
/// unless the loop comes within the pole tolerance of it or its antipode.
fn solid_angle_reference<T: Real>(ns: &[[T; 3]]) -> Result<[T; 3]> {
    let clearance = |r: &[T; 3]| -> T {
        ns.iter()
            .map(|n| {
                // chord distance to r and to −r
                let near = (0..3).map(|i| (n[i] - r[i]).powi(2)).sum::<T>().sqrt();
                let far = (0..3).map(|i| (n[i] + r[i]).powi(2)).sum::<T>().sqrt();
                near.min(far)
            })
            .fold(T::infinity(), |a, b| a.min(b))
    };
    let pole = T::tol(Tolerances::DEFAULT.pole);
    let (o, l) = (T::zero(), T::one());
    let north = [o, o, l];
    if clearance(&north) > pole {
        return Ok(north);
    }
    let mut candidates = Vec::new();
    let sum = ns.iter().fold([o, o, o], |s, n| [s[0] + n[0], s[1] + n[1], s[2] + n[2]]);
    if let Some(c) = unit(sum) {
        candidates.push([-c[0], -c[1], -c[2]]);
    }
    let s = T::lit(0.6);
    let t = T::lit(0.8);
    candidates.extend([[l, o, o], [o, l, o], [s, t, o], [o, s, t], [t, o, s]]);
    candidates
        .into_iter()
        .map(|r| (clearance(&r), r))
        .filter(|(c, _)| *c > pole)
        .max_by(|a, b| a.0.partial_cmp(&b.0).expect("finite clearance"))
        .map(|(_, r)| r)
        .ok_or(QgError::PoleDegenerate)
}

/// Signed solid angle enclosed by a two-level loop on the Bloch sphere,
/// reduced to the smaller-magnitude choice in `(−2π, 2π]`.
///
/// Sums signed geodesic-triangle solid angles fanned out from a reference
/// pole. Positive for counter-clockwise circulation about the enclosed
/// region's outward normal.
pub fn bloch_solid_angle<T: Real>(lp: &Loop<T>) -> Result<T> {
    if lp.dim() != 2 {
        return Err(QgError::WrongDimension { expected: 2, found: lp.dim() });
    }
    let ns = lp
        .states()
        .iter()
        .map(|s| s.bloch_vector().map(|v| unit(v).unwrap_or(v)))
        .collect::<Result<Vec<_>>>()?;
    let r = solid_angle_reference(&ns)?;
    let n = ns.len();
    let two = T::lit(2.0);
    let mut total = T::zero();
    for j in 0..n {
        let (a, b) = (&ns[j], &ns[(j + 1) % n]);
        let num = dot(&r, &cross(a, b));
        let den = T::one() + dot(&r, a) + dot(&r, b) + dot(a, b);
        total = total + two * num.atan2(den);
    }
    let four_pi = T::lit(4.0) * T::PI();
    let two_pi = T::lit(2.0) * T::PI();
    let mut omega = total - four_pi * ((total + two_pi) / four_pi).floor();
    if omega <= -two_pi {
        omega = omega + four_pi;
    }
    Ok(omega)
}

/// Distance, phase and a convergence estimate for one loop.
pub fn summarize<T: Real>(lp: &Loop<T>) -> LoopSummary<T> {
    let d_fs = loop_distance(lp);
    let gamma_b = loop_berry_phase(lp);
    let convergence_est = match (lp.len() >= 6).then(|| lp.subsample(2)).flatten() {
        Some(half) => {
            let dd = (d_fs - loop_distance(&half)).abs();
            let dg = principal_angle(gamma_b - loop_berry_phase(&half)).abs();
            dd.max(dg)
        }
        None => T::infinity(),
    };
    LoopSummary {
        d_fs,
        gamma_b,
        gamma_total: gamma_b,
        n_segments: lp.len(),
        convergence_est,
        dim: lp.dim(),
        subloop: false,
    }
}

/// Point on the projective geodesic from `a` (t = 0) to `b` (t = 1).
///
/// `b` is phase-aligned so that `⟨a|b⟩ > 0` before spherical interpolation,
/// which keeps the curve on the Fubini–Study geodesic.
pub fn geodesic_interpolate<T: Real>(a: &StateVector<T>, b: &StateVector<T>, t: T) -> Result<StateVector<T>> {
    let o = inner(a.amplitudes(), b.amplitudes());
    let mag = o.norm();
    if !(mag >= T::lit(Tolerances::DEFAULT.segment_overlap)) {
        return Err(QgError::IllConditionedSegment { index: 0, overlap: mag.as_f64() });
    }
    let align = o.conj() / mag;
    let delta = segment_distance(a, b);
    let (wa, wb) = if delta > T::lit(1e-8) {
        let s = delta.sin();
        (((T::one() - t) * delta).sin() / s, (t * delta).sin() / s)
    } else {
        (T::one() - t, t)
    };
    let amps = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x * wa + y * align * wb)
        .collect();
    StateVector::from_amplitudes(amps)
}

type ChartMap<'a, T> = dyn Fn(&[T]) -> Result<StateVector<T>> + Send + Sync + 'a;

/// A local parameterization `λ ∈ ℝ^d ↦ |ψ(λ)⟩` with its finite-difference step.
pub struct Chart<'a, T: Real> {
    map: Box<ChartMap<'a, T>>,
    dim: usize,
    step: T,
}

impl<'a, T: Real> Chart<'a, T> {
    pub fn new<F>(dim: usize, step: T, map: F) -> Result<Self>
    where
        F: Fn(&[T]) -> Result<StateVector<T>> + Send + Sync + 'a,
    {
        if dim == 0 {
            return Err(QgError::OutOfRange("chart dimension must be positive".into()));
        }
        if !(step > T::zero()) {
            return Err(QgError::OutOfRange(format!("finite-difference step {step} must be positive")));
        }
        Ok(Chart { map: Box::new(map), dim, step })
    }

    /// Chart with the default step.
    pub fn with_default_step<F>(dim: usize, map: F) -> Result<Self>
    where
        F: Fn(&[T]) -> Result<StateVector<T>> + Send + Sync + 'a,
    {
        Self::new(dim, T::lit(Tolerances::DEFAULT.fd_step), map)
    }

    /// The two-level chart `(x, y) ↦ (1, x + iy)/√(1 + x² + y²)`.
    pub fn two_band_z1() -> Self {
        Self::with_default_step(2, |l: &[T]| Ok(StateVector::from_z1(Complex::new(l[0], l[1]))))
            .expect("valid chart")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn eval(&self, lambda: &[T]) -> Result<StateVector<T>> {
        if lambda.len() != self.dim {
            return Err(QgError::DimensionMismatch { expected: self.dim, found: lambda.len() });
        }
        (self.map)(lambda)
    }
}

/// Quantum geometric tensor `χ = g − (i/2) F` at one chart point.
#[derive(Debug, Clone, Serialize)]
pub struct QGTensor<T: Real> {
    pub chi: CMatrix<T>,
    /// Quantum metric (symmetric, positive semidefinite).
    pub g: Vec<Vec<T>>,
    /// Berry curvature (antisymmetric).
    pub f: Vec<Vec<T>>,
    /// Change of `χ` between plain and extrapolated differences.
    pub fd_error: T,
}

impl<T: Real> QGTensor<T> {
    pub fn trace_g(&self) -> T {
        (0..self.g.len()).map(|i| self.g[i][i]).sum()
    }

    /// `tᵀ g t` for a direction `t`.
    pub fn metric_along(&self, t: &[T]) -> T {
        let d = self.g.len();
        let mut s = T::zero();
        for i in 0..d {
            for j in 0..d {
                s = s + t[i] * self.g[i][j] * t[j];
            }
        }
        s
    }
}

fn projector_derivative<T: Real>(chart: &Chart<'_, T>, l0: &[T], mu: usize, h: T) -> Result<CMatrix<T>> {
    let mut lp = l0.to_vec();
    let mut lm = l0.to_vec();
    lp[mu] = lp[mu] + h;
    lm[mu] = lm[mu] - h;
    let pp = projector(&chart.eval(&lp)?);
    let pm = projector(&chart.eval(&lm)?);
    let d = pp.sub(&pm).scale(Complex::new(T::one() / (h + h), T::zero()));
    if !d.is_finite() {
        return Err(QgError::NonFiniteDerivative);
    }
    Ok(d)
}

fn chi_from_derivatives<T: Real>(p: &CMatrix<T>, dps: &[CMatrix<T>]) -> CMatrix<T> {
    let m = p.rows();
    let q = CMatrix::identity(m).sub(p);
    // χ_{μν} = Tr[∂_μP Q ∂_νP P] = ⟨X_μ, X_ν⟩_F with X_μ = Q ∂_μP P
    let xs: Vec<CMatrix<T>> = dps.iter().map(|dp| q.matmul(dp).matmul(p)).collect();
    let d = dps.len();
    CMatrix::from_fn(d, d, |mu, nu| {
        xs[mu]
            .as_slice()
            .iter()
            .zip(xs[nu].as_slice())
            .fold(Cx::zero(), |acc, (a, b)| acc + a.conj() * b)
    })
}

/// Quantum geometric tensor from projector derivatives.
///
/// Central differences at steps `h` and `h/2` are Richardson-combined into a
/// fourth-order derivative of `P = |ψ⟩⟨ψ|`; the result does not depend on
/// the phase convention of the chart.
pub fn qgt_at<T: Real>(chart: &Chart<'_, T>, lambda0: &[T]) -> Result<QGTensor<T>> {
    let p = projector(&chart.eval(lambda0)?);
    let h = chart.step();
    let half = h / T::lit(2.0);
    let third = Complex::new(T::one() / T::lit(3.0), T::zero());
    let mut coarse = Vec::with_capacity(chart.dim());
    let mut extrapolated = Vec::with_capacity(chart.dim());
    for mu in 0..chart.dim() {
        let dh = projector_derivative(chart, lambda0, mu, h)?;
        let dh2 = projector_derivative(chart, lambda0, mu, half)?;
        extrapolated.push(dh2.scale(Complex::new(T::lit(4.0), T::zero())).sub(&dh).scale(third));
        coarse.push(dh);
    }
    let chi = chi_from_derivatives(&p, &extrapolated);
    let fd_error = chi.sub(&chi_from_derivatives(&p, &coarse)).max_abs();
    if !chi.is_finite() {
        return Err(QgError::NonFiniteDerivative);
    }
    let d = chart.dim();
    let half_t = T::lit(0.5);
    let g = (0..d)
        .map(|i| (0..d).map(|j| (chi.get(i, j).re + chi.get(j, i).re) * half_t).collect())
        .collect();
    let f = (0..d)
        .map(|i| (0..d).map(|j| chi.get(j, i).im - chi.get(i, j).im).collect())
        .collect();
    Ok(QGTensor { chi, g, f, fd_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(theta: f64, n: usize) -> Loop<f64> {
        Loop::new((0..n).map(|j| StateVector::bloch(theta, 2.0 * PI * j as f64 / n as f64)).collect()).unwrap()
    }

    fn constant(n: usize) -> Loop<f64> {
        Loop::new(vec![StateVector::bloch(0.7, 0.2); n]).unwrap()
    }

    #[test]
    fn loop_validation() {
        let s = StateVector::<f64>::basis(2, 0);
        assert_eq!(Loop::new(vec![s.clone(), s.clone()]).unwrap_err(), QgError::TooFewStates(2));
        let bad = Loop::new(vec![s.clone(), StateVector::basis(2, 1), s.clone()]);
        assert!(matches!(bad, Err(QgError::IllConditionedSegment { index: 0, .. })));
        let mixed = Loop::new(vec![s.clone(), s.clone(), StateVector::basis(3, 0)]);
        assert!(matches!(mixed, Err(QgError::DimensionMismatch { .. })));
    }

    #[test]
    fn closed_path_drops_duplicate_end() {
        let mut states: Vec<_> = circle(1.0, 16).into_states();
        states.push(states[0].with_phase(0.3));
        let lp = Loop::from_closed_path(states).unwrap();
        assert_eq!(lp.len(), 16);
    }

    #[test]
    fn segment_distance_examples() {
        let n = StateVector::<f64>::basis(2, 0);
        let s = StateVector::<f64>::basis(2, 1);
        assert_eq!(segment_distance(&n, &n), 0.0);
        assert!((segment_distance(&n, &s) - PI / 2.0).abs() < 1e-15);
        assert!((segment_distance(&n, &StateVector::bloch(PI / 2.0, 0.4)) - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn segment_distance_matches_arccos() {
        for k in 1..50 {
            let a = StateVector::<f64>::bloch(0.1 * k as f64, 0.37 * k as f64);
            let b = StateVector::<f64>::bloch(0.05 * k as f64, -0.2 * k as f64);
            let acos = crate::state::overlap(&a, &b).unwrap().norm().min(1.0).acos();
            assert!((segment_distance(&a, &b) - acos).abs() < 1e-7);
        }
        // tiny separations keep full precision where arccos would not
        let a = StateVector::<f64>::bloch(1.0, 0.0);
        let b = StateVector::<f64>::bloch(1.0 + 2e-9, 0.0);
        assert!((segment_distance(&a, &b) - 1e-9).abs() < 1e-15);
    }

    #[test]
    fn constant_loop_is_trivial() {
        let lp = constant(8);
        assert_eq!(loop_distance(&lp), 0.0);
        assert_eq!(loop_berry_phase(&lp), 0.0);
        assert_eq!(bloch_solid_angle(&lp).unwrap(), 0.0);
        let s = summarize(&lp);
        assert_eq!((s.d_fs, s.gamma_b, s.n_segments, s.convergence_est), (0.0, 0.0, 8, 0.0));
    }

    #[test]
    fn equator_values() {
        let lp = circle(PI / 2.0, 4096);
        let s = summarize(&lp);
        assert!((s.d_fs - PI).abs() < 1e-12);
        assert!((s.gamma_b - PI).abs() < 1e-12);
        assert!(s.convergence_est < 1e-5);
        // reversed orientation lands on the same branch value
        assert!((loop_berry_phase(&lp.reversed()) - PI).abs() < 1e-12);
        assert!((bloch_solid_angle(&lp).unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn cap_circle_values() {
        for &theta in &[PI / 3.0, PI / 4.0, 0.2, 2.5] {
            let lp = circle(theta, 8192);
            let d = loop_distance(&lp);
            let g = loop_berry_phase(&lp);
            assert!((d - PI * theta.sin()).abs() < 1e-6, "d at {theta}");
            let cap = 2.0 * PI * (1.0 - theta.cos());
            let expected = principal_angle(-cap / 2.0);
            assert!((g - expected).abs() < 1e-6, "gamma at {theta}: {g} vs {expected}");
            let omega = bloch_solid_angle(&lp).unwrap();
            let omega_expected = if cap > 2.0 * PI { cap - 4.0 * PI } else { cap };
            assert!((omega - omega_expected).abs() < 1e-6);
        }
    }

    #[test]
    fn solid_angle_requires_two_levels() {
        let lp = Loop::new(vec![StateVector::<f64>::basis(3, 0); 3]).unwrap();
        assert!(matches!(bloch_solid_angle(&lp), Err(QgError::WrongDimension { .. })));
    }

    #[test]
    fn solid_angle_moves_reference_off_the_loop() {
        // circle through both poles: the default reference pole lies on it
        let n = 512;
        let states = (0..n)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / n as f64;
                StateVector::from_bloch_vector([a.sin(), 0.0, a.cos()]).unwrap()
            })
            .collect();
        let lp = Loop::new(states).unwrap();
        assert!((bloch_solid_angle(&lp).unwrap().abs() - 2.0 * PI).abs() < 1e-9);
        assert!((loop_berry_phase(&lp) - PI).abs() < 1e-9);
    }

    #[test]
    fn geodesic_interpolation_stays_on_geodesic() {
        let a = StateVector::<f64>::bloch(0.3, 0.1);
        let b = StateVector::<f64>::bloch(1.7, 2.0).with_phase(1.3);
        let total = segment_distance(&a, &b);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let m = geodesic_interpolate(&a, &b, t).unwrap();
            assert!((segment_distance(&a, &m) - t * total).abs() < 1e-12);
            assert!((segment_distance(&m, &b) - (1.0 - t) * total).abs() < 1e-12);
        }
    }

    #[test]
    fn qgt_two_band_chart() {
        let chart = Chart::<f64>::two_band_z1();
        let q = qgt_at(&chart, &[0.0, 0.0]).unwrap();
        assert!((q.g[0][0] - 1.0).abs() < 1e-9 && (q.g[1][1] - 1.0).abs() < 1e-9);
        assert!(q.g[0][1].abs() < 1e-9);
        let q = qgt_at(&chart, &[0.6, 0.8]).unwrap();
        assert!((q.g[0][0] - 0.25).abs() < 1e-9 && (q.g[1][1] - 0.25).abs() < 1e-9);
        // Berry curvature of the z₁ chart is 2/(1+|z|²)² with this sign convention
        assert!((q.f[0][1].abs() - 0.5).abs() < 1e-9);
        assert!((q.f[0][1] + q.f[1][0]).abs() < 1e-15);
    }

    #[test]
    fn qgt_is_gauge_independent() {
        let plain = Chart::<f64>::two_band_z1();
        let twisted = Chart::with_default_step(2, |l: &[f64]| {
            Ok(StateVector::from_z1(Complex::new(l[0], l[1])).with_phase(3.0 * l[0] - l[1] * l[1]))
        })
        .unwrap();
        let a = qgt_at(&plain, &[0.3, -0.2]).unwrap();
        let b = qgt_at(&twisted, &[0.3, -0.2]).unwrap();
        assert!(a.chi.sub(&b.chi).max_abs() < 1e-10);
    }

    #[test]
    fn chart_rejects_bad_input() {
        assert!(Chart::<f64>::new(1, 0.0, |_: &[f64]| Ok(StateVector::basis(2, 0))).is_err());
        let c = Chart::<f64>::two_band_z1();
        assert!(matches!(c.eval(&[1.0]), Err(QgError::DimensionMismatch { .. })));
        let nan = Chart::<f64>::with_default_step(1, |l: &[f64]| {
            if l[0] > 0.0 { Err(QgError::NonFinite) } else { Ok(StateVector::basis(2, 0)) }
        })
        .unwrap();
        assert!(qgt_at(&nan, &[0.0]).is_err());
    }

    #[test]
    fn single_precision_circle() {
        let n = 1024;
        let lp = Loop::new(
            (0..n).map(|j| StateVector::<f32>::bloch(1.0, 2.0 * std::f32::consts::PI * j as f32 / n as f32)).collect(),
        )
        .unwrap();
        let s = summarize(&lp);
        assert!((s.d_fs - std::f32::consts::PI * 1.0f32.sin()).abs() < 1e-3);
        assert!((s.gamma_b + std::f32::consts::PI * (1.0 - 1.0f32.cos())).abs() < 1e-3);
    }
}
