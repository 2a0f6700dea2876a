//! Generators and transformations for discretized loops.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QgError, Result};
use crate::geometry::{geodesic_interpolate, segment_distance, Loop};
use crate::scalar::{Cx, Real};
use crate::state::StateVector;

fn check_resolution(n: usize) -> Result<()> {
    if n < 3 {
        return Err(QgError::BadResolution(format!("need at least 3 samples, got {n}")));
    }
    Ok(())
}

fn angle_step<T: Real>(j: usize, n: usize) -> T {
    T::lit(2.0) * T::PI() * T::from_count(j) / T::from_count(n)
}

/// Loop of constant polar angle `theta` on the Bloch sphere, traversed
/// with increasing azimuth.
pub fn bloch_circle<T: Real>(theta: T, n: usize) -> Result<Loop<T>> {
    check_resolution(n)?;
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(QgError::OutOfRange(format!("polar angle {theta} outside (0, π)")));
    }
    Loop::new((0..n).map(|j| StateVector::bloch(theta, angle_step(j, n))).collect())
}

fn orthonormal_frame<T: Real>(axis: [T; 3]) -> Result<([T; 3], [T; 3], [T; 3])> {
    let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if !(len > T::zero()) || !len.is_finite() {
        return Err(QgError::OutOfRange("axis must be a nonzero finite vector".into()));
    }
    let a = [axis[0] / len, axis[1] / len, axis[2] / len];
    // cross with the least-aligned basis vector
    let k = (0..3)
        .min_by(|&i, &j| a[i].abs().partial_cmp(&a[j].abs()).expect("finite axis"))
        .expect("three components");
    let mut e = [T::zero(); 3];
    e[k] = T::one();
    let u = cross(&a, &e);
    let ul = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let u = [u[0] / ul, u[1] / ul, u[2] / ul];
    let v = cross(&a, &u);
    Ok((a, u, v))
}

fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Point at angular radius `rho` and azimuth `phi` around the frame axis.
fn on_cone<T: Real>(frame: &([T; 3], [T; 3], [T; 3]), rho: T, phi: T) -> [T; 3] {
    let (a, u, v) = frame;
    let (s, c) = rho.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [0, 1, 2].map(|i| c * a[i] + s * (cp * u[i] + sp * v[i]))
}

/// Great circle of the Bloch sphere normal to `axis`, traversed
/// counter-clockwise about it.
pub fn great_circle<T: Real>(axis: [T; 3], n: usize) -> Result<Loop<T>> {
    great_circle_turns(axis, n, 1)
}

/// Great circle traversed `turns` times with `n` samples in total.
pub fn great_circle_turns<T: Real>(axis: [T; 3], n: usize, turns: usize) -> Result<Loop<T>> {
    check_resolution(n)?;
    if turns == 0 {
        return Err(QgError::OutOfRange("turns must be positive".into()));
    }
    let frame = orthonormal_frame(axis)?;
    let half_pi = T::FRAC_PI_2();
    let states = (0..n)
        .map(|j| {
            let phi = angle_step::<T>(j * turns, n);
            StateVector::from_bloch_vector(on_cone(&frame, half_pi, phi))
        })
        .collect::<Result<Vec<_>>>()?;
    Loop::new(states)
}

/// Geodesic polygon with `sides` vertices at polar angle `theta` and equally
/// spaced azimuths; each edge is sampled `n_per_edge` times.
pub fn spherical_polygon<T: Real>(sides: usize, theta: T, n_per_edge: usize) -> Result<Loop<T>> {
    if sides < 3 || n_per_edge == 0 {
        return Err(QgError::BadResolution(format!("polygon needs ≥ 3 sides and ≥ 1 sample per edge, got {sides}, {n_per_edge}")));
    }
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(QgError::OutOfRange(format!("polar angle {theta} outside (0, π)")));
    }
    let vertices: Vec<_> = (0..sides).map(|k| StateVector::bloch(theta, angle_step(k, sides))).collect();
    let mut states = Vec::with_capacity(sides * n_per_edge);
    for k in 0..sides {
        let (a, b) = (&vertices[k], &vertices[(k + 1) % sides]);
        for s in 0..n_per_edge {
            let t = T::from_count(s) / T::from_count(n_per_edge);
            states.push(geodesic_interpolate(a, b, t)?);
        }
    }
    Loop::new(states)
}

/// Loop in `CP^{M−1}` given by truncated Fourier series of the affine
/// coordinates `zᵢ(t) = Σ_{m=−K..K} cᵢₘ e^{imt}`, `i = 1..M−1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierLoopSpec<T: Real> {
    /// Hilbert-space dimension `M`.
    pub dim: usize,
    /// Harmonic cutoff `K`.
    pub harmonics: usize,
    /// Sample count.
    pub n: usize,
    /// `coeffs[i][m + K]` is the coefficient of `e^{imt}` in `z_{i+1}`.
    pub coeffs: Vec<Vec<Cx<T>>>,
}

impl<T: Real> FourierLoopSpec<T> {
    /// All-zero coefficients: the constant loop at `(1, 0, …, 0)`.
    pub fn zero(dim: usize, harmonics: usize, n: usize) -> Self {
        FourierLoopSpec {
            dim,
            harmonics,
            n,
            coeffs: vec![vec![Cx::zero(); 2 * harmonics + 1]; dim.saturating_sub(1)],
        }
    }

    /// Random coefficients with amplitude `scale / (1 + |m|)`, uniform in
    /// the square of that half-width.
    pub fn random<R: Rng + ?Sized>(dim: usize, harmonics: usize, n: usize, scale: f64, rng: &mut R) -> Self {
        let k = harmonics as i64;
        let coeffs = (1..dim)
            .map(|_| {
                (-k..=k)
                    .map(|m| {
                        let w = scale / (1.0 + m.unsigned_abs() as f64);
                        Complex::new(T::lit(rng.gen_range(-w..=w)), T::lit(rng.gen_range(-w..=w)))
                    })
                    .collect()
            })
            .collect();
        FourierLoopSpec { dim, harmonics, n, coeffs }
    }

    /// Number of real parameters in [`Self::to_params`].
    pub fn param_count(dim: usize, harmonics: usize) -> usize {
        2 * (dim - 1) * (2 * harmonics + 1)
    }

    /// Flattens the coefficients into `(re, im)` pairs.
    pub fn to_params(&self) -> Vec<T> {
        self.coeffs.iter().flatten().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_params(dim: usize, harmonics: usize, n: usize, params: &[T]) -> Result<Self> {
        let expected = Self::param_count(dim, harmonics);
        if params.len() != expected {
            return Err(QgError::DimensionMismatch { expected, found: params.len() });
        }
        let per = 2 * harmonics + 1;
        let coeffs = params
            .chunks(2 * per)
            .map(|row| row.chunks(2).map(|p| Complex::new(p[0], p[1])).collect())
            .collect();
        Ok(FourierLoopSpec { dim, harmonics, n, coeffs })
    }

    pub fn with_resolution(&self, n: usize) -> Self {
        FourierLoopSpec { n, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(QgError::DegenerateSpec(format!("dimension {} < 2", self.dim)));
        }
        if self.n < 8 * (self.harmonics + 1) {
            return Err(QgError::BadResolution(format!(
                "n = {} below 8(K+1) = {}",
                self.n,
                8 * (self.harmonics + 1)
            )));
        }
        if self.coeffs.len() != self.dim - 1 || self.coeffs.iter().any(|c| c.len() != 2 * self.harmonics + 1) {
            return Err(QgError::DegenerateSpec("coefficient table has the wrong shape".into()));
        }
        if self.coeffs.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(QgError::DegenerateSpec("non-finite coefficient".into()));
        }
        Ok(())
    }
}

/// Samples a Fourier loop at `tⱼ = 2πj/n`.
pub fn fourier_loop<T: Real>(spec: &FourierLoopSpec<T>) -> Result<Loop<T>> {
    spec.validate()?;
    let k = spec.harmonics as i64;
    let states = (0..spec.n)
        .map(|j| {
            let t: T = angle_step(j, spec.n);
            let mut amps = Vec::with_capacity(spec.dim);
            amps.push(Complex::new(T::one(), T::zero()));
            for row in &spec.coeffs {
                let z = (-k..=k).zip(row).fold(Cx::zero(), |acc, (m, c)| {
                    acc + c * Complex::from_polar(T::one(), T::lit(m as f64) * t)
                });
                amps.push(z);
            }
            StateVector::from_amplitudes(amps)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| QgError::DegenerateSpec(e.to_string()))?;
    Loop::new(states).map_err(|e| QgError::DegenerateSpec(e.to_string()))
}

/// Bloch circle at polar angle `theta` whose polar angle is modulated as
/// `θ(φ) = θ + ε cos(mode·φ)`.
pub fn perturb_circle<T: Real>(theta: T, eps: T, mode: usize, n: usize) -> Result<Loop<T>> {
    check_resolution(n)?;
    if eps < T::zero() || mode == 0 {
        return Err(QgError::OutOfRange(format!("need eps ≥ 0 and mode ≥ 1, got {eps}, {mode}")));
    }
    if !(theta - eps > T::zero() && theta + eps < T::PI()) {
        return Err(QgError::OutOfRange(format!("θ ± ε = {theta} ± {eps} leaves (0, π)")));
    }
    let states = (0..n)
        .map(|j| {
            let phi: T = angle_step(j, n);
            StateVector::bloch(theta + eps * (T::from_count(mode) * phi).cos(), phi)
        })
        .collect();
    Loop::new(states)
}

/// Inserts `factor − 1` geodesic midpoints into every segment.
pub fn refine<T: Real>(lp: &Loop<T>, factor: usize) -> Result<Loop<T>> {
    if factor < 2 {
        return Err(QgError::BadResolution(format!("refinement factor {factor} < 2")));
    }
    let n = lp.len();
    let mut states = Vec::with_capacity(n * factor);
    for j in 0..n {
        let (a, b) = (lp.state(j), lp.state(j + 1));
        states.push(a.clone());
        for s in 1..factor {
            let t = T::from_count(s) / T::from_count(factor);
            states.push(geodesic_interpolate(a, b, t).map_err(|_| {
                QgError::IllConditionedSegment { index: j, overlap: 0.0 }
            })?);
        }
    }
    Loop::new(states)
}

/// Two Bloch-sphere circles of angular radius `rho` touching at the north
/// pole and traversed with opposite orientations, joined into one loop.
/// The shared state appears at index 0 and at index `n_per_lobe`.
pub fn figure_eight<T: Real>(rho: T, n_per_lobe: usize) -> Result<Loop<T>> {
    check_resolution(n_per_lobe)?;
    if !(rho > T::zero() && rho < T::FRAC_PI_2()) {
        return Err(QgError::OutOfRange(format!("lobe radius {rho} outside (0, π/2)")));
    }
    let (s, c) = rho.sin_cos();
    let o = T::zero();
    let mut states = Vec::with_capacity(2 * n_per_lobe);
    for mirror in [T::one(), -T::one()] {
        let a = [mirror * s, o, c];
        let u = [-mirror * c, o, s];
        let v = [o, -T::one(), o];
        for j in 0..n_per_lobe {
            let phi: T = angle_step(j, n_per_lobe);
            let (sp, cp) = phi.sin_cos();
            let p = [0, 1, 2].map(|i| c * a[i] + s * (cp * u[i] + sp * v[i]));
            states.push(StateVector::from_bloch_vector(p)?);
        }
    }
    Loop::new(states)
}

/// Random simple two-level loop: a polar graph `ρ(φ)` around a random axis
/// with a few random harmonics, kept inside `(0.05, π − 0.05)`.
pub fn random_simple_two_band<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Loop<f64>> {
    check_resolution(n)?;
    let axis = loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0f64)];
        let l2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if l2 > 1e-4 && l2 <= 1.0 {
            break v;
        }
    };
    let frame = orthonormal_frame(axis)?;
    let margin = 0.05;
    let rho0: f64 = rng.gen_range(0.15..(std::f64::consts::PI - 0.15));
    let room = (rho0 - margin).min(std::f64::consts::PI - margin - rho0);
    let raw: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let total: f64 = raw.iter().map(|(a, b)| a.abs() + b.abs()).sum();
    let amp = 0.9 * room * rng.gen_range(0.0..1.0) / total.max(1e-12);
    let phase0: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let states = (0..n)
        .map(|j| {
            let phi: f64 = angle_step(j, n);
            let rho = rho0
                + raw
                    .iter()
                    .enumerate()
                    .map(|(m, (a, b))| {
                        let k = (m + 1) as f64;
                        amp * (a * (k * phi).cos() + b * (k * phi).sin())
                    })
                    .sum::<f64>();
            StateVector::from_bloch_vector(on_cone(&frame, rho, phi + phase0))
        })
        .collect::<Result<Vec<_>>>()?;
    Loop::new(states)
}

/// One cut made while splitting a loop at a self-intersection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitEvent {
    /// Indices of the coinciding states in the loop that was cut.
    pub first: usize,
    pub second: usize,
    /// Their projective distance.
    pub distance: f64,
    /// Both strands leave the junction in (nearly) the same direction.
    pub tangential: bool,
}

#[derive(Debug, Clone)]
pub struct SplitOutcome<T: Real> {
    pub loops: Vec<Loop<T>>,
    pub events: Vec<SplitEvent>,
}

/// Real coordinates of `|ψ⟩⟨ψ|`; Euclidean distance equals the
/// Hilbert–Schmidt distance `√2 sin δ` between the rays.
fn projector_coords<T: Real>(psi: &StateVector<T>) -> Vec<T> {
    let a = psi.amplitudes();
    let r2 = T::lit(std::f64::consts::SQRT_2);
    let mut x = Vec::with_capacity(a.len() * a.len());
    for i in 0..a.len() {
        x.push(a[i].norm_sqr());
        for j in (i + 1)..a.len() {
            let p = a[i] * a[j].conj();
            x.push(r2 * p.re);
            x.push(r2 * p.im);
        }
    }
    x
}

/// Lexicographically first pair `(j, k)` of projectively coinciding states
/// that cuts the loop into two sub-loops of at least three states, each with
/// Fubini–Study length above `10·tol`.
fn first_coincidence<T: Real>(lp: &Loop<T>, tol: T) -> Option<(usize, usize, T)> {
    let n = lp.len();
    if n < 6 {
        return None;
    }
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(T::zero());
    for j in 0..n {
        let d = segment_distance(lp.state(j), lp.state(j + 1));
        cum.push(cum[j] + d);
    }
    let total = cum[n];
    let min_arc = T::lit(10.0) * tol;

    let coords: Vec<Vec<T>> = lp.states().iter().map(projector_coords).collect();
    let dimx = coords[0].len();
    // fixed generic projection direction
    let w: Vec<T> = (0..dimx).map(|i| T::lit(((i as f64) * 0.754_877_666 + 0.3).sin())).collect();
    let keys: Vec<T> = coords.iter().map(|x| x.iter().zip(&w).map(|(a, b)| *a * *b).sum()).collect();
    let wnorm = w.iter().map(|x| *x * *x).sum::<T>().sqrt();
    let window = T::lit(std::f64::consts::SQRT_2) * tol * wnorm * T::lit(1.0 + 1e-9);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).expect("finite keys"));

    let mut best: Option<(usize, usize, T)> = None;
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if keys[b] - keys[a] > window {
                break;
            }
            let (j, k) = if a < b { (a, b) } else { (b, a) };
            if k - j < 3 || n - (k - j) < 3 {
                continue;
            }
            if let Some((bj, bk, _)) = best {
                if (j, k) >= (bj, bk) {
                    continue;
                }
            }
            let inner_arc = cum[k] - cum[j];
            if inner_arc <= min_arc || total - inner_arc <= min_arc {
                continue;
            }
            let d = segment_distance(lp.state(j), lp.state(k));
            if d < tol {
                best = Some((j, k, d));
            }
        }
    }
    best
}

fn tangential_junction<T: Real>(lp: &Loop<T>, j: usize, k: usize) -> bool {
    // strands leaving j and k head to nearly the same ray
    let step = segment_distance(lp.state(j), lp.state(j + 1)).max(segment_distance(lp.state(k), lp.state(k + 1)));
    segment_distance(lp.state(j + 1), lp.state(k + 1)) < T::lit(0.1) * step
}

/// Splits a loop at projective self-coincidences, recursively and greedily
/// at the first pair, recording each cut.
pub fn split_self_intersections_traced<T: Real>(lp: &Loop<T>, tol: T) -> SplitOutcome<T> {
    let mut done = Vec::new();
    let mut events = Vec::new();
    let mut stack = vec![lp.clone()];
    while let Some(cur) = stack.pop() {
        let Some((j, k, d)) = first_coincidence(&cur, tol) else {
            done.push(cur);
            continue;
        };
        let n = cur.len();
        let inner: Vec<_> = (j..k).map(|i| cur.state(i).clone()).collect();
        let outer: Vec<_> = (k..n + j).map(|i| cur.state(i).clone()).collect();
        match (Loop::new(inner), Loop::new(outer)) {
            (Ok(a), Ok(b)) => {
                events.push(SplitEvent { first: j, second: k, distance: d.as_f64(), tangential: tangential_junction(&cur, j, k) });
                // process `a` first so results keep traversal order
                stack.push(b);
                stack.push(a);
            }
            _ => done.push(cur),
        }
    }
    SplitOutcome { loops: done, events }
}

/// Splits a loop into sub-loops at projective self-coincidences closer than
/// `tol`; a loop without coincidences comes back unchanged as the only entry.
pub fn split_self_intersections<T: Real>(lp: &Loop<T>, tol: T) -> Vec<Loop<T>> {
    split_self_intersections_traced(lp, tol).loops
}
