//! Pure-state primitives: raw amplitude vectors, normalized states and
//! points of complex projective space.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{QgError, Result};
use crate::linalg::CMatrix;
use crate::scalar::{Cx, Real};
use crate::tolerances::Tolerances;

/// An arbitrary (not necessarily normalized) vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVector<T: Real>(pub Vec<Cx<T>>);

impl<T: Real> CVector<T> {
    pub fn new(entries: Vec<Cx<T>>) -> Self {
        CVector(entries)
    }

    pub fn from_real(entries: &[T]) -> Self {
        CVector(entries.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> T {
        norm(&self.0)
    }
}

pub(crate) fn norm<T: Real>(v: &[Cx<T>]) -> T {
    // scaled sum of squares, safe against overflow and underflow
    let scale = v.iter().fold(T::zero(), |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let s: T = v.iter().map(|z| (z.re / scale).powi(2) + (z.im / scale).powi(2)).sum();
    scale * s.sqrt()
}

pub(crate) fn inner<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
    a.iter().zip(b).fold(Cx::zero(), |acc, (x, y)| acc + x.conj() * y)
}

/// A unit-norm vector of complex amplitudes: a pure state with a
/// particular (arbitrary) global phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVector<T: Real> {
    amps: Vec<Cx<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps amplitudes that are already normalized; fails otherwise.
    pub fn from_normalized(amps: Vec<Cx<T>>) -> Result<Self> {
        if amps.is_empty() {
            return Err(QgError::DimensionMismatch { expected: 1, found: 0 });
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QgError::NonFinite);
        }
        let drift = (norm(&amps) - T::one()).abs();
        if drift > T::tol(Tolerances::DEFAULT.norm) {
            return Err(QgError::NotNormalized(drift.as_f64()));
        }
        Ok(StateVector { amps })
    }

    /// Normalizes arbitrary amplitudes.
    pub fn from_amplitudes(amps: Vec<Cx<T>>) -> Result<Self> {
        normalize(&CVector(amps))
    }

    /// The computational basis state `|index⟩` of a `dim`-level system.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} outside dimension {dim}");
        let mut amps = vec![Cx::zero(); dim];
        amps[index] = Cx::one();
        StateVector { amps }
    }

    /// Two-level state on the Bloch sphere at polar angle `theta` and
    /// azimuth `phi`: `(cos θ/2, e^{iφ} sin θ/2)`.
    pub fn bloch(theta: T, phi: T) -> Self {
        let half = theta / T::lit(2.0);
        StateVector {
            amps: vec![
                Complex::new(half.cos(), T::zero()),
                Complex::from_polar(half.sin(), phi),
            ],
        }
    }

    /// Two-level state whose Bloch vector points along `n` (need not be
    /// unit length, must be nonzero).
    pub fn from_bloch_vector(n: [T; 3]) -> Result<Self> {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !(len > T::zero()) || !len.is_finite() {
            return Err(QgError::ZeroVector(len.as_f64()));
        }
        let (x, y, z) = (n[0] / len, n[1] / len, n[2] / len);
        // pick the chart that stays away from its singular pole
        let amps = if z >= T::zero() {
            vec![Complex::new(T::one() + z, T::zero()), Complex::new(x, y)]
        } else {
            vec![Complex::new(x, -y), Complex::new(T::one() - z, T::zero())]
        };
        StateVector::from_amplitudes(amps)
    }

    /// The two-band state `(1, z₁)/√(1+|z₁|²)`.
    pub fn from_z1(z1: Cx<T>) -> Self {
        let s = (T::one() + z1.norm_sqr()).sqrt();
        StateVector {
            amps: vec![Complex::new(T::one() / s, T::zero()), z1 / s],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Cx<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Cx<T>> {
        self.amps
    }

    /// Multiplies by a global phase `e^{iα}`.
    pub fn with_phase(&self, alpha: T) -> Self {
        let p = Complex::from_polar(T::one(), alpha);
        StateVector {
            amps: self.amps.iter().map(|z| z * p).collect(),
        }
    }

    /// Bloch vector `⟨ψ|σ|ψ⟩` of a two-level state.
    pub fn bloch_vector(&self) -> Result<[T; 3]> {
        if self.dim() != 2 {
            return Err(QgError::WrongDimension { expected: 2, found: self.dim() });
        }
        let (a, b) = (self.amps[0], self.amps[1]);
        let ab = a.conj() * b;
        let two = T::lit(2.0);
        Ok([two * ab.re, two * ab.im, a.norm_sqr() - b.norm_sqr()])
    }

    /// Gauge-fixed representative: the first entry with modulus above the
    /// gauge threshold is made real and positive.
    pub fn gauge_fixed(&self) -> Self {
        let thresh = T::tol(Tolerances::DEFAULT.gauge_nonzero);
        match self.amps.iter().find(|z| z.norm() > thresh) {
            Some(anchor) => {
                let phase = anchor.conj() / anchor.norm();
                StateVector {
                    amps: self.amps.iter().map(|z| z * phase).collect(),
                }
            }
            None => self.clone(),
        }
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for StateVector<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw<T> {
            amps: Vec<Complex<T>>,
        }
        let raw = Raw::<T>::deserialize(d)?;
        StateVector::from_normalized(raw.amps).map_err(serde::de::Error::custom)
    }
}

/// Scales `v` to unit norm.
pub fn normalize<T: Real>(v: &CVector<T>) -> Result<StateVector<T>> {
    if v.is_empty() {
        return Err(QgError::DimensionMismatch { expected: 1, found: 0 });
    }
    if v.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QgError::NonFinite);
    }
    let n = v.norm();
    if n <= T::lit(Tolerances::DEFAULT.zero_norm) {
        return Err(QgError::ZeroVector(n.as_f64()));
    }
    let amps = v.0.iter().map(|z| z / n).collect();
    Ok(StateVector { amps })
}

/// `⟨a|b⟩`, conjugating the first argument.
pub fn overlap<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<Cx<T>> {
    if a.dim() != b.dim() {
        return Err(QgError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(inner(&a.amps, &b.amps))
}

/// Rank-one projector `|ψ⟩⟨ψ|`.
pub fn projector<T: Real>(psi: &StateVector<T>) -> CMatrix<T> {
    let m = psi.dim();
    let a = psi.amplitudes();
    CMatrix::from_fn(m, m, |i, j| a[i] * a[j].conj())
}

/// A point of complex projective space, stored through its gauge-fixed
/// representative.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectivePoint<T: Real> {
    rep: StateVector<T>,
}

impl<T: Real> ProjectivePoint<T> {
    pub fn new(psi: &StateVector<T>) -> Self {
        ProjectivePoint { rep: psi.gauge_fixed() }
    }

    pub fn representative(&self) -> &StateVector<T> {
        &self.rep
    }

    /// Fidelity `|⟨a|b⟩|` between the two rays.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(overlap(&self.rep, &other.rep)?.norm())
    }
}

impl<T: Real> PartialEq for ProjectivePoint<T> {
    fn eq(&self, other: &Self) -> bool {
        match self.fidelity(other) {
            Ok(f) => f >= T::one() - T::tol(Tolerances::DEFAULT.projective_eq),
            Err(_) => false,
        }
    }
}
