//! Small dense complex matrices and a Hermitian eigensolver.
//!
//! Matrices here are at most a few dozen rows, so everything is row-major
//! `Vec` storage and the eigensolver is a cyclic complex Jacobi sweep.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{QgError, Result};
use crate::scalar::{Cx, Real};
use crate::state::StateVector;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Cx::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Cx::one() } else { Cx::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Cx<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(QgError::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Pauli matrices σ_x, σ_y, σ_z.
    pub fn pauli(axis: usize) -> Self {
        let (o, z, i) = (Cx::one(), Cx::zero(), Complex::new(T::zero(), T::one()));
        let data = match axis {
            0 => vec![z, o, o, z],
            1 => vec![z, -i, i, z],
            2 => vec![o, z, z, -o],
            _ => panic!("Pauli axis must be 0, 1 or 2"),
        };
        CMatrix { rows: 2, cols: 2, data }
    }

    /// `d₀·1 + d·σ` for a two-level system.
    pub fn bloch_hamiltonian(d0: T, d: [T; 3]) -> Self {
        let c = |re: T, im: T| Complex::new(re, im);
        CMatrix {
            rows: 2,
            cols: 2,
            data: vec![
                c(d0 + d[2], T::zero()),
                c(d[0], -d[1]),
                c(d[0], d[1]),
                c(d0 - d[2], T::zero()),
            ],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Cx<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Cx<T>) {
        self.data[i * self.cols + j] = z;
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Cx::zero(), |acc, k| acc + self.get(i, k) * other.get(k, j))
        })
    }

    pub fn matvec(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Cx::zero(), |acc, k| acc + self.get(i, k) * v[k]))
            .collect()
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.rows.min(self.cols)).fold(Cx::zero(), |acc, i| acc + self.get(i, i))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius(&self) -> T {
        crate::state::norm(&self.data)
    }

    /// `max |H − H†|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Spectrum of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone, Serialize)]
pub struct Eigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: Vec<StateVector<T>>,
}

impl<T: Real> Eigen<T> {
    /// Smallest distance from eigenvalue `band` to its neighbours.
    pub fn gap(&self, band: usize) -> T {
        let v = &self.values;
        let below = if band > 0 { v[band] - v[band - 1] } else { T::infinity() };
        let above = if band + 1 < v.len() { v[band + 1] - v[band] } else { T::infinity() };
        below.min(above)
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvectors come back gauge-fixed.
pub fn eigh<T: Real>(h: &CMatrix<T>) -> Result<Eigen<T>> {
    let n = h.rows;
    if n != h.cols || n == 0 {
        return Err(QgError::NotSquare { rows: h.rows, cols: h.cols });
    }
    if !h.is_finite() {
        return Err(QgError::NonFinite);
    }
    let scale = h.frobenius();
    let defect = h.hermiticity_defect();
    if defect > T::tol(Tolerances::DEFAULT.hermitian) * scale.max(T::one()) {
        return Err(QgError::NotHermitian(defect.as_f64()));
    }

    // symmetrize so rounding in the input cannot leak into the rotations
    let half = T::lit(0.5);
    let mut a = CMatrix::from_fn(n, n, |i, j| (h.get(i, j) + h.get(j, i).conj()) * half);
    let mut v = CMatrix::<T>::identity(n);

    let off = |a: &CMatrix<T>| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s = s + a.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let target = T::epsilon() * scale * T::from_count(2 * n);

    let mut sweeps = 0;
    while off(&a) > target {
        sweeps += 1;
        if sweeps > 64 {
            return Err(QgError::EigenNotConverged(off(&a).as_f64()));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag <= T::min_positive_value() {
                    continue;
                }
                // D = diag(.., e^{-iφ} at q, ..) makes the (p,q) entry real
                let phase = apq / mag;
                for k in 0..n {
                    a.set(k, q, a.get(k, q) * phase.conj());
                    v.set(k, q, v.get(k, q) * phase.conj());
                }
                for k in 0..n {
                    a.set(q, k, a.get(q, k) * phase);
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let theta = (aqq - app) / (mag + mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (a.get(k, p), a.get(k, q));
                    a.set(k, p, kp * c - kq * s);
                    a.set(k, q, kp * s + kq * c);
                    let (vp, vq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, vp * c - vq * s);
                    v.set(k, q, vp * s + vq * c);
                }
                for k in 0..n {
                    let (pk, qk) = (a.get(p, k), a.get(q, k));
                    a.set(p, k, pk * c - qk * s);
                    a.set(q, k, pk * s + qk * c);
                }
                a.set(p, q, Cx::zero());
                a.set(q, p, Cx::zero());
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = order
        .iter()
        .map(|&col| {
            let amps: Vec<Cx<T>> = (0..n).map(|r| v.get(r, col)).collect();
            StateVector::from_amplitudes(amps).map(|s| s.gauge_fixed())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Eigen { values, vectors })
}

/// Eigenpair of one band, refusing bands that touch a neighbour.
///
/// The gap is compared against `degeneracy · max(‖H‖, energy_scale)`; pass
/// the model's characteristic energy so that a Hamiltonian which merely
/// happens to be small at some `k` is still recognized as degenerate.
pub fn eigh_band<T: Real>(h: &CMatrix<T>, band: usize, energy_scale: T) -> Result<(T, StateVector<T>)> {
    let eig = eigh(h)?;
    if band >= eig.values.len() {
        return Err(QgError::OutOfRange(format!("band {band} of {}", eig.values.len())));
    }
    let tol = T::lit(Tolerances::DEFAULT.degeneracy) * h.frobenius().max(energy_scale);
    let gap = eig.gap(band);
    if gap <= tol {
        return Err(QgError::DegenerateAtTolerance { band, gap: gap.as_f64(), tol: tol.as_f64() });
    }
    let Eigen { values, mut vectors } = eig;
    Ok((values[band], vectors.swap_remove(band)))
}
