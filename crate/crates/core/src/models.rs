//! Two-band Bloch Hamiltonians and the loops their band states trace.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QgError, Result};
use crate::geometry::{Chart, Loop};
use crate::linalg::{eigh, eigh_band, CMatrix};
use crate::scalar::Real;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Lower,
    Upper,
}

impl Band {
    pub fn index(self) -> usize {
        match self {
            Band::Lower => 0,
            Band::Upper => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ModelKind<T: Real> {
    /// `(v + w cos k) σ_x + w sin k σ_y`; intracell `v`, intercell `w`.
    Ssh { v: T, w: T },
    /// Flat-band ladder `2t (cos k σ_x + sin k σ_z)`.
    Creutz { t: T },
    /// Chiral continuum model with off-diagonal `scale·(k_x − i k_y)^N`.
    Rhombohedral { layers: u32, scale: T },
    /// `v_F (k_x σ_x + k_y σ_y)`.
    Dirac { v_f: T },
    /// Bloch vector tabulated on a k-grid, interpolated linearly.
    Tabulated(Arc<TabulatedModel<T>>),
    /// Smooth Bloch vector given by a truncated Fourier series in `k`.
    Fourier(Arc<BlochFourier<T>>),
}

#[derive(Debug, Clone)]
pub struct ModelSpec<T: Real> {
    pub kind: ModelKind<T>,
    pub lattice_const: T,
}

impl<T: Real> ModelSpec<T> {
    fn with_kind(kind: ModelKind<T>) -> Self {
        ModelSpec { kind, lattice_const: T::one() }
    }

    pub fn ssh(v: T, w: T) -> Self {
        Self::with_kind(ModelKind::Ssh { v, w })
    }

    pub fn creutz(t: T) -> Self {
        Self::with_kind(ModelKind::Creutz { t })
    }

    pub fn rhombohedral(layers: u32, scale: T) -> Result<Self> {
        if layers == 0 {
            return Err(QgError::InvalidConfig("rhombohedral model needs N ≥ 1 layers".into()));
        }
        Ok(Self::with_kind(ModelKind::Rhombohedral { layers, scale }))
    }

    pub fn dirac(v_f: T) -> Self {
        Self::with_kind(ModelKind::Dirac { v_f })
    }

    pub fn tabulated(table: TabulatedModel<T>) -> Self {
        Self::with_kind(ModelKind::Tabulated(Arc::new(table)))
    }

    pub fn fourier(series: BlochFourier<T>) -> Self {
        Self::with_kind(ModelKind::Fourier(Arc::new(series)))
    }

    pub fn with_lattice_const(mut self, a: T) -> Result<Self> {
        if !(a > T::zero()) || !a.is_finite() {
            return Err(QgError::InvalidConfig(format!("lattice constant {a} must be positive")));
        }
        self.lattice_const = a;
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Ssh { .. } => "ssh",
            ModelKind::Creutz { .. } => "creutz",
            ModelKind::Rhombohedral { .. } => "rhombohedral",
            ModelKind::Dirac { .. } => "dirac",
            ModelKind::Tabulated(_) => "tabulated",
            ModelKind::Fourier(_) => "fourier",
        }
    }

    /// Number of momentum components.
    pub fn dim_k(&self) -> usize {
        match self.kind {
            ModelKind::Rhombohedral { .. } | ModelKind::Dirac { .. } => 2,
            _ => 1,
        }
    }

    pub fn bands(&self) -> usize {
        2
    }

    /// Bloch vector `d(k)` with `H(k) = d·σ`.
    pub fn bloch_vector(&self, k: &[T]) -> Result<[T; 3]> {
        if k.len() != self.dim_k() {
            return Err(QgError::DimensionMismatch { expected: self.dim_k(), found: k.len() });
        }
        if k.iter().any(|x| !x.is_finite()) {
            return Err(QgError::NonFinite);
        }
        let a = self.lattice_const;
        let two = T::lit(2.0);
        let o = T::zero();
        Ok(match &self.kind {
            ModelKind::Ssh { v, w } => {
                let (s, c) = (k[0] * a).sin_cos();
                [*v + *w * c, *w * s, o]
            }
            ModelKind::Creutz { t } => {
                let (s, c) = (k[0] * a).sin_cos();
                [two * *t * c, o, two * *t * s]
            }
            ModelKind::Rhombohedral { layers, scale } => {
                let z = Complex::new(k[0], k[1]).powu(*layers) * *scale;
                [z.re, z.im, o]
            }
            ModelKind::Dirac { v_f } => [*v_f * k[0], *v_f * k[1], o],
            ModelKind::Tabulated(tab) => tab.eval(k[0] * a),
            ModelKind::Fourier(f) => f.eval(k[0] * a),
        })
    }

    pub fn hamiltonian(&self, k: &[T]) -> Result<CMatrix<T>> {
        Ok(CMatrix::bloch_hamiltonian(T::zero(), self.bloch_vector(k)?))
    }

    /// Operator anticommuting with every `H(k)`, when the model has one.
    pub fn chiral_operator(&self) -> Option<CMatrix<T>> {
        match self.kind {
            ModelKind::Ssh { .. } | ModelKind::Rhombohedral { .. } | ModelKind::Dirac { .. } => Some(CMatrix::pauli(2)),
            ModelKind::Creutz { .. } => Some(CMatrix::pauli(1)),
            _ => None,
        }
    }

    /// Energy used as the floor of the degeneracy test, so that gaps much
    /// smaller than the model's own scale count as closed.
    fn energy_scale(&self) -> T {
        match &self.kind {
            ModelKind::Ssh { v, w } => v.abs() + w.abs(),
            ModelKind::Creutz { t } => T::lit(2.0) * t.abs(),
            _ => T::zero(),
        }
    }

    pub fn energies(&self, k: &[T]) -> Result<Vec<T>> {
        Ok(eigh(&self.hamiltonian(k)?)?.values)
    }

    /// Gauge-fixed eigenvector of one band.
    pub fn band_state(&self, k: &[T], band: Band) -> Result<StateVector<T>> {
        let (_, psi) = eigh_band(&self.hamiltonian(k)?, band.index(), self.energy_scale())?;
        Ok(psi)
    }

    /// Chart `k ↦ |u_band(k)⟩` for metric evaluations.
    pub fn band_chart(&self, band: Band) -> Result<Chart<'_, T>> {
        Chart::with_default_step(self.dim_k(), move |k: &[T]| self.band_state(k, band))
    }

    /// Band states at `kⱼ = 2πj/(n a)` across the Brillouin zone.
    pub fn bz_loop(&self, band: Band, n: usize) -> Result<Loop<T>> {
        if self.dim_k() != 1 {
            return Err(QgError::WrongDimension { expected: 1, found: self.dim_k() });
        }
        if n < 3 {
            return Err(QgError::BadResolution(format!("need at least 3 k-points, got {n}")));
        }
        let states = (0..n)
            .map(|j| self.band_state(&[bz_point(j, n, self.lattice_const)], band))
            .collect::<Result<Vec<_>>>()?;
        Loop::new(states)
    }

    /// Band states on the Fermi circle at energy `e_f > 0`.
    ///
    /// For the rhombohedral model the sample count is rounded up to a
    /// multiple of `N` so that the `N` windings share sample points.
    pub fn fermi_surface_loop(&self, e_f: T, n: usize, band: Band) -> Result<FermiLoop<T>> {
        if !(e_f > T::zero()) || !e_f.is_finite() {
            return Err(QgError::OutOfRange(format!("Fermi energy {e_f} must be positive")));
        }
        if n < 3 {
            return Err(QgError::BadResolution(format!("need at least 3 samples, got {n}")));
        }
        let (k_radius, n) = match &self.kind {
            ModelKind::Dirac { v_f } => (e_f / v_f.abs(), n),
            ModelKind::Rhombohedral { layers, scale } => {
                let l = *layers as usize;
                ((e_f / scale.abs()).powf(T::one() / T::from_count(l)), n.div_ceil(l) * l)
            }
            _ => return Err(QgError::WrongDimension { expected: 2, found: self.dim_k() }),
        };
        if !k_radius.is_finite() || !(k_radius > T::zero()) {
            return Err(QgError::OutOfRange(format!("Fermi radius {k_radius} is not positive and finite")));
        }
        let states = (0..n)
            .map(|j| {
                let phi = T::lit(2.0) * T::PI() * T::from_count(j) / T::from_count(n);
                let (s, c) = phi.sin_cos();
                self.band_state(&[k_radius * c, k_radius * s], band)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FermiLoop { lp: Loop::new(states)?, k_radius, perimeter: T::lit(2.0) * T::PI() * k_radius })
    }
}

pub(crate) fn bz_point<T: Real>(j: usize, n: usize, a: T) -> T {
    T::lit(2.0) * T::PI() * T::from_count(j) / (T::from_count(n) * a)
}

#[derive(Debug, Clone)]
pub struct FermiLoop<T: Real> {
    pub lp: Loop<T>,
    /// `|k|` on the Fermi circle.
    pub k_radius: T,
    /// `ℓ_FS = 2π|k|`.
    pub perimeter: T,
}

/// Closed-form metric of the gapless Dirac model,
/// `g = (1/4k⁴) [[k_y², −k_x k_y], [−k_x k_y, k_x²]]`.
pub fn dirac_metric<T: Real>(k: [T; 2]) -> Result<[[T; 2]; 2]> {
    let k2 = k[0] * k[0] + k[1] * k[1];
    if !(k2 > T::zero()) {
        return Err(QgError::SingularAtDiracPoint);
    }
    let s = T::one() / (T::lit(4.0) * k2 * k2);
    Ok([[s * k[1] * k[1], -s * k[0] * k[1]], [-s * k[0] * k[1], s * k[0] * k[0]]])
}

/// Bloch vector sampled at increasing momenta over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedModel<T: Real> {
    k: Vec<T>,
    d: Vec<[T; 3]>,
    period: T,
}

impl<T: Real> TabulatedModel<T> {
    /// Rows must have strictly increasing `k` spanning less than `period`.
    pub fn new(k: Vec<T>, d: Vec<[T; 3]>, period: T) -> Result<Self> {
        if k.len() != d.len() {
            return Err(QgError::DimensionMismatch { expected: k.len(), found: d.len() });
        }
        if k.len() < 2 {
            return Err(QgError::InvalidConfig("table needs at least two rows".into()));
        }
        if !(period > T::zero()) {
            return Err(QgError::InvalidConfig(format!("period {period} must be positive")));
        }
        if k.windows(2).any(|w| !(w[1] > w[0])) || !(k[k.len() - 1] - k[0] < period) {
            return Err(QgError::InvalidConfig("k column must increase strictly within one period".into()));
        }
        if d.iter().flatten().chain(&k).any(|x| !x.is_finite()) {
            return Err(QgError::NonFinite);
        }
        Ok(TabulatedModel { k, d, period })
    }

    /// Reads CSV columns `k, dx, dy, dz` (header row required), period `2π`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_path(path)?;
        let mut k = Vec::new();
        let mut d = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != 4 {
                return Err(QgError::Parse(format!("expected 4 columns, found {}", rec.len())));
            }
            let v = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| QgError::Parse(format!("{s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            k.push(T::lit(v[0]));
            d.push([T::lit(v[1]), T::lit(v[2]), T::lit(v[3])]);
        }
        Self::new(k, d, T::lit(2.0) * T::PI())
    }

    /// Periodic piecewise-linear interpolation.
    pub fn eval(&self, k: T) -> [T; 3] {
        let k0 = self.k[0];
        let x = k0 + (k - k0) - self.period * ((k - k0) / self.period).floor();
        let n = self.k.len();
        let i = self.k.partition_point(|&kk| kk <= x).saturating_sub(1);
        let (ka, da) = (self.k[i], self.d[i]);
        let (kb, db) = if i + 1 < n { (self.k[i + 1], self.d[i + 1]) } else { (self.k[0] + self.period, self.d[0]) };
        let t = (x - ka) / (kb - ka);
        [0, 1, 2].map(|c| da[c] + t * (db[c] - da[c]))
    }
}

/// `d(k) = Σ_{m=0..K} a_m cos(mk) + b_m sin(mk)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochFourier<T: Real> {
    pub cos: Vec<[T; 3]>,
    pub sin: Vec<[T; 3]>,
}

impl<T: Real> BlochFourier<T> {
    pub fn eval(&self, k: T) -> [T; 3] {
        let mut d = [T::zero(); 3];
        for (m, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (s, c) = (T::from_count(m) * k).sin_cos();
            for i in 0..3 {
                d[i] = d[i] + a[i] * c + b[i] * s;
            }
        }
        d
    }

    /// Random series with `harmonics` terms, redrawn until
    /// `min_k |d| ≥ 0.2 max_k |d|` on a 512-point grid.
    pub fn random_gapped<R: Rng + ?Sized>(harmonics: usize, rng: &mut R) -> Self {
        loop {
            let mut draw = |m: usize| {
                let w = 1.0 / (1.0 + m as f64);
                [0; 3].map(|_| T::lit(rng.gen_range(-w..w)))
            };
            let cos: Vec<_> = (0..=harmonics).map(&mut draw).collect();
            let sin: Vec<_> = (0..=harmonics).map(|m| if m == 0 { [T::zero(); 3] } else { draw(m) }).collect();
            let f = BlochFourier { cos, sin };
            let (lo, hi) = (0..512).fold((T::infinity(), T::zero()), |(lo, hi), j| {
                let d = f.eval(bz_point(j, 512, T::one()));
                let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                (lo.min(r), hi.max(r))
            });
            if lo >= T::lit(0.2) * hi && hi > T::zero() {
                return f;
            }
        }
    }
}

/// Model description as accepted from JSON: `{kind, parameters, lattice_const}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub kind: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default = "unit")]
    pub lattice_const: f64,
    /// CSV table for `kind = "tabulated"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

fn unit() -> f64 {
    1.0
}

impl ModelConfig {
    fn param(&self, key: &str) -> Result<f64> {
        self.parameters
            .get(key)
            .copied()
            .ok_or_else(|| QgError::InvalidConfig(format!("model {:?} needs parameter {key:?}", self.kind)))
    }

    pub fn to_spec<T: Real>(&self) -> Result<ModelSpec<T>> {
        let spec = match self.kind.to_ascii_lowercase().as_str() {
            "ssh" => ModelSpec::ssh(T::lit(self.param("v")?), T::lit(self.param("w")?)),
            "creutz" => ModelSpec::creutz(T::lit(self.param("t")?)),
            "rhombohedral" => {
                let n = self.param("N").or_else(|_| self.param("layers"))?;
                if n < 1.0 || n.fract() != 0.0 || n > u32::MAX as f64 {
                    return Err(QgError::InvalidConfig(format!("layer count {n} must be a positive integer")));
                }
                let scale = self.parameters.get("scale").copied().unwrap_or(1.0);
                ModelSpec::rhombohedral(n as u32, T::lit(scale))?
            }
            "dirac" => ModelSpec::dirac(T::lit(self.param("v_f").or_else(|_| self.param("v_F"))?)),
            "tabulated" => {
                let path = self
                    .table
                    .as_ref()
                    .ok_or_else(|| QgError::InvalidConfig("tabulated model needs a \"table\" path".into()))?;
                ModelSpec::tabulated(TabulatedModel::from_csv(path)?)
            }
            other => return Err(QgError::InvalidConfig(format!("unknown model kind {other:?}"))),
        };
        spec.with_lattice_const(T::lit(self.lattice_const))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{qgt_at, summarize};
    use crate::inequalities::summarize_split;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close_mat(a: &CMatrix<f64>, b: &CMatrix<f64>, tol: f64) -> bool {
        a.sub(b).max_abs() < tol
    }

    #[test]
    fn hamiltonian_examples() {
        let h = ModelSpec::ssh(0.0, 1.0).hamiltonian(&[PI / 2.0]).unwrap();
        assert!(close_mat(&h, &CMatrix::pauli(1), 1e-15));
        let h = ModelSpec::dirac(1.0).hamiltonian(&[1.0, 0.0]).unwrap();
        assert!(close_mat(&h, &CMatrix::pauli(0), 1e-15));
        let creutz = ModelSpec::<f64>::creutz(1.0);
        for j in 0..64 {
            let e = creutz.energies(&[bz_point(j, 64, 1.0)]).unwrap();
            assert!((e[0] + 2.0).abs() < 1e-12 && (e[1] - 2.0).abs() < 1e-12);
        }
        assert!(matches!(
            ModelSpec::<f64>::dirac(1.0).hamiltonian(&[1.0]),
            Err(QgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn chiral_symmetry() {
        let models = [
            ModelSpec::ssh(0.7, 1.3),
            ModelSpec::creutz(0.8),
            ModelSpec::rhombohedral(3, 1.5).unwrap(),
            ModelSpec::dirac(2.0),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in &models {
            let c = m.chiral_operator().unwrap();
            for _ in 0..50 {
                let k: Vec<f64> = (0..m.dim_k()).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let h = m.hamiltonian(&k).unwrap();
                let anti = h.matmul(&c).add(&c.matmul(&h));
                assert!(anti.max_abs() < 1e-12, "{}", m.name());
            }
        }
    }

    #[test]
    fn band_state_examples() {
        let dirac = ModelSpec::dirac(1.0);
        for alpha in [0.0, 0.4, 2.0, -1.2] {
            let (s, c) = f64::sin_cos(alpha);
            let b = dirac.band_state(&[c, s], Band::Lower).unwrap().bloch_vector().unwrap();
            assert!((b[0] + c).abs() < 1e-12 && (b[1] + s).abs() < 1e-12 && b[2].abs() < 1e-12);
        }
        assert!(matches!(dirac.band_state(&[0.0, 0.0], Band::Lower), Err(QgError::DegenerateAtTolerance { .. })));
        let critical = ModelSpec::ssh(1.0, 1.0);
        assert!(matches!(critical.band_state(&[PI], Band::Lower), Err(QgError::DegenerateAtTolerance { .. })));
        assert!(critical.bz_loop(Band::Lower, 64).is_err());
    }

    #[test]
    fn ssh_quantization() {
        let top = summarize(&ModelSpec::ssh(0.0, 1.0).bz_loop(Band::Lower, 1024).unwrap());
        assert!((top.d_fs - PI).abs() < 1e-5 && (top.gamma_b - PI).abs() < 1e-5);
        let trivial = summarize(&ModelSpec::<f64>::ssh(2.0, 1.0).bz_loop(Band::Lower, 1024).unwrap());
        assert!(trivial.gamma_b.abs() < 1e-5);
        let creutz = summarize(&ModelSpec::creutz(1.0).bz_loop(Band::Lower, 1024).unwrap());
        assert!((creutz.d_fs - PI).abs() < 1e-5 && (creutz.gamma_b - PI).abs() < 1e-5);
    }

    #[test]
    fn creutz_winds_in_xz_plane() {
        let lp = ModelSpec::<f64>::creutz(1.0).bz_loop(Band::Lower, 64).unwrap();
        for s in lp.states() {
            assert!(s.bloch_vector().unwrap()[1].abs() < 1e-12);
        }
    }

    #[test]
    fn fermi_surfaces() {
        let dirac = ModelSpec::dirac(1.0);
        let fl = dirac.fermi_surface_loop(2.0, 1024, Band::Upper).unwrap();
        assert!((fl.perimeter - 4.0 * PI).abs() < 1e-12);
        let s = summarize(&fl.lp);
        assert!((s.d_fs - PI).abs() < 1e-5 && (s.gamma_b - PI).abs() < 1e-5);
        for layers in 1..=5u32 {
            let m = ModelSpec::rhombohedral(layers, 1.0).unwrap();
            let fl = m.fermi_surface_loop(1.0, 1000, Band::Upper).unwrap();
            assert_eq!(fl.lp.len() % layers as usize, 0);
            let parts = summarize_split(&fl.lp);
            assert_eq!(parts.len(), layers as usize);
            let sd: f64 = parts.iter().map(|p| p.d_fs).sum();
            let sg: f64 = parts.iter().map(|p| p.gamma_b).sum();
            let target = layers as f64 * PI;
            assert!((sd - target).abs() < 1e-5 && (sg - target).abs() < 1e-5, "{layers}: {sd} {sg}");
        }
        assert!(ModelSpec::ssh(1.0, 2.0).fermi_surface_loop(1.0, 64, Band::Upper).is_err());
    }

    #[test]
    fn dirac_metric_examples() {
        let g = dirac_metric([1.0, 0.0]).unwrap();
        assert_eq!(g, [[0.0, 0.0], [0.0, 0.25]]);
        let g = dirac_metric([0.0, 2.0]).unwrap();
        assert_eq!(g, [[1.0 / 16.0, 0.0], [0.0, 0.0]]);
        let k = [0.3f64, -1.1];
        let g = dirac_metric(k).unwrap();
        let r = [k[0], k[1]];
        let grr: f64 = (0..2).map(|i| (0..2).map(|j| r[i] * g[i][j] * r[j]).sum::<f64>()).sum();
        assert!(grr.abs() < 1e-15);
        assert!(matches!(dirac_metric([0.0, 0.0]), Err(QgError::SingularAtDiracPoint)));
    }

    #[test]
    fn dirac_metric_matches_finite_differences() {
        let m = ModelSpec::<f64>::dirac(1.7);
        let chart = m.band_chart(Band::Lower).unwrap();
        for k in [[0.1, 0.0], [0.3, -0.2], [5.0, 7.0]] {
            let q = qgt_at(&chart, &k).unwrap();
            let g = dirac_metric(k).unwrap();
            let scale = 1.0 / (4.0 * (k[0] * k[0] + k[1] * k[1]));
            for i in 0..2 {
                for j in 0..2 {
                    assert!((q.g[i][j] - g[i][j]).abs() < 1e-6 * scale, "{k:?} {i}{j}");
                }
            }
        }
    }

    #[test]
    fn two_band_metric_oracle() {
        // g_kk = |∂_k n̂|² / 4 for a two-band model
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = BlochFourier::<f64>::random_gapped(2, &mut rng);
        let m = ModelSpec::fourier(f.clone());
        let chart = m.band_chart(Band::Upper).unwrap();
        for k in [0.1, 1.3, 4.0] {
            let h = 1e-5;
            let nhat = |k: f64| {
                let d = f.eval(k);
                let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                d.map(|x| x / r)
            };
            let (a, b) = (nhat(k + h), nhat(k - h));
            let dn2: f64 = (0..3).map(|i| ((a[i] - b[i]) / (2.0 * h)).powi(2)).sum();
            let q = qgt_at(&chart, &[k]).unwrap();
            assert!((q.g[0][0] - dn2 / 4.0).abs() < 1e-6 * dn2.max(1.0), "{k}");
        }
    }

    #[test]
    fn tabulated_interpolation() {
        let k = vec![0.0, PI / 2.0, PI, 1.5 * PI];
        let d = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]];
        let tab = TabulatedModel::new(k, d, 2.0 * PI).unwrap();
        assert_eq!(tab.eval(PI / 4.0), [0.5, 0.5, 0.0]);
        let wrap = tab.eval(1.75 * PI);
        assert!((wrap[0] - 0.5).abs() < 1e-12 && (wrap[1] + 0.5).abs() < 1e-12);
        let again = tab.eval(1.75 * PI - 4.0 * PI);
        assert!((again[0] - wrap[0]).abs() < 1e-12);
        let m = ModelSpec::tabulated(tab);
        let s = summarize(&m.bz_loop(Band::Lower, 400).unwrap());
        assert!((s.gamma_b - PI).abs() < 1e-9);
        assert!(TabulatedModel::new(vec![0.0, 0.0], vec![[1.0, 0.0, 0.0]; 2], 1.0).is_err());
    }

    #[test]
    fn config_round_trip() {
        let cfg: ModelConfig =
            serde_json::from_str(r#"{"kind": "ssh", "parameters": {"v": 0.5, "w": 1.0}}"#).unwrap();
        assert_eq!(cfg.lattice_const, 1.0);
        let spec = cfg.to_spec::<f64>().unwrap();
        assert_eq!(spec.name(), "ssh");
        let bad: ModelConfig = serde_json::from_str(r#"{"kind": "ssh", "parameters": {"v": 0.5}}"#).unwrap();
        assert!(matches!(bad.to_spec::<f64>(), Err(QgError::InvalidConfig(_))));
        let rh: ModelConfig =
            serde_json::from_str(r#"{"kind": "rhombohedral", "parameters": {"N": 2.5}}"#).unwrap();
        assert!(rh.to_spec::<f64>().is_err());
        let unknown: ModelConfig = serde_json::from_str(r#"{"kind": "kagome"}"#).unwrap();
        assert!(unknown.to_spec::<f64>().is_err());
    }

    #[test]
    fn random_models_are_gapped() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let m = ModelSpec::fourier(BlochFourier::<f64>::random_gapped(3, &mut rng));
            assert!(m.bz_loop(Band::Lower, 128).is_ok());
        }
    }
}
