//! Classical and quantum isoperimetric checks with margin reports.

use serde::{Deserialize, Serialize};

use crate::error::{QgError, Result};
use crate::geometry::{summarize, Loop, LoopSummary};
use crate::loops::split_self_intersections;
use crate::scalar::Real;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IneqKind {
    Plane,
    Sphere,
    StrongQII,
    WeakQII,
    Aggregate,
}

/// Quantities a report was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IneqInputs {
    Loop { d_fs: f64, gamma_b: f64 },
    Shape { perimeter: f64, area: f64, radius: Option<f64> },
    Aggregate { sum_d: f64, sum_gamma: f64, count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IneqReport {
    pub name: IneqKind,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; the inequality holds when this is non-negative.
    pub margin: f64,
    pub saturated: bool,
    pub tol: f64,
    pub inputs: IneqInputs,
    /// Isoperimetric quotient, for the classical checks with positive area.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quotient: Option<f64>,
    /// `d − |γ|` for the weak check and aggregates.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub magnitude_margin: Option<f64>,
    /// Strong check applied outside the two-band simple-loop setting.
    #[serde(default)]
    pub conjecture: bool,
}

impl IneqReport {
    fn new(name: IneqKind, lhs: f64, rhs: f64, tol: f64, inputs: IneqInputs) -> Self {
        let margin = lhs - rhs;
        IneqReport {
            name,
            lhs,
            rhs,
            margin,
            saturated: margin.abs() <= tol,
            tol,
            inputs,
            quotient: None,
            magnitude_margin: None,
            conjecture: false,
        }
    }

    /// Holds up to the report tolerance.
    pub fn holds(&self) -> bool {
        self.margin >= -self.tol
    }
}

fn classical_tol(lhs: f64) -> f64 {
    1e-9 * lhs.abs().max(1.0)
}

/// Planar isoperimetric inequality `P² ≥ 4πA`.
pub fn plane_check<T: Real>(perimeter: T, area: T) -> Result<IneqReport> {
    if perimeter < T::zero() || area < T::zero() {
        return Err(QgError::OutOfRange(format!("perimeter {perimeter} and area {area} must be non-negative")));
    }
    let lhs = perimeter * perimeter;
    let rhs = T::lit(4.0) * T::PI() * area;
    let mut r = IneqReport::new(
        IneqKind::Plane,
        lhs.as_f64(),
        rhs.as_f64(),
        classical_tol(lhs.as_f64()),
        IneqInputs::Shape { perimeter: perimeter.as_f64(), area: area.as_f64(), radius: None },
    );
    r.margin = (lhs - rhs).as_f64();
    r.saturated = r.margin.abs() <= r.tol;
    if area > T::zero() {
        r.quotient = Some((lhs / rhs).as_f64());
    }
    Ok(r)
}

/// Isoperimetric inequality on a sphere of radius `R`:
/// `P² ≥ 4πA − A²/R²`.
pub fn sphere_check<T: Real>(perimeter: T, area: T, radius: T) -> Result<IneqReport> {
    if !(radius > T::zero()) || perimeter < T::zero() || area < T::zero() {
        return Err(QgError::OutOfRange(format!("need R > 0, P ≥ 0, A ≥ 0; got {radius}, {perimeter}, {area}")));
    }
    let four_pi = T::lit(4.0) * T::PI();
    let max = four_pi * radius * radius;
    if area > max * (T::one() + T::tol(1e-12)) {
        return Err(QgError::AreaExceedsSphere { area: area.as_f64(), max: max.as_f64() });
    }
    let lhs = perimeter * perimeter;
    let rhs = four_pi * area - area * area / (radius * radius);
    let mut r = IneqReport::new(
        IneqKind::Sphere,
        lhs.as_f64(),
        rhs.as_f64(),
        classical_tol(lhs.as_f64()),
        IneqInputs::Shape { perimeter: perimeter.as_f64(), area: area.as_f64(), radius: Some(radius.as_f64()) },
    );
    r.margin = (lhs - rhs).as_f64();
    r.saturated = r.margin.abs() <= r.tol;
    if rhs > T::zero() {
        r.quotient = Some((lhs / rhs).as_f64());
    }
    Ok(r)
}

/// Strong quantum isoperimetric inequality `(|γ| − π)² + d² ≥ π²`.
pub fn strong_qii<T: Real>(s: &LoopSummary<T>) -> IneqReport {
    let pi = T::PI();
    let dg = s.gamma_b.abs() - pi;
    let lhs = dg * dg + s.d_fs * s.d_fs;
    // margin formed as (|γ|−π)² − π² + d² = |γ|(|γ| − 2π) + d² to avoid
    // cancelling two O(π²) terms
    let g = s.gamma_b.abs();
    let margin = g * (g - T::lit(2.0) * pi) + s.d_fs * s.d_fs;
    let mut r = IneqReport::new(
        IneqKind::StrongQII,
        lhs.as_f64(),
        (pi * pi).as_f64(),
        s.tolerance().as_f64(),
        IneqInputs::Loop { d_fs: s.d_fs.as_f64(), gamma_b: s.gamma_b.as_f64() },
    );
    r.margin = margin.as_f64();
    r.saturated = r.margin.abs() <= r.tol;
    r.conjecture = s.dim > 2 || s.subloop;
    r
}

/// Weak quantum isoperimetric inequality `d ≥ γ`, with `d − |γ|` alongside.
pub fn weak_qii<T: Real>(s: &LoopSummary<T>) -> IneqReport {
    let mut r = IneqReport::new(
        IneqKind::WeakQII,
        s.d_fs.as_f64(),
        s.gamma_b.as_f64(),
        s.tolerance().as_f64(),
        IneqInputs::Loop { d_fs: s.d_fs.as_f64(), gamma_b: s.gamma_b.as_f64() },
    );
    r.margin = (s.d_fs - s.gamma_b).as_f64();
    r.saturated = r.margin.abs() <= r.tol;
    r.magnitude_margin = Some((s.d_fs - s.gamma_b.abs()).as_f64());
    r
}

/// `Σ d ≥ Σ γ` over the sub-loops of a split loop.
pub fn aggregate_subloops<T: Real>(parts: &[LoopSummary<T>]) -> Result<IneqReport> {
    if parts.is_empty() {
        return Err(QgError::EmptyInput);
    }
    let sum_d: T = parts.iter().map(|s| s.d_fs).sum();
    let sum_g: T = parts.iter().map(|s| s.gamma_b).sum();
    let sum_abs: T = parts.iter().map(|s| s.gamma_b.abs()).sum();
    let tol: f64 = parts.iter().map(|s| s.tolerance().as_f64()).sum();
    let mut r = IneqReport::new(
        IneqKind::Aggregate,
        sum_d.as_f64(),
        sum_g.as_f64(),
        tol,
        IneqInputs::Aggregate { sum_d: sum_d.as_f64(), sum_gamma: sum_g.as_f64(), count: parts.len() },
    );
    r.margin = (sum_d - sum_g).as_f64();
    r.saturated = r.margin.abs() <= tol;
    r.magnitude_margin = Some((sum_d - sum_abs).as_f64());
    Ok(r)
}

/// Summaries of the sub-loops of `lp` after splitting at self-coincidences.
/// Sub-loop summaries carry `subloop = true` and the running phase total.
pub fn summarize_split<T: Real>(lp: &Loop<T>) -> Vec<LoopSummary<T>> {
    let tol = T::lit(Tolerances::DEFAULT.self_intersection);
    let parts = split_self_intersections(lp, tol);
    let split = parts.len() > 1;
    let mut total = T::zero();
    parts
        .iter()
        .map(|p| {
            let mut s = summarize(p);
            total = total + s.gamma_b;
            s.gamma_total = total;
            s.subloop = split;
            s
        })
        .collect()
}

/// Planar isoperimetric quotient of the regular `N`-gon, `(N/π) tan(π/N)`.
pub fn regular_polygon_quotient<T: Real>(sides: usize) -> Result<T> {
    if sides < 3 {
        return Err(QgError::OutOfRange(format!("polygon needs ≥ 3 sides, got {sides}")));
    }
    let n = T::from_count(sides);
    Ok(n / T::PI() * (T::PI() / n).tan())
}

/// Perimeter and enclosed area of the regular geodesic `N`-gon whose
/// vertices sit at polar angle `theta` on a sphere of radius `R`.
pub fn spherical_polygon_closed_form<T: Real>(sides: usize, theta: T, radius: T) -> Result<(T, T)> {
    if sides < 3 {
        return Err(QgError::OutOfRange(format!("polygon needs ≥ 3 sides, got {sides}")));
    }
    if !(theta > T::zero() && theta < T::PI()) || !(radius > T::zero()) {
        return Err(QgError::OutOfRange(format!("need θ in (0, π) and R > 0, got {theta}, {radius}")));
    }
    let alpha = T::lit(2.0) * T::PI() / T::from_count(sides);
    let (st, ct) = theta.sin_cos();
    // side length from the spherical law of cosines
    let cos_c = ct * ct + st * st * alpha.cos();
    let chord = T::lit(2.0) * st * (alpha / T::lit(2.0)).sin();
    let side = T::lit(2.0) * (chord / T::lit(2.0)).min(T::one()).asin();
    debug_assert!((side.cos() - cos_c).abs() < T::tol(1e-9));
    // excess of the pole triangle with two sides θ and apex angle α
    let t2 = (theta / T::lit(2.0)).tan().powi(2);
    let excess = T::lit(2.0) * (t2 * alpha.sin()).atan2(T::one() + t2 * alpha.cos());
    let perimeter = T::from_count(sides) * side * radius;
    let area = T::from_count(sides) * excess * radius * radius;
    Ok((perimeter, area))
}
