//! Numerical thresholds used throughout the crate.
//!
//! Every routine reads its default from [`Tolerances::DEFAULT`]; the
//! acceptance suite asserts against the same record.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed `|‖ψ‖ − 1|` for a state vector.
    pub norm: f64,
    /// Norms at or below this are treated as the zero vector.
    pub zero_norm: f64,
    /// Allowed `max |H − H†|`, relative to `max(1, ‖H‖)`.
    pub hermitian: f64,
    /// Eigen-decomposition residual, relative to `‖H‖`.
    pub eigen_residual: f64,
    /// Band gap below `degeneracy · ‖H‖` makes band selection ill-posed.
    pub degeneracy: f64,
    /// An amplitude must exceed this to anchor the projective gauge.
    pub gauge_nonzero: f64,
    /// Projective equality: `|⟨a|b⟩| ≥ 1 − projective_eq`.
    pub projective_eq: f64,
    /// Minimum `|⟨ψⱼ|ψⱼ₊₁⟩|` along a loop.
    pub segment_overlap: f64,
    /// Berry phases within this of `−π` are reported as `+π`.
    pub branch_snap: f64,
    /// Default central-difference step for the geometric tensor.
    pub fd_step: f64,
    /// Projective coincidence threshold for loop splitting.
    pub self_intersection: f64,
    /// Floor of the discretisation-aware saturation tolerance.
    pub saturation_floor: f64,
    /// Multiplier on the convergence estimate in the saturation tolerance.
    pub saturation_factor: f64,
    /// Bloch vectors this close to the reference pole (or its antipode)
    /// force a new reference for the solid-angle sum.
    pub pole: f64,
    /// Per-step norm drift tolerated by the Schrödinger integrator.
    pub norm_drift: f64,
    /// Projective end-point distance below which a trajectory is cyclic.
    pub cyclic: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        norm: 1e-12,
        zero_norm: 1e-300,
        hermitian: 1e-12,
        eigen_residual: 1e-10,
        degeneracy: 1e-9,
        gauge_nonzero: 1e-10,
        projective_eq: 1e-12,
        segment_overlap: 1e-9,
        branch_snap: 1e-9,
        fd_step: 1e-4,
        self_intersection: 1e-7,
        saturation_floor: 1e-6,
        saturation_factor: 10.0,
        pole: 1e-8,
        norm_drift: 1e-6,
        cyclic: 1e-4,
    };

    /// Saturation tolerance for a loop whose values moved by
    /// `convergence_est` between resolutions `n/2` and `n`.
    pub fn saturation(&self, convergence_est: f64) -> f64 {
        if convergence_est.is_finite() {
            self.saturation_floor.max(self.saturation_factor * convergence_est)
        } else {
            self.saturation_floor
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
