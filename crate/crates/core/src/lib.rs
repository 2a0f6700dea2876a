//! Quantum distance, Berry phase and the isoperimetric inequalities that
//! relate them, for closed loops of pure states.
//!
//! The numerical core is generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`); the aliases at the bottom of this
//! module fix the scalar to `f64` for everyday use.

// Range checks are written as `!(x > 0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod error;
pub mod geometry;
pub mod inequalities;
pub mod io;
pub mod linalg;
pub mod loops;
pub mod models;
pub mod scalar;
pub mod search;
pub mod state;
pub mod tolerances;

pub use applications::{
    adiabatic_cone_demo, bz_metric_integral, eph_bound_chain, evolve, rotating_field, speed_limit_report, speed_residual,
    superfluid_weight_1d, wannier_bound_chain, wannier_omega1, BoundChain, ChainEntry, ConeDemo, MetricConvention,
    SpeedLimitReport, Trajectory,
};
pub use error::{QgError, Result};
pub use geometry::{
    bloch_solid_angle, geodesic_interpolate, loop_berry_phase, loop_distance, qgt_at, segment_distance, summarize,
    Chart, Loop, LoopSummary, QGTensor,
};
pub use inequalities::{
    aggregate_subloops, plane_check, regular_polygon_quotient, sphere_check, spherical_polygon_closed_form, strong_qii,
    summarize_split, weak_qii, IneqInputs, IneqKind, IneqReport,
};
pub use linalg::{eigh, eigh_band, CMatrix, Eigen};
pub use loops::{
    bloch_circle, figure_eight, fourier_loop, great_circle, great_circle_turns, perturb_circle, random_simple_two_band,
    refine, spherical_polygon, split_self_intersections, split_self_intersections_traced, FourierLoopSpec, SplitEvent,
    SplitOutcome,
};
pub use models::{
    dirac_metric, Band, BlochFourier, FermiLoop, ModelConfig, ModelKind, ModelSpec, TabulatedModel,
};
pub use scalar::{principal_angle, Cx, Real};
pub use search::{
    extremality_scan, minimize_margin, qii_objective, qii_objective_with_tol, ModeFit, SearchConfig, SearchResult,
};
pub use state::{normalize, overlap, projector, CVector, ProjectivePoint, StateVector};
pub use tolerances::Tolerances;

pub type C64 = Cx<f64>;
pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type CMatrix64 = CMatrix<f64>;
pub type Loop64 = Loop<f64>;
pub type Loop32 = Loop<f32>;
pub type LoopSummary64 = LoopSummary<f64>;
pub type FourierLoopSpec64 = FourierLoopSpec<f64>;
pub type ModelSpec64 = ModelSpec<f64>;
pub type Trajectory64 = Trajectory<f64>;
