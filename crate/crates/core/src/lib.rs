//! Supermartingale shadow measures and the decreasing supermartingale
//! coupling for finitely supported measures on the real line.
//!
//! Everything is exact up to floating point: potentials are piecewise linear,
//! shadows come from convex hulls and lifted couplings are built by an
//! event-driven engine with finitely many events.

pub mod coupling;
pub mod dilation;
pub mod error;
pub mod experiments;
pub mod json;
pub mod measures;
pub mod pwl;
pub mod shadow;
pub mod tol;
pub mod verify;

pub use coupling::{
    irreducible_decompose, lifted_shadow_coupling, make_lift, pi_decreasing, project, rs_at,
    CCurve, DiscreteCoupling, LiftKind, LiftSpec, LiftedCoupling, PiDecreasing,
};
pub use dilation::{dilate, hitting_coupling, hitting_projection, TargetSet, TwoPointKernel};
pub use error::{Error, Result};
pub use measures::{order_check, Atom, DiscreteMeasure, OrderRelation, Side, UpDown};
pub use pwl::PiecewiseLinear;
pub use shadow::{defect_constant, leftmost, shadow, ShadowResult};
pub use tol::Tolerances;
