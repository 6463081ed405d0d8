//! Finite-volume solver and verification diagnostics for a chemotaxis model
//! with nonlinear consumption,
//!
//!   du/dt - Lap u = -div(a(u) grad v),
//!   dv/dt - Lap v = -a(u)^s v,         s >= 1,
//!
//! on boxes with zero-flux boundaries, where a is a C² truncation of the
//! identity onto [-1, m+1] (or the identity itself for the unregularized
//! model). The crate provides the truncation and its energy primitives,
//! conservative discrete operators, an IMEX Euler integrator whose linear
//! systems are M-matrices (mass conservation and a discrete maximum
//! principle hold by construction), reference oracles, and diagnostics
//! that turn the model's qualitative properties into machine-checkable
//! monitors.
//!
//! All kernels are generic over the floating-point scalar; the `f64`
//! aliases below are what downstream binaries use.

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod ops;
pub mod oracles;
pub mod scalar;
pub mod solver;
pub mod truncation;

pub use error::{Error, Result};
pub use ops::{FluxScheme, LpNorm};
pub use scalar::Real;
pub use solver::Mode;
pub use truncation::Truncation;

/// Default scalar type for simulations.
pub type Scalar = f64;

pub type Grid64 = grid::Grid<f64>;
pub type Field64 = grid::Field<f64>;
pub type State64 = solver::State<f64>;
pub type ModelParams64 = solver::ModelParams<f64>;
pub type SchemeParams64 = solver::SchemeParams<f64>;
pub type DiagnosticsRow64 = diagnostics::DiagnosticsRow<f64>;

pub type Grid32 = grid::Grid<f32>;
pub type Field32 = grid::Field<f32>;
pub type State32 = solver::State<f32>;
