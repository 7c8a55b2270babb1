//! Numerical laboratory for the 2-D Keller-Segel chemotaxis system coupled to
//! Navier-Stokes, perturbed around Taylor-Couette flow in the annulus
//! `1 <= r <= R`.
//!
//! The angular direction is Fourier-pseudo-spectral, the radial direction uses
//! second-order finite differences on a uniform grid, and time stepping is
//! Crank-Nicolson on the linear part with Adams-Bashforth on the nonlinear
//! part. All numerics are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the double-precision configuration used by the command-line tool.

// NaN-rejecting checks are written as `!(x > 0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseflow;
pub mod diagnostics;
pub mod discretization;
pub mod dynamics;
pub mod elliptic;
mod error;
pub mod lab;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub use baseflow::{RunMode, SimParams};

pub type RadialGrid = discretization::RadialGrid<f64>;
pub type ModeField = discretization::ModeField<f64>;
pub type PhysicalField = discretization::PhysicalField<f64>;
pub type State = dynamics::State<f64>;
pub type Stepper = dynamics::Stepper<f64>;
pub type RunRecord = dynamics::RunRecord<f64>;
