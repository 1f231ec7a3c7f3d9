//! Long-wave models (Saint-Venant and Boussinesq) coupled to a rigid solid
//! sliding on a flat bottom under regularized Coulomb friction.
//!
//! The fluid is described by the surface elevation `zeta` and the
//! depth-averaged velocity `vbar` on a periodic grid; the solid by its
//! displacement `x_s` and velocity `v_s`. Both are advanced together by an
//! explicit RK4 scheme.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bathymetry;
pub mod bous;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod picard;
pub mod problem;
pub mod solid;
pub mod spectral;
pub mod stencil;
pub mod stepper;
pub mod sv;

pub use bathymetry::Bathymetry;
pub use bous::{step_bous, BousSolver, DispersiveOperator};
pub use error::{Error, Result};
pub use model::{depth, FluidState, Grid1D, Numerics, Parameters, Regime, SolidState};
pub use problem::Problem;
pub use solid::{ClosureKind, SolidConstants};
pub use stepper::{integrate, integrate_fixed, stable_dt, step, CoupledModel, Tendency};
pub use sv::{step_sv, SvSolver};
