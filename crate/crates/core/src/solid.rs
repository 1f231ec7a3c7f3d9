//! Newton's equation for the solid: regularized Coulomb friction, the
//! pressure-force closures of each asymptotic order and the RK4 integrator
//! for the solid alone.

use crate::bathymetry::Bathymetry;
use crate::error::{Error, Result};
use crate::model::{FluidState, Parameters, SolidState};
use crate::problem::{BottomSamples, Problem};
use crate::stencil;

/// Constants entering the friction bracket, and the added mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidConstants {
    /// Saint-Venant constant `1 + |supp|/M (p_atm + 1) - volume/M`.
    pub c_solid: f64,
    /// Boussinesq constant `eps + |supp|/M (p_atm + 1) - eps volume/M`.
    pub c_tilde_solid: f64,
    /// `eps mu ∫ (b')^2 dx`.
    pub added_mass: f64,
}

impl SolidConstants {
    pub fn new(bath: &Bathymetry, params: &Parameters) -> Self {
        let m = params.m_tilde;
        let pressure_load = bath.support_measure / m * (params.p_atm + 1.0);
        Self {
            c_solid: 1.0 + pressure_load - bath.volume / m,
            c_tilde_solid: params.eps + pressure_load - params.eps * bath.volume / m,
            added_mass: added_mass_matrix(bath, params),
        }
    }
}

/// Which bottom-pressure closure drives the solid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureKind {
    /// Hydrostatic pressure, Saint-Venant scaling (`eps = 1`).
    HydrostaticSv,
    /// Hydrostatic pressure with the Boussinesq `eps` scaling.
    HydrostaticBous,
    /// Adds the `mu/(2M) ∫ Δζ` correction to the friction bracket.
    RefinedBous,
}

/// `z / (|z| + delta_bar)`.
#[inline]
pub fn friction_factor(z: f64, delta_bar: f64) -> f64 {
    z / (z.abs() + delta_bar)
}

/// Friction acceleration `-(c_fric / sqrt(mu)) * bracket * z / (|z| + delta_bar)`.
fn friction_accel(params: &Parameters, bracket: f64, v: f64) -> f64 {
    let ff = friction_factor(v, params.delta_bar);
    if params.c_fric == 0.0 || ff == 0.0 {
        return 0.0;
    }
    -(params.c_fric / params.mu.sqrt()) * bracket * ff
}

/// `∫ ζ b'(x - X_S) dx` with the mean-free slope samples.
fn pressure_moment(problem: &Problem, zeta: &[f64], bottom: &BottomSamples) -> f64 {
    problem.grid.dot(zeta, &bottom.db_balanced)
}

/// The bracket multiplying the friction factor (normal force over mass).
pub(crate) fn friction_bracket(
    problem: &Problem,
    fluid: &FluidState,
    solid: &SolidState,
    closure: ClosureKind,
) -> Result<f64> {
    let p = &problem.params;
    let grid = &problem.grid;
    let over_support = problem
        .bath
        .integrate_over_support(&fluid.zeta, solid.x_s, grid)?;
    let bracket = match closure {
        ClosureKind::HydrostaticSv => problem.consts.c_solid + over_support / p.m_tilde,
        ClosureKind::HydrostaticBous => problem.consts.c_tilde_solid / p.eps + over_support / p.m_tilde,
        ClosureKind::RefinedBous => {
            if p.eps > p.mu {
                return Err(Error::RegimeViolation { eps: p.eps, mu: p.mu });
            }
            let lap = stencil::d2dx2(&fluid.zeta, grid.dx);
            let lap_support = problem.bath.integrate_over_support(&lap, solid.x_s, grid)?;
            problem.consts.c_tilde_solid / p.eps
                + over_support / p.m_tilde
                + p.mu / (2.0 * p.m_tilde) * lap_support
        }
    };
    Ok(bracket)
}

pub(crate) fn solid_rhs_with(
    problem: &Problem,
    fluid: &FluidState,
    solid: &SolidState,
    bottom: &BottomSamples,
    closure: ClosureKind,
) -> Result<f64> {
    let p = &problem.params;
    let bracket = friction_bracket(problem, fluid, solid, closure)?;
    let pressure_scale = match closure {
        ClosureKind::HydrostaticSv => 1.0,
        ClosureKind::HydrostaticBous | ClosureKind::RefinedBous => p.eps,
    };
    let accel = friction_accel(p, bracket, solid.v_s)
        + pressure_scale / p.m_tilde * pressure_moment(problem, &fluid.zeta, bottom);
    if !accel.is_finite() {
        return Err(Error::NonFiniteState { what: "solid acceleration" });
    }
    Ok(accel)
}

/// Solid acceleration under the hydrostatic Saint-Venant closure.
pub fn solid_rhs_sv(problem: &Problem, fluid: &FluidState, solid: &SolidState) -> Result<f64> {
    problem.grid.check_len(&fluid.zeta)?;
    let bottom = problem.bottom_at(solid.x_s)?;
    solid_rhs_with(problem, fluid, solid, &bottom, ClosureKind::HydrostaticSv)
}

/// Solid acceleration in the Boussinesq scaling.
pub fn solid_rhs_bous(
    problem: &Problem,
    fluid: &FluidState,
    solid: &SolidState,
    closure: ClosureKind,
) -> Result<f64> {
    problem.grid.check_len(&fluid.zeta)?;
    let bottom = problem.bottom_at(solid.x_s)?;
    solid_rhs_with(problem, fluid, solid, &bottom, closure)
}

/// Scalar added mass `eps mu ∫ (b')^2 dx` (positive semi-definite).
pub fn added_mass_matrix(bath: &Bathymetry, params: &Parameters) -> f64 {
    params.eps * params.mu * bath.derivative_l2_sq(1)
}

/// Stiffness of the friction term near rest, `c_fric / sqrt(mu) * |bracket| / delta_bar`.
pub(crate) fn friction_stiffness(params: &Parameters, bracket: f64) -> f64 {
    if params.c_fric == 0.0 {
        return 0.0;
    }
    params.c_fric / params.mu.sqrt() * bracket.abs() / params.delta_bar
}

/// One classical RK4 step of `x' = v, v' = rhs(x, v)`; caches the last
/// evaluated acceleration.
pub fn step_solid<F>(solid: &SolidState, mut rhs: F, dt: f64) -> Result<SolidState>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be > 0, got {dt}"),
        });
    }
    let (x0, v0) = (solid.x_s, solid.v_s);
    let check = |x: f64, v: f64, a: f64| {
        if x.is_finite() && v.is_finite() && a.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFiniteState { what: "solid stage" })
        }
    };
    let a1 = rhs(x0, v0)?;
    check(x0, v0, a1)?;
    let (x2, v2) = (x0 + 0.5 * dt * v0, v0 + 0.5 * dt * a1);
    let a2 = rhs(x2, v2)?;
    check(x2, v2, a2)?;
    let (x3, v3) = (x0 + 0.5 * dt * v2, v0 + 0.5 * dt * a2);
    let a3 = rhs(x3, v3)?;
    check(x3, v3, a3)?;
    let (x4, v4) = (x0 + dt * v3, v0 + dt * a3);
    let a4 = rhs(x4, v4)?;
    check(x4, v4, a4)?;
    let next = SolidState {
        x_s: x0 + dt / 6.0 * (v0 + 2.0 * v2 + 2.0 * v3 + v4),
        v_s: v0 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        a_s: a4,
    };
    check(next.x_s, next.v_s, next.a_s)?;
    Ok(next)
}
