//! Joint explicit RK4 for the fluid fields and the solid, time-step control
//! and the integration loop.

use crate::error::{Error, Result};
use crate::model::{depth, FluidState, SolidState};
use crate::problem::Problem;
use crate::solid::{friction_bracket, friction_stiffness, ClosureKind};
use crate::stencil::max_abs_gradient;

/// Time derivatives of `(zeta, vbar, v_s)`; the solid position moves with `v_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub dzeta: Vec<f64>,
    pub dvbar: Vec<f64>,
    pub accel: f64,
}

/// A fluid model coupled to the solid.
pub trait CoupledModel {
    fn problem(&self) -> &Problem;
    fn closure(&self) -> ClosureKind;
    fn tendency(&self, fluid: &FluidState, solid: &SolidState) -> Result<Tendency>;
}

/// Largest RK4 step (relative to the friction rate) that stays in the real
/// stability interval with some margin.
const FRICTION_STABILITY: f64 = 2.5;

/// `max |eps V| + sqrt(h)` over the grid.
pub fn max_wave_speed(problem: &Problem, fluid: &FluidState, solid: &SolidState) -> Result<f64> {
    let b = problem.bath.eval_b(solid.x_s, &problem.grid, 0)?;
    let h = depth(&fluid.zeta, &b, &problem.params)?;
    Ok(h.iter()
        .zip(&fluid.vbar)
        .map(|(h, v)| (problem.params.eps * v).abs() + h.sqrt())
        .fold(0.0, f64::max))
}

/// Largest admissible step: advective CFL and friction stiffness.
pub fn stable_dt<M: CoupledModel + ?Sized>(model: &M, fluid: &FluidState, solid: &SolidState) -> Result<f64> {
    let problem = model.problem();
    let speed = max_wave_speed(problem, fluid, solid)?;
    let mut limit = problem.numerics.cfl * problem.grid.dx / speed;
    let bracket = friction_bracket(problem, fluid, solid, model.closure())?;
    let rate = friction_stiffness(&problem.params, bracket);
    if rate > 0.0 {
        limit = limit.min(FRICTION_STABILITY / rate);
    }
    if !(limit.is_finite() && limit > 0.0) {
        return Err(Error::NonFiniteState { what: "time-step limit" });
    }
    Ok(limit)
}

fn axpy(base: &[f64], k: &[f64], c: f64) -> Vec<f64> {
    base.iter().zip(k).map(|(b, k)| b + c * k).collect()
}

fn stage_state(fluid: &FluidState, solid: &SolidState, k: &Tendency, v: f64, c: f64) -> (FluidState, SolidState) {
    (
        FluidState {
            zeta: axpy(&fluid.zeta, &k.dzeta, c),
            vbar: axpy(&fluid.vbar, &k.dvbar, c),
            time: fluid.time + c,
        },
        SolidState {
            x_s: solid.x_s + c * v,
            v_s: solid.v_s + c * k.accel,
            a_s: k.accel,
        },
    )
}

/// The four RK4 stage states of one step (stage `j` is the state at which
/// the `j`-th tendency is evaluated) together with those tendencies.
pub(crate) struct Stages {
    pub states: Vec<(FluidState, SolidState)>,
    pub tendencies: Vec<Tendency>,
}

/// Classical RK4 without any step-size or smoothness checks.
pub(crate) fn rk4<M: CoupledModel + ?Sized>(
    model: &M,
    fluid: &FluidState,
    solid: &SolidState,
    dt: f64,
    record: Option<&mut Stages>,
) -> Result<(FluidState, SolidState)> {
    let k1 = model.tendency(fluid, solid)?;
    let v1 = solid.v_s;
    let (f2, s2) = stage_state(fluid, solid, &k1, v1, 0.5 * dt);
    let k2 = model.tendency(&f2, &s2)?;
    let v2 = s2.v_s;
    let (f3, s3) = stage_state(fluid, solid, &k2, v2, 0.5 * dt);
    let k3 = model.tendency(&f3, &s3)?;
    let v3 = s3.v_s;
    let (f4, s4) = stage_state(fluid, solid, &k3, v3, dt);
    let k4 = model.tendency(&f4, &s4)?;
    let v4 = s4.v_s;

    let w = dt / 6.0;
    let combine = |base: &[f64], pick: fn(&Tendency) -> &[f64]| -> Vec<f64> {
        let (a, b, c, d) = (pick(&k1), pick(&k2), pick(&k3), pick(&k4));
        (0..base.len())
            .map(|i| base[i] + w * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
            .collect()
    };
    let next_fluid = FluidState {
        zeta: combine(&fluid.zeta, |k| &k.dzeta),
        vbar: combine(&fluid.vbar, |k| &k.dvbar),
        time: fluid.time + dt,
    };
    let next_solid = SolidState {
        x_s: solid.x_s + w * (v1 + 2.0 * v2 + 2.0 * v3 + v4),
        v_s: solid.v_s + w * (k1.accel + 2.0 * k2.accel + 2.0 * k3.accel + k4.accel),
        a_s: k4.accel,
    };
    if let Some(rec) = record {
        rec.states = vec![(fluid.clone(), *solid), (f2, s2), (f3, s3), (f4, s4)];
        rec.tendencies = vec![k1, k2, k3, k4];
    }
    Ok((next_fluid, next_solid))
}

/// Rejects steps that left the smooth, finite regime.
pub(crate) fn check_state(problem: &Problem, fluid: &FluidState, solid: &SolidState) -> Result<()> {
    if !fluid.is_finite() {
        return Err(Error::NonFiniteState { what: "fluid state" });
    }
    if !solid.is_finite() {
        return Err(Error::NonFiniteState { what: "solid state" });
    }
    let limit = problem.numerics.gradient_limit;
    let gradient = max_abs_gradient(&fluid.zeta, problem.grid.dx).max(max_abs_gradient(&fluid.vbar, problem.grid.dx));
    if gradient > limit {
        return Err(Error::SmoothnessLost {
            gradient,
            limit,
            time: fluid.time,
        });
    }
    Ok(())
}

/// One checked coupled RK4 step.
pub fn step<M: CoupledModel + ?Sized>(
    model: &M,
    fluid: &FluidState,
    solid: &SolidState,
    dt: f64,
) -> Result<(FluidState, SolidState)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be finite and > 0, got {dt}"),
        });
    }
    let limit = stable_dt(model, fluid, solid)?;
    if dt > limit * (1.0 + 1e-9) {
        return Err(Error::CflViolation { dt, limit });
    }
    let (f, s) = rk4(model, fluid, solid, dt, None)?;
    check_state(model.problem(), &f, &s)?;
    Ok((f, s))
}

/// Integrates to `horizon`, landing exactly on every multiple of
/// `output_interval`; `observe` sees the initial state and each output.
pub fn integrate<M, F>(
    model: &M,
    fluid: FluidState,
    solid: SolidState,
    horizon: f64,
    output_interval: f64,
    mut observe: F,
) -> Result<(FluidState, SolidState)>
where
    M: CoupledModel + ?Sized,
    F: FnMut(&FluidState, &SolidState) -> Result<()>,
{
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "horizon",
            reason: format!("must be finite and >= 0, got {horizon}"),
        });
    }
    if !(output_interval > 0.0) {
        return Err(Error::InvalidParameter {
            name: "output_interval",
            reason: format!("must be > 0, got {output_interval}"),
        });
    }
    let t0 = fluid.time;
    let (mut fluid, mut solid) = (fluid, solid);
    // seed the cached acceleration so the first output is consistent
    solid.a_s = model.tendency(&fluid, &solid)?.accel;
    observe(&fluid, &solid)?;
    let mut next_output = 1usize;
    let end = t0 + horizon;
    let tiny = 1e-12 * horizon.max(1.0);
    while fluid.time < end - tiny {
        let target = (t0 + next_output as f64 * output_interval).min(end);
        let remaining = target - fluid.time;
        let dt = stable_dt(model, &fluid, &solid)?.min(remaining);
        let (f, s) = step(model, &fluid, &solid, dt)?;
        fluid = f;
        solid = s;
        if fluid.time >= target - tiny {
            fluid.time = target;
            observe(&fluid, &solid)?;
            next_output += 1;
        }
    }
    Ok((fluid, solid))
}

/// `steps` checked steps of fixed size `dt`; `observe` runs after each one.
pub fn integrate_fixed<M, F>(
    model: &M,
    fluid: FluidState,
    solid: SolidState,
    dt: f64,
    steps: usize,
    mut observe: F,
) -> Result<(FluidState, SolidState)>
where
    M: CoupledModel + ?Sized,
    F: FnMut(&FluidState, &SolidState) -> Result<()>,
{
    let (mut fluid, mut solid) = (fluid, solid);
    for _ in 0..steps {
        let (f, s) = step(model, &fluid, &solid, dt)?;
        fluid = f;
        solid = s;
        observe(&fluid, &solid)?;
    }
    Ok((fluid, solid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bathymetry::Bathymetry;
    use crate::model::{Grid1D, Numerics, Parameters};
    use crate::sv::SvSolver;

    fn solver(c_fric: f64) -> SvSolver {
        let params = Parameters {
            eps: 1.0,
            mu: 0.1,
            c_fric,
            ..Parameters::default()
        };
        let grid = Grid1D::new(200, 20.0).unwrap();
        let bath = Bathymetry::bump(0.2, 1.0, 10.0).unwrap();
        SvSolver::new(Problem::new(params, grid, bath, Numerics::default()).unwrap()).unwrap()
    }

    #[test]
    fn oversized_step_is_rejected() {
        let s = solver(0.0);
        let fluid = FluidState::rest(&s.problem().grid);
        let solid = SolidState::initial(0.0);
        let limit = stable_dt(&s, &fluid, &solid).unwrap();
        assert!((limit - 0.4 * 0.1).abs() < 1e-12);
        assert!(matches!(step(&s, &fluid, &solid, 2.0 * limit), Err(Error::CflViolation { .. })));
        assert!(step(&s, &fluid, &solid, limit).is_ok());
    }

    #[test]
    fn friction_limits_the_step_near_rest() {
        let s = solver(0.5);
        let fluid = FluidState::rest(&s.problem().grid);
        let limit = stable_dt(&s, &fluid, &SolidState::initial(0.0)).unwrap();
        assert!(limit < 0.04);
    }

    #[test]
    fn outputs_land_on_the_requested_times() {
        let s = solver(0.1);
        let fluid = FluidState::rest(&s.problem().grid);
        let mut times = Vec::new();
        integrate(&s, fluid, SolidState::initial(0.2), 1.0, 0.25, |f, _| {
            times.push(f.time);
            Ok(())
        })
        .unwrap();
        assert_eq!(times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn rough_state_is_flagged() {
        let mut s = solver(0.0);
        s = SvSolver::new(Problem {
            numerics: Numerics {
                gradient_limit: 1.0,
                ..Numerics::default()
            },
            ..*s.problem()
        })
        .unwrap();
        let grid = s.problem().grid;
        let zeta: Vec<f64> = (0..grid.n).map(|i| if i == 50 { 0.3 } else { 0.0 }).collect();
        let fluid = FluidState::new(zeta, vec![0.0; grid.n], 0.0).unwrap();
        let r = step(&s, &fluid, &SolidState::initial(0.0), 0.01);
        assert!(matches!(r, Err(Error::SmoothnessLost { .. })));
    }
}
