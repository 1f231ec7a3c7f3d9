//! Fixed-point (Picard) iteration for the coupled Saint-Venant system: a
//! frozen-coefficient linear fluid solve alternated with the solid ODE.
//!
//! Each iterate is stored at the RK4 stage level. The fluid tendency of
//! iterate `k + 1` at a stage is the full right-hand side at the iterate-`k`
//! stage plus the frozen linear operator applied to the difference
//! `U^{k+1} - U^k`, so the fixed point of the map is exactly the trajectory of
//! the direct coupled RK4 scheme with the same step.

use crate::error::{Error, Result};
use crate::model::{depth, FluidState, SolidState};
use crate::problem::Problem;
use crate::solid::solid_rhs_sv;
use crate::stencil::{add_hyperviscosity, ddx};
use crate::stepper::{stable_dt, CoupledModel};
use crate::sv::SvSolver;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub max_iters: usize,
    /// Tolerance on the sup-in-time L² + solid-position difference.
    pub tol: f64,
    pub horizon: f64,
    /// Step size; half the stable step of the initial state when `None`.
    pub dt: Option<f64>,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            max_iters: 50,
            tol: 1e-8,
            horizon: 0.1,
            dt: None,
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: format!("must be > 0, got {}", self.tol),
            });
        }
        if self.max_iters < 2 {
            return Err(Error::InvalidParameter {
                name: "max_iters",
                reason: format!("must be >= 2, got {}", self.max_iters),
            });
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "horizon",
                reason: format!("must be finite and > 0, got {}", self.horizon),
            });
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "dt",
                    reason: format!("must be finite and > 0, got {dt}"),
                });
            }
        }
        Ok(())
    }
}

/// Converged trajectory at the step times, with the iteration history.
#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub fluid: Vec<FluidState>,
    pub solid: Vec<SolidState>,
    pub iterations: usize,
    /// Successive-difference norms, one per map application.
    pub differences: Vec<f64>,
    pub dt: f64,
}

impl PicardOutcome {
    /// Largest ratio of consecutive differences (0 with fewer than two).
    pub fn max_ratio(&self) -> f64 {
        self.differences
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .fold(0.0, f64::max)
    }
}

type Stage = (FluidState, SolidState);

struct Iterate {
    nodes: Vec<Stage>,
    stages: Vec<[Stage; 4]>,
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a - b).collect()
}

/// `N(U^k) - A(U^k) D(delta) - hyper(delta)` with `delta = U^{k+1} - U^k`.
fn frozen_tendency(solver: &SvSolver, old: &Stage, new_fluid: &FluidState) -> Result<(Vec<f64>, Vec<f64>)> {
    let pb = solver.problem();
    let (fluid, solid) = old;
    let full = solver.tendency(fluid, solid)?;
    let b = pb.bath.eval_b(solid.x_s, &pb.grid, 0)?;
    let h = depth(&fluid.zeta, &b, &pb.params)?;
    let eps = pb.params.eps;
    let dz = sub(&new_fluid.zeta, &fluid.zeta);
    let dv = sub(&new_fluid.vbar, &fluid.vbar);
    let (ddz, ddv) = (ddx(&dz, pb.grid.dx), ddx(&dv, pb.grid.dx));
    let mut kz = full.dzeta;
    let mut kv = full.dvbar;
    for i in 0..pb.grid.n {
        let u = eps * fluid.vbar[i];
        kz[i] -= u * ddz[i] + h[i] * ddv[i];
        kv[i] -= ddz[i] + u * ddv[i];
    }
    add_hyperviscosity(&mut kz, &dz, pb.numerics.nu4, pb.grid.dx);
    add_hyperviscosity(&mut kv, &dv, pb.numerics.nu4, pb.grid.dx);
    Ok((kz, kv))
}

fn advance(
    solver: &SvSolver,
    old: &[Stage; 4],
    start: &Stage,
    dt: f64,
) -> Result<(Stage, [Stage; 4])> {
    let pb = solver.problem();
    let (f0, s0) = start;
    let offsets = [0.0, 0.5 * dt, 0.5 * dt, dt];
    let mut stages: Vec<Stage> = Vec::with_capacity(4);
    let mut kz: Vec<Vec<f64>> = Vec::with_capacity(4);
    let mut kv: Vec<Vec<f64>> = Vec::with_capacity(4);
    let mut vel = [0.0; 4];
    let mut acc = [0.0; 4];
    for j in 0..4 {
        let c = offsets[j];
        let stage = if j == 0 {
            (f0.clone(), *s0)
        } else {
            let zeta = f0.zeta.iter().zip(&kz[j - 1]).map(|(z, k)| z + c * k).collect();
            let vbar = f0.vbar.iter().zip(&kv[j - 1]).map(|(v, k)| v + c * k).collect();
            (
                FluidState {
                    zeta,
                    vbar,
                    time: f0.time + c,
                },
                SolidState {
                    x_s: s0.x_s + c * vel[j - 1],
                    v_s: s0.v_s + c * acc[j - 1],
                    a_s: acc[j - 1],
                },
            )
        };
        let (z, v) = frozen_tendency(solver, &old[j], &stage.0)?;
        vel[j] = stage.1.v_s;
        acc[j] = solid_rhs_sv(pb, &stage.0, &stage.1)?;
        kz.push(z);
        kv.push(v);
        stages.push(stage);
    }
    let w = dt / 6.0;
    let combine = |base: &[f64], k: &[Vec<f64>]| -> Vec<f64> {
        (0..base.len())
            .map(|i| base[i] + w * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]))
            .collect()
    };
    let fluid = FluidState {
        zeta: combine(&f0.zeta, &kz),
        vbar: combine(&f0.vbar, &kv),
        time: f0.time + dt,
    };
    let solid = SolidState {
        x_s: s0.x_s + w * (vel[0] + 2.0 * vel[1] + 2.0 * vel[2] + vel[3]),
        v_s: s0.v_s + w * (acc[0] + 2.0 * acc[1] + 2.0 * acc[2] + acc[3]),
        a_s: acc[3],
    };
    if !fluid.is_finite() || !solid.is_finite() {
        return Err(Error::NonFiniteState { what: "Picard iterate" });
    }
    let stages: [Stage; 4] = stages.try_into().expect("four stages");
    Ok(((fluid, solid), stages))
}

fn difference(pb: &Problem, a: &Iterate, b: &Iterate) -> f64 {
    let mut fluid: f64 = 0.0;
    let mut position: f64 = 0.0;
    for ((fa, sa), (fb, sb)) in a.nodes.iter().zip(&b.nodes) {
        let dz = sub(&fa.zeta, &fb.zeta);
        let dv = sub(&fa.vbar, &fb.vbar);
        let l2 = (pb.grid.dot(&dz, &dz) + pb.grid.dot(&dv, &dv)).sqrt();
        fluid = fluid.max(l2);
        position = position.max((sa.x_s - sb.x_s).abs());
    }
    fluid + position
}

/// Runs the iteration from the constant-in-time iterate until successive
/// iterates differ by less than `cfg.tol`.
pub fn picard_iterate(
    solver: &SvSolver,
    initial: (&FluidState, &SolidState),
    cfg: &PicardConfig,
) -> Result<PicardOutcome> {
    cfg.validate()?;
    let pb = solver.problem();
    let (f0, s0) = initial;
    pb.grid.check_len(&f0.zeta)?;
    pb.grid.check_len(&f0.vbar)?;
    let dt_max = match cfg.dt {
        Some(dt) => dt,
        None => 0.5 * stable_dt(solver, f0, s0)?,
    };
    let steps = (cfg.horizon / dt_max).ceil().max(1.0) as usize;
    let dt = cfg.horizon / steps as f64;

    let start: Stage = (f0.clone(), *s0);
    let mut current = Iterate {
        nodes: vec![start.clone(); steps + 1],
        stages: vec![[start.clone(), start.clone(), start.clone(), start.clone()]; steps],
    };
    for (n, node) in current.nodes.iter_mut().enumerate() {
        node.0.time = f0.time + n as f64 * dt;
    }

    let mut differences = Vec::new();
    let mut rising = 0usize;
    for iteration in 1..=cfg.max_iters {
        let mut nodes = Vec::with_capacity(steps + 1);
        let mut stages = Vec::with_capacity(steps);
        nodes.push(start.clone());
        for n in 0..steps {
            let (next, st) = advance(solver, &current.stages[n], &nodes[n], dt)?;
            nodes.push(next);
            stages.push(st);
        }
        let next = Iterate { nodes, stages };
        let d = difference(pb, &next, &current);
        if let Some(&prev) = differences.last() {
            let ratio = if prev > 0.0 { d / prev } else { f64::INFINITY };
            if ratio > 1.0 {
                rising += 1;
                if rising >= 2 {
                    return Err(Error::NoContraction { iteration, ratio });
                }
            } else {
                rising = 0;
            }
        }
        differences.push(d);
        current = next;
        if d < cfg.tol {
            let (fluid, solid) = current.nodes.into_iter().unzip();
            return Ok(PicardOutcome {
                fluid,
                solid,
                iterations: iteration,
                differences,
                dt,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iters,
        last_diff: differences.last().copied().unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bathymetry::Bathymetry;
    use crate::model::{Grid1D, Numerics, Parameters};
    use crate::stepper;

    fn solver() -> SvSolver {
        let params = Parameters {
            eps: 1.0,
            mu: 0.1,
            c_fric: 0.1,
            m_tilde: 2.0,
            ..Parameters::default()
        };
        let grid = Grid1D::new(64, 16.0).unwrap();
        let bath = Bathymetry::bump(0.2, 1.5, 8.0).unwrap();
        SvSolver::new(Problem::new(params, grid, bath, Numerics::default()).unwrap()).unwrap()
    }

    #[test]
    fn rest_converges_in_one_iteration() {
        let s = solver();
        let rest = FluidState::rest(&s.problem().grid);
        let out = picard_iterate(&s, (&rest, &SolidState::initial(0.0)), &PicardConfig::default()).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.fluid.iter().all(|f| f.sup_norm() == 0.0));
    }

    #[test]
    fn fixed_point_is_the_direct_scheme() {
        let s = solver();
        let grid = s.problem().grid;
        let zeta: Vec<f64> = grid.nodes().iter().map(|x| 0.05 * (-(x - 6.0).powi(2)).exp()).collect();
        let fluid = FluidState::new(zeta, vec![0.0; grid.n], 0.0).unwrap();
        let solid = SolidState::initial(0.1);
        let cfg = PicardConfig {
            tol: 1e-11,
            horizon: 0.2,
            ..PicardConfig::default()
        };
        let out = picard_iterate(&s, (&fluid, &solid), &cfg).unwrap();
        assert!(out.max_ratio() < 1.0);
        let (mut f, mut sd) = (fluid, solid);
        for n in 1..out.fluid.len() {
            let (nf, ns) = stepper::step(&s, &f, &sd, out.dt).unwrap();
            f = nf;
            sd = ns;
            let err = grid.l2_norm(&sub(&f.zeta, &out.fluid[n].zeta));
            assert!(err < 1e-10, "step {n}: {err}");
            assert!((sd.x_s - out.solid[n].x_s).abs() < 1e-10);
        }
    }

    #[test]
    fn config_is_validated() {
        let s = solver();
        let rest = FluidState::rest(&s.problem().grid);
        let bad = PicardConfig {
            max_iters: 1,
            ..PicardConfig::default()
        };
        assert!(picard_iterate(&s, (&rest, &SolidState::initial(0.0)), &bad).is_err());
    }
}
