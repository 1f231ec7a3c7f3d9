//! Weakly nonlinear dispersive (Boussinesq) model over the moving bottom.

use crate::error::{Error, Result};
use crate::model::{FluidState, Grid1D, Regime, SolidState};
use crate::problem::Problem;
use crate::solid::{solid_rhs_with, ClosureKind};
use crate::spectral::Spectral;
use crate::stencil::ddx;
use crate::stepper::{self, CoupledModel, Tendency};
use crate::sv::transport_rhs;

/// The operator `1 - (mu/3) d^2/dx^2`, diagonal in Fourier space.
#[derive(Debug, Clone)]
pub struct DispersiveOperator {
    mu: f64,
    spectral: Spectral,
}

impl DispersiveOperator {
    pub fn new(grid: &Grid1D, mu: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: format!("must be finite and >= 0, got {mu}"),
            });
        }
        Ok(Self {
            mu,
            spectral: Spectral::new(grid),
        })
    }

    pub fn symbol(&self, k: f64) -> f64 {
        1.0 + self.mu * k * k / 3.0
    }

    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.spectral.grid().check_len(u)?;
        if self.mu == 0.0 {
            return Ok(u.to_vec());
        }
        Ok(self.spectral.apply_multiplier(u, |k| self.symbol(k)))
    }

    /// Solves `(1 - (mu/3) d^2/dx^2) w = rhs`.
    pub fn helmholtz_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.spectral.grid().check_len(rhs)?;
        if self.mu == 0.0 {
            return Ok(rhs.to_vec());
        }
        Ok(self.spectral.apply_multiplier(rhs, |k| 1.0 / self.symbol(k)))
    }
}

/// Boussinesq fluid coupled to the solid.
#[derive(Debug, Clone)]
pub struct BousSolver {
    problem: Problem,
    op: DispersiveOperator,
    closure: ClosureKind,
}

impl BousSolver {
    /// Fails unless `eps <= mu` and the closure is one of the Boussinesq ones.
    pub fn new(problem: Problem, closure: ClosureKind) -> Result<Self> {
        problem.params.check_regime(Regime::Boussinesq)?;
        if closure == ClosureKind::HydrostaticSv {
            return Err(Error::InvalidParameter {
                name: "closure",
                reason: "the Boussinesq model needs a Boussinesq closure".into(),
            });
        }
        Self::new_unchecked(problem, closure)
    }

    /// Skips the regime guard so formal limits (e.g. `mu = 0`) can be probed.
    #[doc(hidden)]
    pub fn new_unchecked(problem: Problem, closure: ClosureKind) -> Result<Self> {
        let op = DispersiveOperator::new(&problem.grid, problem.params.mu)?;
        Ok(Self { problem, op, closure })
    }

    pub fn operator(&self) -> &DispersiveOperator {
        &self.op
    }

    /// Fluid tendencies and the solid acceleration at one state.
    pub fn bous_fluid_rhs(&self, fluid: &FluidState, solid: &SolidState) -> Result<Tendency> {
        let pb = &self.problem;
        let bottom = pb.bottom_at(solid.x_s)?;
        let (dzeta, mut rhs) = transport_rhs(pb, fluid, solid, &bottom)?;
        let accel = solid_rhs_with(pb, fluid, solid, &bottom, self.closure)?;
        let mu = pb.params.mu;
        if mu != 0.0 {
            // second time derivative of the bottom, with the acceleration of this stage
            let v2 = solid.v_s * solid.v_s;
            let btt: Vec<f64> = bottom
                .d2b
                .iter()
                .zip(&bottom.db)
                .map(|(d2, d1)| d2 * v2 - d1 * accel)
                .collect();
            for (r, d) in rhs.iter_mut().zip(ddx(&btt, pb.grid.dx)) {
                *r -= 0.5 * mu * d;
            }
        }
        let dvbar = self.op.helmholtz_solve(&rhs)?;
        Ok(Tendency { dzeta, dvbar, accel })
    }
}

impl CoupledModel for BousSolver {
    fn problem(&self) -> &Problem {
        &self.problem
    }

    fn closure(&self) -> ClosureKind {
        self.closure
    }

    fn tendency(&self, fluid: &FluidState, solid: &SolidState) -> Result<Tendency> {
        self.bous_fluid_rhs(fluid, solid)
    }
}

/// One coupled RK4 step of the Boussinesq system.
pub fn step_bous(
    solver: &BousSolver,
    fluid: &FluidState,
    solid: &SolidState,
    dt: f64,
) -> Result<(FluidState, SolidState)> {
    stepper::step(solver, fluid, solid, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bathymetry::Bathymetry;
    use crate::model::{Numerics, Parameters};
    use crate::sv::SvSolver;
    use std::f64::consts::PI;

    #[test]
    fn helmholtz_inverts_apply() {
        let g = Grid1D::new(128, 30.0).unwrap();
        let op = DispersiveOperator::new(&g, 0.2).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|x| (-(x - 15.0).powi(2)).exp()).collect();
        let back = op.helmholtz_solve(&op.apply(&u).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&u) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn helmholtz_is_symmetric_and_contractive() {
        let g = Grid1D::new(64, 10.0).unwrap();
        let op = DispersiveOperator::new(&g, 0.3).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|x| (x * 0.7).sin() + (x * 2.1).cos()).collect();
        let w: Vec<f64> = g.nodes().iter().map(|x| (x * 1.3).cos() - 0.2).collect();
        let (hu, hw) = (op.helmholtz_solve(&u).unwrap(), op.helmholtz_solve(&w).unwrap());
        assert!((g.dot(&hu, &w) - g.dot(&u, &hw)).abs() < 1e-12);
        assert!(g.dot(&hu, &u) > 0.0);
        assert!(g.l2_norm(&hu) <= g.l2_norm(&u));
    }

    #[test]
    fn helmholtz_symbol_on_a_mode() {
        let length = 10.0;
        let g = Grid1D::new(64, length).unwrap();
        let mu = 0.1;
        let op = DispersiveOperator::new(&g, mu).unwrap();
        let k = 2.0 * PI * 2.0 / length;
        let u: Vec<f64> = g.nodes().iter().map(|x| (k * x).cos()).collect();
        let w = op.helmholtz_solve(&u).unwrap();
        for (a, b) in w.iter().zip(&u) {
            assert!((a - b / (1.0 + mu * k * k / 3.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn regime_guard_and_closure_choice() {
        let grid = Grid1D::new(100, 20.0).unwrap();
        let bath = Bathymetry::bump(0.2, 1.0, 10.0).unwrap();
        let params = Parameters {
            eps: 0.2,
            mu: 0.1,
            ..Parameters::default()
        };
        let pb = Problem::new(params, grid, bath, Numerics::default()).unwrap();
        assert!(matches!(
            BousSolver::new(pb, ClosureKind::HydrostaticBous),
            Err(Error::RegimeViolation { .. })
        ));
        let ok = Problem {
            params: Parameters { eps: 0.05, ..params },
            ..pb
        };
        assert!(BousSolver::new(ok, ClosureKind::HydrostaticSv).is_err());
        assert!(BousSolver::new(ok, ClosureKind::RefinedBous).is_ok());
    }

    #[test]
    fn vanishing_dispersion_recovers_saint_venant() {
        let grid = Grid1D::new(160, 20.0).unwrap();
        let bath = Bathymetry::bump(0.2, 1.0, 10.0).unwrap();
        let params = Parameters {
            eps: 1.0,
            mu: 0.0,
            c_fric: 0.0,
            ..Parameters::default()
        };
        let pb = Problem::new_unchecked(params, grid, bath, Numerics::default());
        let bous = BousSolver::new_unchecked(pb, ClosureKind::HydrostaticBous).unwrap();
        let sv = SvSolver::new(Problem {
            params: Parameters { mu: 0.1, ..params },
            ..pb
        })
        .unwrap();
        let zeta: Vec<f64> = grid.nodes().iter().map(|x| 0.1 * (x * 0.9).sin()).collect();
        let vbar: Vec<f64> = grid.nodes().iter().map(|x| 0.05 * (x * 0.6).cos()).collect();
        let fluid = FluidState::new(zeta, vbar, 0.0).unwrap();
        let solid = SolidState::initial(0.3);
        let a = bous.tendency(&fluid, &solid).unwrap();
        let b = sv.tendency(&fluid, &solid).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lake_at_rest_is_a_fixed_point() {
        let grid = Grid1D::new(128, 20.0).unwrap();
        let bath = Bathymetry::bump(0.3, 1.0, 10.0).unwrap();
        let params = Parameters {
            eps: 0.05,
            mu: 0.1,
            ..Parameters::default()
        };
        let pb = Problem::new(params, grid, bath, Numerics::default()).unwrap();
        let s = BousSolver::new(pb, ClosureKind::RefinedBous).unwrap();
        let t = s.tendency(&FluidState::rest(&grid), &SolidState::initial(0.0)).unwrap();
        assert!(t.dzeta.iter().chain(&t.dvbar).all(|v| v.abs() < 1e-15));
        assert_eq!(t.accel, 0.0);
    }
}
