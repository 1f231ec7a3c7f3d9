//! Fully nonlinear shallow-water (Saint-Venant) model over the moving bottom.

use crate::error::Result;
use crate::model::{depth, FluidState, Regime, SolidState};
use crate::problem::{BottomSamples, Problem};
use crate::solid::{solid_rhs_with, ClosureKind};
use crate::stencil::{add_hyperviscosity, ddx};
use crate::stepper::{self, CoupledModel, Tendency};

pub type Mat2 = [[f64; 2]; 2];

/// Per-cell coefficients of `dU/dt + A(U) dU/dx + B(U, X, X') = 0` with the
/// symmetrizer `S` making `S A` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasilinearForm {
    pub a: Vec<Mat2>,
    pub s: Vec<Mat2>,
    pub b: Vec<[f64; 2]>,
}

impl QuasilinearForm {
    /// Largest asymmetry `|(SA)_01 - (SA)_10|` over the grid.
    pub fn symmetry_defect(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.s)
            .map(|(a, s)| {
                let sa = mul(s, a);
                (sa[0][1] - sa[1][0]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the symmetrizer over the grid.
    pub fn min_symmetrizer_eigenvalue(&self) -> f64 {
        self.s
            .iter()
            .map(|s| {
                let tr = s[0][0] + s[1][1];
                let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
                let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
                0.5 * tr - disc
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

/// Quasilinear coefficients at the current state.
pub fn assemble_quasilinear(problem: &Problem, fluid: &FluidState, solid: &SolidState) -> Result<QuasilinearForm> {
    problem.grid.check_len(&fluid.zeta)?;
    problem.grid.check_len(&fluid.vbar)?;
    let eps = problem.params.eps;
    let bottom = problem.bottom_at(solid.x_s)?;
    let h = depth(&fluid.zeta, &bottom.b, &problem.params)?;
    let n = h.len();
    let mut form = QuasilinearForm {
        a: Vec::with_capacity(n),
        s: Vec::with_capacity(n),
        b: Vec::with_capacity(n),
    };
    for i in 0..n {
        let u = eps * fluid.vbar[i];
        form.a.push([[u, h[i]], [1.0, u]]);
        form.s.push([[1.0, 0.0], [0.0, h[i]]]);
        form.b.push([(-u + solid.v_s) * bottom.db[i], 0.0]);
    }
    Ok(form)
}

/// Hydrostatic transport terms shared by both fluid models: returns
/// `(dzeta/dt, rhs of the velocity equation before any dispersive solve)`.
pub(crate) fn transport_rhs(
    problem: &Problem,
    fluid: &FluidState,
    solid: &SolidState,
    bottom: &BottomSamples,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = &problem.grid;
    grid.check_len(&fluid.zeta)?;
    grid.check_len(&fluid.vbar)?;
    let eps = problem.params.eps;
    let nu4 = problem.numerics.nu4;
    let h = depth(&fluid.zeta, &bottom.b, &problem.params)?;

    let flux: Vec<f64> = h.iter().zip(&fluid.vbar).map(|(h, v)| h * v).collect();
    let mut dzeta: Vec<f64> = ddx(&flux, grid.dx)
        .into_iter()
        .zip(&bottom.db_balanced)
        .map(|(df, db)| -df - solid.v_s * db)
        .collect();
    add_hyperviscosity(&mut dzeta, &fluid.zeta, nu4, grid.dx);

    let dz = ddx(&fluid.zeta, grid.dx);
    let dv = ddx(&fluid.vbar, grid.dx);
    let mut dvbar: Vec<f64> = (0..grid.n)
        .map(|i| -dz[i] - eps * fluid.vbar[i] * dv[i])
        .collect();
    add_hyperviscosity(&mut dvbar, &fluid.vbar, nu4, grid.dx);
    Ok((dzeta, dvbar))
}

/// Fluid tendencies `(dzeta/dt, dvbar/dt)` of the Saint-Venant model.
pub fn sv_fluid_rhs(problem: &Problem, fluid: &FluidState, solid: &SolidState) -> Result<(Vec<f64>, Vec<f64>)> {
    let bottom = problem.bottom_at(solid.x_s)?;
    transport_rhs(problem, fluid, solid, &bottom)
}

/// Saint-Venant fluid coupled to the solid through the hydrostatic closure.
#[derive(Debug, Clone)]
pub struct SvSolver {
    problem: Problem,
}

impl SvSolver {
    pub fn new(problem: Problem) -> Result<Self> {
        problem.params.check_regime(Regime::SaintVenant)?;
        Ok(Self { problem })
    }
}

impl CoupledModel for SvSolver {
    fn problem(&self) -> &Problem {
        &self.problem
    }

    fn closure(&self) -> ClosureKind {
        ClosureKind::HydrostaticSv
    }

    fn tendency(&self, fluid: &FluidState, solid: &SolidState) -> Result<Tendency> {
        let bottom = self.problem.bottom_at(solid.x_s)?;
        let (dzeta, dvbar) = transport_rhs(&self.problem, fluid, solid, &bottom)?;
        let accel = solid_rhs_with(&self.problem, fluid, solid, &bottom, ClosureKind::HydrostaticSv)?;
        Ok(Tendency { dzeta, dvbar, accel })
    }
}

/// One coupled RK4 step of the Saint-Venant system.
pub fn step_sv(solver: &SvSolver, fluid: &FluidState, solid: &SolidState, dt: f64) -> Result<(FluidState, SolidState)> {
    stepper::step(solver, fluid, solid, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bathymetry::Bathymetry;
    use crate::error::Error;
    use crate::model::{Grid1D, Numerics, Parameters};
    use std::f64::consts::PI;

    fn problem(c_fric: f64) -> Problem {
        let params = Parameters {
            eps: 1.0,
            mu: 0.1,
            c_fric,
            ..Parameters::default()
        };
        let grid = Grid1D::new(200, 20.0).unwrap();
        let bath = Bathymetry::bump(0.2, 1.0, 10.0).unwrap();
        Problem::new(params, grid, bath, Numerics::default()).unwrap()
    }

    #[test]
    fn lake_at_rest_is_a_fixed_point() {
        let pb = problem(0.1);
        let rest = FluidState::rest(&pb.grid);
        let (dz, dv) = sv_fluid_rhs(&pb, &rest, &SolidState::initial(0.0)).unwrap();
        assert!(dz.iter().chain(&dv).all(|v| *v == 0.0));
    }

    #[test]
    fn moving_bottom_drives_elevation() {
        let pb = problem(0.0);
        let rest = FluidState::rest(&pb.grid);
        let v0 = 0.3;
        let (dz, _) = sv_fluid_rhs(&pb, &rest, &SolidState::initial(v0)).unwrap();
        let slope = pb.bath.slope_balanced(0.0, &pb.grid).unwrap();
        for (d, s) in dz.iter().zip(&slope) {
            assert!((d + v0 * s).abs() < 1e-15);
        }
        assert!(pb.grid.integrate(&dz).abs() < 1e-12);
    }

    #[test]
    fn symmetrizer_is_positive_and_symmetrizes() {
        let pb = problem(0.1);
        let zeta: Vec<f64> = pb.grid.nodes().iter().map(|x| 0.1 * (x * 0.2 * PI).sin()).collect();
        let vbar: Vec<f64> = pb.grid.nodes().iter().map(|x| 0.2 * (x * 0.1 * PI).cos()).collect();
        let fluid = FluidState::new(zeta, vbar, 0.0).unwrap();
        let form = assemble_quasilinear(&pb, &fluid, &SolidState::initial(0.1)).unwrap();
        assert!(form.symmetry_defect() < 1e-15);
        assert!(form.min_symmetrizer_eigenvalue() >= pb.params.h_min);
    }

    #[test]
    fn quasilinear_form_reproduces_the_rhs() {
        let pb = Problem::new(
            Parameters {
                eps: 1.0,
                ..Parameters::default()
            },
            Grid1D::new(1600, 20.0).unwrap(),
            Bathymetry::bump(0.2, 3.0, 10.0).unwrap(),
            Numerics {
                nu4: 0.0,
                ..Numerics::default()
            },
        )
        .unwrap();
        let zeta: Vec<f64> = pb.grid.nodes().iter().map(|x| 0.1 * (x * 0.2 * PI).sin()).collect();
        let vbar: Vec<f64> = pb.grid.nodes().iter().map(|x| 0.2 * (x * 0.1 * PI).cos()).collect();
        let fluid = FluidState::new(zeta, vbar, 0.0).unwrap();
        let solid = SolidState::initial(0.0);
        let form = assemble_quasilinear(&pb, &fluid, &solid).unwrap();
        let (dz, dv) = sv_fluid_rhs(&pb, &fluid, &solid).unwrap();
        let dzeta = ddx(&fluid.zeta, pb.grid.dx);
        let dvbar = ddx(&fluid.vbar, pb.grid.dx);
        // the nonconservative product differs from D(hV) by O(dx^2)
        for i in 0..pb.grid.n {
            let a = &form.a[i];
            let q = -(a[1][0] * dzeta[i] + a[1][1] * dvbar[i]) - form.b[i][1];
            assert!((q - dv[i]).abs() < 1e-13);
            let p = -(a[0][0] * dzeta[i] + a[0][1] * dvbar[i]) - form.b[i][0];
            assert!((p - dz[i]).abs() < 2e-4, "{i}: {p} vs {}", dz[i]);
        }
    }

    #[test]
    fn rejects_non_unit_eps_and_dry_cells() {
        let mut pb = problem(0.1);
        pb.params.eps = 0.5;
        assert!(SvSolver::new(pb).is_err());
        let pb = problem(0.1);
        let mut zeta = vec![0.0; pb.grid.n];
        zeta[3] = -0.95;
        let fluid = FluidState::new(zeta, vec![0.0; pb.grid.n], 0.0).unwrap();
        assert!(matches!(
            sv_fluid_rhs(&pb, &fluid, &SolidState::initial(0.0)),
            Err(Error::MinimalDepthViolation { cell: 3, .. })
        ));
    }
}
