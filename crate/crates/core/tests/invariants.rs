use proptest::prelude::*;
use wsi_core::diagnostics::{energy_eb, sobolev_norm};
use wsi_core::solid::friction_factor;
use wsi_core::spectral::Spectral;
use wsi_core::*;

const N: usize = 128;
const L: f64 = 32.0;

fn problem(eps: f64, mu: f64, amplitude: f64, radius: f64, center: f64) -> Problem {
    let params = Parameters {
        eps,
        mu,
        ..Parameters::default()
    };
    let bath = Bathymetry::bump(amplitude, radius, center).unwrap();
    Problem::new(params, Grid1D::new(N, L).unwrap(), bath, Numerics::default()).unwrap()
}

/// A few low Fourier modes, smooth on the grid.
fn field(coeffs: &[f64]) -> Vec<f64> {
    let grid = Grid1D::new(N, L).unwrap();
    grid.nodes()
        .iter()
        .map(|x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c * (2.0 * std::f64::consts::PI * (m + 1) as f64 * x / L + m as f64).sin())
                .sum()
        })
        .collect()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.1..0.1f64, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lake_at_rest_is_stationary(amp in 0.0..0.6f64, radius in 1.0..6.0f64, center in 8.0..24.0f64) {
        let sv = SvSolver::new(problem(1.0, 0.1, amp, radius, center)).unwrap();
        let bous = BousSolver::new(problem(0.05, 0.1, amp, radius, center), ClosureKind::RefinedBous).unwrap();
        let rest = FluidState::rest(&sv.problem().grid);
        for t in [sv.tendency(&rest, &SolidState::initial(0.0)).unwrap(),
                  bous.tendency(&rest, &SolidState::initial(0.0)).unwrap()] {
            prop_assert!(t.dzeta.iter().chain(&t.dvbar).all(|v| *v == 0.0));
            prop_assert_eq!(t.accel, 0.0);
        }
    }

    #[test]
    fn elevation_tendency_conserves_mass(z in coeffs(), v in coeffs(), vs in -0.5..0.5f64, x_s in -3.0..3.0f64) {
        let sv = SvSolver::new(problem(1.0, 0.1, 0.3, 3.0, 16.0)).unwrap();
        let fluid = FluidState::new(field(&z), field(&v), 0.0).unwrap();
        let solid = SolidState { x_s, v_s: vs, a_s: 0.0 };
        let t = sv.tendency(&fluid, &solid).unwrap();
        prop_assert!(sv.problem().grid.integrate(&t.dzeta).abs() < 1e-12);
    }

    #[test]
    fn energy_is_nonnegative_and_zero_only_at_rest(z in coeffs(), v in coeffs(), vs in -0.5..0.5f64) {
        let pb = problem(0.05, 0.1, 0.3, 3.0, 16.0);
        let fluid = FluidState::new(field(&z), field(&v), 0.0).unwrap();
        let e = energy_eb(&pb, &fluid, &SolidState::initial(vs)).unwrap();
        prop_assert!(e >= 0.0);
        let rest = energy_eb(&pb, &FluidState::rest(&pb.grid), &SolidState::initial(0.0)).unwrap();
        prop_assert_eq!(rest, 0.0);
        if z.iter().chain(&v).any(|c| c.abs() > 1e-3) || vs != 0.0 {
            prop_assert!(e > 0.0);
        }
    }

    #[test]
    fn energy_is_translation_invariant(z in coeffs(), v in coeffs(), vs in -0.5..0.5f64, shift in 1usize..40) {
        let pb = problem(0.05, 0.1, 0.3, 3.0, 12.0);
        let dx = pb.grid.dx;
        let moved = problem(0.05, 0.1, 0.3, 3.0, 12.0 + shift as f64 * dx);
        let (zeta, vbar) = (field(&z), field(&v));
        let rotate = |u: &[f64]| {
            let mut u = u.to_vec();
            u.rotate_right(shift);
            u
        };
        let a = energy_eb(&pb, &FluidState::new(zeta.clone(), vbar.clone(), 0.0).unwrap(), &SolidState::initial(vs)).unwrap();
        let b = energy_eb(&moved, &FluidState::new(rotate(&zeta), rotate(&vbar), 0.0).unwrap(), &SolidState::initial(vs)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn even_data_exerts_no_net_force(z in coeffs(), amp in 0.1..0.5f64) {
        // zeta even about the bump centre
        let pb = problem(1.0, 0.1, amp, 3.0, L / 2.0);
        let nodes = pb.grid.nodes();
        let zeta: Vec<f64> = nodes.iter().map(|x| {
            let d = x - L / 2.0;
            z.iter().enumerate().map(|(m, c)| c * (2.0 * std::f64::consts::PI * (m + 1) as f64 * d / L).cos()).sum()
        }).collect();
        let fluid = FluidState::new(zeta, vec![0.0; N], 0.0).unwrap();
        let sv = SvSolver::new(pb).unwrap();
        let accel = sv.tendency(&fluid, &SolidState::initial(0.0)).unwrap().accel;
        prop_assert!(accel.abs() < 1e-13, "{accel}");
    }

    #[test]
    fn friction_factor_is_odd_and_bounded(z in -10.0..10.0f64, delta in 1e-4..1.0f64) {
        let f = friction_factor(z, delta);
        prop_assert!(f.abs() < 1.0);
        prop_assert_eq!(friction_factor(-z, delta), -f);
        prop_assert!(f * z >= 0.0);
    }

    #[test]
    fn sobolev_norms_are_homogeneous(z in coeffs(), c in 1.0..10.0f64) {
        let spectral = Spectral::new(&Grid1D::new(N, L).unwrap());
        let u = field(&z);
        let cu: Vec<f64> = u.iter().map(|v| c * v).collect();
        for s in [0, 1] {
            let (a, b) = (sobolev_norm(&spectral, &u, s).unwrap(), sobolev_norm(&spectral, &cu, s).unwrap());
            prop_assert!((b - c * a).abs() <= 1e-12 * b.max(1e-300));
        }
    }
}
