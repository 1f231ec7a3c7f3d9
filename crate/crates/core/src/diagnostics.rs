//! Energy functional, discrete Sobolev norms and runtime versions of the a
//! priori bounds.

use crate::error::{Error, Result};
use crate::model::{depth, FluidState, SolidState};
use crate::problem::Problem;
use crate::spectral::Spectral;
use crate::stencil::ddx;

/// Coupled wave-structure energy
/// `½∫ζ² + ½∫h V² + (μ/6)∫h (∂x V)² + |Ẋ_S|²/(2ε)`.
pub fn energy_eb(problem: &Problem, fluid: &FluidState, solid: &SolidState) -> Result<f64> {
    let grid = &problem.grid;
    grid.check_len(&fluid.zeta)?;
    grid.check_len(&fluid.vbar)?;
    let p = &problem.params;
    let b = problem.bath.eval_b(solid.x_s, grid, 0)?;
    let h = depth(&fluid.zeta, &b, p)?;
    let dv = ddx(&fluid.vbar, grid.dx);
    let mut sum = 0.0;
    for i in 0..grid.n {
        let v = fluid.vbar[i];
        sum += 0.5 * fluid.zeta[i] * fluid.zeta[i] + 0.5 * h[i] * v * v + p.mu / 6.0 * h[i] * dv[i] * dv[i];
    }
    Ok(sum * grid.dx + solid.v_s * solid.v_s / (2.0 * p.eps))
}

fn check_order(s: u32) -> Result<()> {
    if s > 1 {
        return Err(Error::InvalidParameter {
            name: "s",
            reason: format!("only s = 0 or 1 is supported, got {s}"),
        });
    }
    Ok(())
}

/// Spectral `H^s` norm, `s ∈ {0, 1}`.
pub fn sobolev_norm(spectral: &Spectral, field: &[f64], s: u32) -> Result<f64> {
    check_order(s)?;
    spectral.grid().check_len(field)?;
    Ok(spectral.hs_norm(field, s as f64))
}

/// `‖ζ‖_{H^s} + ‖V‖_{H^s} + √μ ‖V‖_{H^{s+1}}`.
pub fn xs_norm(spectral: &Spectral, fluid: &FluidState, mu: f64, s: u32) -> Result<f64> {
    check_order(s)?;
    let base = sobolev_norm(spectral, &fluid.zeta, s)? + sobolev_norm(spectral, &fluid.vbar, s)?;
    if mu == 0.0 {
        return Ok(base);
    }
    spectral.grid().check_len(&fluid.vbar)?;
    Ok(base + mu.sqrt() * spectral.hs_norm(&fluid.vbar, s as f64 + 1.0))
}

/// One sample of the monitored quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub t: f64,
    pub e_b: f64,
    pub mass: f64,
    pub l2_zeta: f64,
    pub l2_v: f64,
    pub xs0: f64,
    pub xs1: f64,
    pub x_s: f64,
    pub v_s: f64,
}

impl EnergyReport {
    pub fn sample(problem: &Problem, spectral: &Spectral, fluid: &FluidState, solid: &SolidState) -> Result<Self> {
        let grid = &problem.grid;
        let mu = problem.params.mu;
        Ok(Self {
            t: fluid.time,
            e_b: energy_eb(problem, fluid, solid)?,
            mass: grid.integrate(&fluid.zeta),
            l2_zeta: grid.l2_norm(&fluid.zeta),
            l2_v: grid.l2_norm(&fluid.vbar),
            xs0: xs_norm(spectral, fluid, mu, 0)?,
            xs1: xs_norm(spectral, fluid, mu, 1)?,
            x_s: solid.x_s,
            v_s: solid.v_s,
        })
    }
}

/// Which a priori velocity estimate to check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    /// `|Ẋ_S(t)| ≤ |v0| + (1/M) max_τ‖ζ(τ)‖ ‖∂x𝔟‖ t`.
    SaintVenant,
    /// `e^{-√ε c0 t}|Ẋ_S|² ≤ ε‖U0‖²_{X⁰} + |v0|² + εμ c0 T ‖𝔟‖²_{H³}`.
    Boussinesq { c0: f64 },
}

/// Result of a bound check: per-sample margins (bound minus observed).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub margins: Vec<f64>,
    pub worst_margin: f64,
    pub first_violation: Option<f64>,
}

impl BoundCheck {
    pub fn ok(&self) -> bool {
        self.first_violation.is_none()
    }

    /// Turns a violation into `BoundViolated`.
    pub fn require(&self) -> Result<()> {
        match self.first_violation {
            None => Ok(()),
            Some(time) => Err(Error::BoundViolated {
                time,
                margin: self.worst_margin,
            }),
        }
    }
}

/// Evaluates the velocity estimate at every sample of a time-aligned run.
pub fn check_velocity_bound(
    problem: &Problem,
    spectral: &Spectral,
    fluids: &[FluidState],
    solids: &[SolidState],
    mode: BoundMode,
) -> Result<BoundCheck> {
    if fluids.len() != solids.len() {
        return Err(Error::LengthMismatch {
            expected: fluids.len(),
            actual: solids.len(),
        });
    }
    if fluids.is_empty() {
        return Err(Error::InsufficientSamples { required: 1, actual: 0 });
    }
    let p = &problem.params;
    let grid = &problem.grid;
    let t0 = fluids[0].time;
    let v0 = solids[0].v_s;
    let mut margins = Vec::with_capacity(fluids.len());
    match mode {
        BoundMode::SaintVenant => {
            let slope = problem.bath.derivative_l2_sq(1).sqrt();
            let mut max_l2: f64 = 0.0;
            for (f, s) in fluids.iter().zip(solids) {
                max_l2 = max_l2.max(grid.l2_norm(&f.zeta));
                let bound = v0.abs() + max_l2 * slope * (f.time - t0) / p.m_tilde;
                margins.push(bound - s.v_s.abs());
            }
        }
        BoundMode::Boussinesq { c0 } => {
            let horizon = fluids[fluids.len() - 1].time - t0;
            let x0 = xs_norm(spectral, &fluids[0], p.mu, 0)?;
            let h3 = problem.bath.hs_norm(3);
            let bound = p.eps * x0 * x0 + v0 * v0 + p.eps * p.mu * c0 * horizon * h3 * h3;
            for (f, s) in fluids.iter().zip(solids) {
                let weighted = (-(p.eps.sqrt()) * c0 * (f.time - t0)).exp() * s.v_s * s.v_s;
                margins.push(bound - weighted);
            }
        }
    }
    let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let first_violation = margins
        .iter()
        .position(|&m| !(m >= 0.0))
        .map(|i| fluids[i].time);
    Ok(BoundCheck {
        margins,
        worst_margin,
        first_violation,
    })
}

/// Exponential rate fitted to an energy series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub rate: f64,
    /// False when the series never reached twice its initial value (rate is then 0).
    pub doubled: bool,
}

pub const MIN_GROWTH_SAMPLES: usize = 10;

/// Least-squares slope of `log E` against `t` over the samples with
/// `E ≥ 2 E(0)`.
pub fn fit_growth_rate(times: &[f64], energies: &[f64]) -> Result<GrowthFit> {
    if times.len() != energies.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            actual: energies.len(),
        });
    }
    if times.len() < MIN_GROWTH_SAMPLES {
        return Err(Error::InsufficientSamples {
            required: MIN_GROWTH_SAMPLES,
            actual: times.len(),
        });
    }
    if let Some(bad) = energies.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidParameter {
            name: "energies",
            reason: format!("must be finite and > 0, got {bad}"),
        });
    }
    let threshold = 2.0 * energies[0];
    let window: Vec<(f64, f64)> = times
        .iter()
        .zip(energies)
        .filter(|(_, e)| **e >= threshold)
        .map(|(t, e)| (*t, e.ln()))
        .collect();
    if window.len() < 2 {
        return Ok(GrowthFit {
            rate: 0.0,
            doubled: false,
        });
    }
    let m = window.len() as f64;
    let tm = window.iter().map(|w| w.0).sum::<f64>() / m;
    let lm = window.iter().map(|w| w.1).sum::<f64>() / m;
    let (mut num, mut den) = (0.0, 0.0);
    for (t, l) in &window {
        num += (t - tm) * (l - lm);
        den += (t - tm) * (t - tm);
    }
    Ok(GrowthFit {
        rate: if den > 0.0 { num / den } else { 0.0 },
        doubled: true,
    })
}

/// Bottom pressure under the hydrostatic and the refined closures.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureProbe {
    pub hydrostatic: Vec<f64>,
    pub refined: Vec<f64>,
    pub max_difference: f64,
}

/// Hydrostatic `p_atm + h` against
/// `p_atm + h + (εμ/2)Δζ + εμ(𝔟''Ẋ² - 𝔟'Ẍ)`, using the cached acceleration.
pub fn pressure_consistency_probe(
    problem: &Problem,
    spectral: &Spectral,
    fluid: &FluidState,
    solid: &SolidState,
) -> Result<PressureProbe> {
    let grid = &problem.grid;
    grid.check_len(&fluid.zeta)?;
    let p = &problem.params;
    let bottom = problem.bottom_at(solid.x_s)?;
    let h = depth(&fluid.zeta, &bottom.b, p)?;
    let lap = spectral.laplacian(&fluid.zeta);
    let em = p.eps * p.mu;
    let v2 = solid.v_s * solid.v_s;
    let hydrostatic: Vec<f64> = h.iter().map(|h| p.p_atm + h).collect();
    let refined: Vec<f64> = (0..grid.n)
        .map(|i| {
            let btt = bottom.d2b[i] * v2 - bottom.db[i] * solid.a_s;
            hydrostatic[i] + 0.5 * em * lap[i] + em * btt
        })
        .collect();
    let max_difference = hydrostatic
        .iter()
        .zip(&refined)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(PressureProbe {
        hydrostatic,
        refined,
        max_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bathymetry::Bathymetry;
    use crate::model::{Grid1D, Numerics, Parameters};
    use std::f64::consts::PI;

    fn problem(amp: f64, eps: f64, mu: f64) -> Problem {
        let params = Parameters {
            eps,
            mu,
            ..Parameters::default()
        };
        let grid = Grid1D::new(128, 20.0).unwrap();
        let bath = if amp == 0.0 {
            Bathymetry::flat(1.0, 10.0).unwrap()
        } else {
            Bathymetry::bump(amp, 1.0, 10.0).unwrap()
        };
        Problem::new(params, grid, bath, Numerics::default()).unwrap()
    }

    #[test]
    fn energy_examples() {
        let pb = problem(0.2, 0.1, 0.1);
        let rest = FluidState::rest(&pb.grid);
        assert_eq!(energy_eb(&pb, &rest, &SolidState::initial(0.0)).unwrap(), 0.0);
        let e = energy_eb(&pb, &rest, &SolidState::initial(0.3)).unwrap();
        assert!((e - 0.09 / 0.2).abs() < 1e-15);

        let pb = problem(0.0, 0.1, 0.1);
        let k = 2.0 * PI * 3.0 / 20.0;
        let zeta: Vec<f64> = pb.grid.nodes().iter().map(|x| (k * x).sin()).collect();
        let fluid = FluidState::new(zeta, vec![0.0; 128], 0.0).unwrap();
        let e = energy_eb(&pb, &fluid, &SolidState::initial(0.0)).unwrap();
        assert!((e - 5.0).abs() < 1e-12);
    }

    #[test]
    fn xs_norm_drops_the_dispersive_part_at_zero_mu() {
        let g = Grid1D::new(64, 10.0).unwrap();
        let sp = Spectral::new(&g);
        let z: Vec<f64> = g.nodes().iter().map(|x| (x * 0.628).sin()).collect();
        let fluid = FluidState::new(z.clone(), z.clone(), 0.0).unwrap();
        let base = 2.0 * sobolev_norm(&sp, &z, 1).unwrap();
        assert_eq!(xs_norm(&sp, &fluid, 0.0, 1).unwrap(), base);
        assert!(xs_norm(&sp, &fluid, 0.1, 1).unwrap() > base);
        assert!(sobolev_norm(&sp, &z, 2).is_err());
        assert_eq!(sobolev_norm(&sp, &vec![0.0; 64], 0).unwrap(), 0.0);
    }

    #[test]
    fn growth_fit_examples() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let flat = vec![1.0; 50];
        let fit = fit_growth_rate(&t, &flat).unwrap();
        assert_eq!(fit.rate, 0.0);
        assert!(!fit.doubled);
        let e: Vec<f64> = t.iter().map(|t| (0.3 * t).exp()).collect();
        let fit = fit_growth_rate(&t, &e).unwrap();
        assert!(fit.doubled);
        assert!((fit.rate - 0.3).abs() < 1e-6);
        assert!(matches!(
            fit_growth_rate(&t[..5], &e[..5]),
            Err(Error::InsufficientSamples { required: 10, actual: 5 })
        ));
    }

    #[test]
    fn pressure_probe_examples() {
        let pb = problem(0.0, 0.1, 0.1);
        let sp = Spectral::new(&pb.grid);
        let rest = FluidState::rest(&pb.grid);
        let probe = pressure_consistency_probe(&pb, &sp, &rest, &SolidState::initial(0.0)).unwrap();
        assert!(probe.hydrostatic.iter().all(|p| *p == 1.0));
        assert_eq!(probe.max_difference, 0.0);

        let pb = problem(0.2, 0.1, 0.1);
        let k = 2.0 * PI * 2.0 / 20.0;
        let a = 0.05;
        let zeta: Vec<f64> = pb.grid.nodes().iter().map(|x| a * (k * x).sin()).collect();
        let fluid = FluidState::new(zeta, vec![0.0; 128], 0.0).unwrap();
        let probe = pressure_consistency_probe(&pb, &sp, &fluid, &SolidState::initial(0.0)).unwrap();
        // crest of sin(kx) at x = L/8 (node 16)
        let d = probe.hydrostatic[16] - probe.refined[16];
        assert!((d - 0.5 * 0.01 * a * k * k).abs() < 1e-10);
    }

    #[test]
    fn velocity_bound_holds_for_rest_and_flags_growth() {
        let pb = problem(0.2, 1.0, 0.1);
        let sp = Spectral::new(&pb.grid);
        let fluids: Vec<FluidState> = (0..5)
            .map(|i| FluidState {
                time: i as f64,
                ..FluidState::rest(&pb.grid)
            })
            .collect();
        let solids = vec![SolidState::initial(0.0); 5];
        let c = check_velocity_bound(&pb, &sp, &fluids, &solids, BoundMode::SaintVenant).unwrap();
        assert!(c.ok());
        let mut fast = solids.clone();
        fast[3].v_s = 0.1;
        let c = check_velocity_bound(&pb, &sp, &fluids, &fast, BoundMode::SaintVenant).unwrap();
        assert_eq!(c.first_violation, Some(3.0));
        assert!(matches!(c.require(), Err(Error::BoundViolated { .. })));
    }
}
