//! Dimensionless parameters, the periodic grid and the state containers
//! shared by every solver.

use crate::error::{Error, Result};

/// Upper bound on the shallowness parameter.
pub const MU_MAX: f64 = 1.0;

/// Dimensionless constants of one wave-structure configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    /// Shallowness parameter (squared depth over wavelength).
    pub mu: f64,
    /// Nonlinearity parameter; also scales the bottom amplitude.
    pub eps: f64,
    /// Coulomb friction coefficient.
    pub c_fric: f64,
    /// Friction regularization; keeps the friction denominator away from zero.
    pub delta_bar: f64,
    /// Scaled mass of the solid.
    pub m_tilde: f64,
    /// Atmospheric pressure offset in units of the hydrostatic pressure scale.
    pub p_atm: f64,
    /// Minimal admissible water depth.
    pub h_min: f64,
}

impl Default for Parameters {
    fn default() -> Self {
        Self {
            mu: 0.1,
            eps: 1.0,
            c_fric: 0.1,
            delta_bar: 1e-2,
            m_tilde: 1.0,
            p_atm: 0.0,
            h_min: 0.1,
        }
    }
}

/// The two asymptotic regimes the solvers implement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Fully nonlinear shallow water, `eps = 1`.
    SaintVenant,
    /// Weakly nonlinear long waves, `eps <= mu`.
    Boussinesq,
}

impl Parameters {
    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, reason: impl Into<String>) -> Error {
            Error::InvalidParameter {
                name,
                reason: reason.into(),
            }
        }
        let finite = [
            ("mu", self.mu),
            ("eps", self.eps),
            ("c_fric", self.c_fric),
            ("delta_bar", self.delta_bar),
            ("m_tilde", self.m_tilde),
            ("p_atm", self.p_atm),
            ("h_min", self.h_min),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(bad(name, "must be finite"));
            }
        }
        if !(self.mu > 0.0 && self.mu <= MU_MAX) {
            return Err(bad("mu", format!("must lie in (0, {MU_MAX}], got {}", self.mu)));
        }
        if self.eps <= 0.0 {
            return Err(bad("eps", format!("must be > 0, got {}", self.eps)));
        }
        if self.c_fric < 0.0 {
            return Err(bad("c_fric", format!("must be >= 0, got {}", self.c_fric)));
        }
        if self.delta_bar <= 0.0 {
            return Err(bad("delta_bar", format!("must be > 0, got {}", self.delta_bar)));
        }
        if self.m_tilde <= 0.0 {
            return Err(bad("m_tilde", format!("must be > 0, got {}", self.m_tilde)));
        }
        if self.p_atm < 0.0 {
            return Err(bad("p_atm", format!("must be >= 0, got {}", self.p_atm)));
        }
        if self.h_min <= 0.0 {
            return Err(bad("h_min", format!("must be > 0, got {}", self.h_min)));
        }
        Ok(())
    }

    /// Checks the regime constraint on `eps` and `mu`.
    pub fn check_regime(&self, regime: Regime) -> Result<()> {
        match regime {
            Regime::SaintVenant if self.eps != 1.0 => Err(Error::InvalidParameter {
                name: "eps",
                reason: format!("Saint-Venant runs require eps = 1, got {}", self.eps),
            }),
            Regime::Boussinesq if self.eps > self.mu => Err(Error::RegimeViolation {
                eps: self.eps,
                mu: self.mu,
            }),
            _ => Ok(()),
        }
    }
}

/// Numerical settings of the explicit steppers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    /// Courant number used for the time-step limit.
    pub cfl: f64,
    /// Coefficient of the fourth-difference hyperviscosity `nu4 * dx^3 * D^4`.
    pub nu4: f64,
    /// Largest admissible |d/dx| of either field before a run is stopped.
    pub gradient_limit: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            nu4: 0.02,
            gradient_limit: 100.0,
        }
    }
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "cfl",
                reason: format!("must lie in (0, 1], got {}", self.cfl),
            });
        }
        if !(self.nu4 >= 0.0 && self.nu4.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "nu4",
                reason: format!("must be finite and >= 0, got {}", self.nu4),
            });
        }
        if !(self.gradient_limit > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gradient_limit",
                reason: format!("must be > 0, got {}", self.gradient_limit),
            });
        }
        Ok(())
    }
}

/// Uniform periodic grid on `[0, length)`; node `i` sits at `i * dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub n: usize,
    pub length: f64,
    pub dx: f64,
}

impl Grid1D {
    pub const MIN_CELLS: usize = 8;

    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < Self::MIN_CELLS {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("need at least {} cells, got {n}", Self::MIN_CELLS),
            });
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: format!("must be finite and > 0, got {length}"),
            });
        }
        Ok(Self {
            n,
            length,
            dx: length / n as f64,
        })
    }

    /// Always true: the solvers only support periodic boxes.
    pub fn periodic(&self) -> bool {
        true
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Maps a displacement into `[-length/2, length/2)`.
    #[inline]
    pub fn wrap_offset(&self, d: f64) -> f64 {
        let half = 0.5 * self.length;
        (d + half).rem_euclid(self.length) - half
    }

    /// Periodic trapezoidal quadrature, `dx * sum(field)`.
    pub fn integrate(&self, field: &[f64]) -> f64 {
        self.dx * field.iter().sum::<f64>()
    }

    /// Periodic discrete inner product.
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.dx * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn l2_norm(&self, field: &[f64]) -> f64 {
        self.dot(field, field).sqrt()
    }

    pub(crate) fn check_len(&self, field: &[f64]) -> Result<()> {
        if field.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: field.len(),
            });
        }
        Ok(())
    }
}

/// Surface elevation and depth-averaged velocity at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub zeta: Vec<f64>,
    pub vbar: Vec<f64>,
    pub time: f64,
}

impl FluidState {
    pub fn rest(grid: &Grid1D) -> Self {
        Self {
            zeta: vec![0.0; grid.n],
            vbar: vec![0.0; grid.n],
            time: 0.0,
        }
    }

    pub fn new(zeta: Vec<f64>, vbar: Vec<f64>, time: f64) -> Result<Self> {
        if zeta.len() != vbar.len() {
            return Err(Error::LengthMismatch {
                expected: zeta.len(),
                actual: vbar.len(),
            });
        }
        Ok(Self { zeta, vbar, time })
    }

    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.zeta.iter().chain(&self.vbar).all(|v| v.is_finite())
    }

    /// Largest absolute entry over both fields.
    pub fn sup_norm(&self) -> f64 {
        self.zeta
            .iter()
            .chain(&self.vbar)
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Horizontal displacement, velocity and the last evaluated acceleration of
/// the solid.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolidState {
    pub x_s: f64,
    pub v_s: f64,
    pub a_s: f64,
}

impl SolidState {
    /// Initial state: the solid starts at its reference position.
    pub fn initial(v0: f64) -> Self {
        Self {
            x_s: 0.0,
            v_s: v0,
            a_s: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x_s.is_finite() && self.v_s.is_finite() && self.a_s.is_finite()
    }
}

/// Water depth `h = 1 + eps * (zeta - b)`, checked against `h_min`.
pub fn depth(zeta: &[f64], bottom: &[f64], params: &Parameters) -> Result<Vec<f64>> {
    if zeta.len() != bottom.len() {
        return Err(Error::LengthMismatch {
            expected: zeta.len(),
            actual: bottom.len(),
        });
    }
    let h: Vec<f64> = zeta
        .iter()
        .zip(bottom)
        .map(|(z, b)| 1.0 + params.eps * (z - b))
        .collect();
    check_depth(&h, params.h_min)?;
    Ok(h)
}

pub(crate) fn check_depth(h: &[f64], h_min: f64) -> Result<()> {
    match h.iter().position(|&v| !(v >= h_min)) {
        Some(cell) => Err(Error::MinimalDepthViolation {
            cell,
            depth: h[cell],
            h_min,
        }),
        None => Ok(()),
    }
}
