//! The solid's shape function and its rigid translates.
//!
//! The built-in profile is the smooth compactly supported bump
//! `b(x) = a * exp(1 - 1 / (1 - ((x - c) / r)^2))` for `|x - c| < r`, zero
//! elsewhere. All derivatives up to order four are evaluated in closed form:
//! with `s = (x - c) / r` and `u = 1 - s^2`, the k-th derivative of the unit
//! profile is `P_k(s) * phi(s) / u^(2k)` for the polynomials below.

use crate::error::{Error, Result};
use crate::model::Grid1D;

/// Highest derivative order available in closed form.
pub const MAX_ORDER: usize = 4;

// Panels for the reference integrals of the unit profile. The integrands are
// flat to all orders at s = +-1, so the trapezoidal rule converges faster
// than any power of the panel width.
const REFERENCE_PANELS: usize = 8192;

/// Shape of the solid lying on the bottom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bathymetry {
    pub amplitude: f64,
    pub radius: f64,
    pub center: f64,
    /// Length of the support, `2 r`.
    pub support_measure: f64,
    /// `∫ b dx`, the dimensionless solid volume.
    pub volume: f64,
}

/// `exp(1 - 1/u) / u^(2k)` with the underflow region mapped to zero.
#[inline]
fn weighted_profile(u: f64, k: usize) -> f64 {
    let inv = 1.0 / u;
    if inv > 700.0 {
        return 0.0;
    }
    (1.0 - inv).exp() * inv.powi(2 * k as i32)
}

#[inline]
fn profile_polynomial(s: f64, order: usize) -> f64 {
    let s2 = s * s;
    match order {
        0 => 1.0,
        1 => -2.0 * s,
        2 => 6.0 * s2 * s2 - 2.0,
        3 => s * (((-24.0 * s2 - 12.0) * s2 + 40.0) * s2 - 12.0),
        4 => ((((120.0 * s2 + 180.0) * s2 - 528.0) * s2 + 232.0) * s2 + 24.0) * s2 - 12.0,
        _ => unreachable!("derivative order checked by callers"),
    }
}

/// Derivative of the unit bump `phi(s) = exp(1 - 1/(1 - s^2))`.
pub fn unit_profile(s: f64, order: usize) -> f64 {
    assert!(order <= MAX_ORDER, "derivative order {order} > {MAX_ORDER}");
    if s.abs() >= 1.0 {
        return 0.0;
    }
    let u = 1.0 - s * s;
    profile_polynomial(s, order) * weighted_profile(u, order)
}

fn unit_integral(f: impl Fn(f64) -> f64) -> f64 {
    let h = 2.0 / REFERENCE_PANELS as f64;
    // endpoints contribute zero
    (1..REFERENCE_PANELS)
        .map(|i| f(-1.0 + i as f64 * h))
        .sum::<f64>()
        * h
}

impl Bathymetry {
    pub fn bump(amplitude: f64, radius: f64, center: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                reason: "must be finite".into(),
            });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "radius",
                reason: format!("must be finite and > 0, got {radius}"),
            });
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter {
                name: "center",
                reason: "must be finite".into(),
            });
        }
        let volume = amplitude * radius * unit_integral(|s| unit_profile(s, 0));
        Ok(Self {
            amplitude,
            radius,
            center,
            support_measure: 2.0 * radius,
            volume,
        })
    }

    /// A solid of zero height: flat bottom, no coupling through the bathymetry.
    pub fn flat(radius: f64, center: f64) -> Result<Self> {
        Self::bump(0.0, radius, center)
    }

    /// `order`-th derivative of the untranslated shape at offset `xi` from
    /// its center.
    #[inline]
    pub fn shape(&self, xi: f64, order: usize) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        self.amplitude * self.radius.powi(-(order as i32)) * unit_profile(xi / self.radius, order)
    }

    pub fn check_fits(&self, grid: &Grid1D) -> Result<()> {
        if self.support_measure >= grid.length {
            return Err(Error::SupportExceedsDomain {
                width: self.support_measure,
                length: grid.length,
            });
        }
        Ok(())
    }

    /// Samples of the `order`-th derivative of `b(x - x_s)` on the grid
    /// nodes, with periodic wraparound.
    pub fn eval_b(&self, x_s: f64, grid: &Grid1D, order: usize) -> Result<Vec<f64>> {
        if order > MAX_ORDER {
            return Err(Error::InvalidParameter {
                name: "order",
                reason: format!("derivative order must be <= {MAX_ORDER}, got {order}"),
            });
        }
        self.check_fits(grid)?;
        let shift = self.center + x_s;
        Ok((0..grid.n)
            .map(|i| self.shape(grid.wrap_offset(grid.x(i) - shift), order))
            .collect())
    }

    /// First-derivative samples with their grid mean removed.
    ///
    /// The analytic samples of `b'` only sum to zero up to the aliasing error
    /// of the grid; removing the mean makes the discrete integral vanish
    /// exactly, so the moving-bottom source carries no net mass and a uniform
    /// elevation exerts no horizontal force on the solid.
    pub fn slope_balanced(&self, x_s: f64, grid: &Grid1D) -> Result<Vec<f64>> {
        let mut db = self.eval_b(x_s, grid, 1)?;
        let mean = db.iter().sum::<f64>() / grid.n as f64;
        db.iter_mut().for_each(|v| *v -= mean);
        Ok(db)
    }

    /// Integral of `field` over the translated support
    /// `[c + x_s - r, c + x_s + r]`, integrating on each cell the cubic
    /// through the four surrounding nodes.
    ///
    /// Exact for cubic fields and fourth-order accurate otherwise, so the cut
    /// cells at the support edges add no erratic low-order error.
    pub fn integrate_over_support(&self, field: &[f64], x_s: f64, grid: &Grid1D) -> Result<f64> {
        grid.check_len(field)?;
        self.check_fits(grid)?;
        let lo = self.center + x_s - self.radius;
        let hi = self.center + x_s + self.radius;
        let n = grid.n as i64;
        let dx = grid.dx;
        let at = |j: i64| field[j.rem_euclid(n) as usize];
        let gauss = 0.5 / 3f64.sqrt();
        let first = (lo / dx).floor() as i64;
        let last = (hi / dx).floor() as i64;
        let mut total = 0.0;
        for j in first..=last {
            let x0 = j as f64 * dx;
            let ta = ((lo - x0) / dx).max(0.0);
            let tb = ((hi - x0) / dx).min(1.0);
            if tb <= ta {
                continue;
            }
            let (fm, f0, f1, f2) = (at(j - 1), at(j), at(j + 1), at(j + 2));
            let cubic = |t: f64| {
                -t * (t - 1.0) * (t - 2.0) / 6.0 * fm + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * f0
                    - (t + 1.0) * t * (t - 2.0) / 2.0 * f1
                    + (t + 1.0) * t * (t - 1.0) / 6.0 * f2
            };
            let (mid, half) = (0.5 * (ta + tb), tb - ta);
            total += 0.5 * half * dx * (cubic(mid - gauss * half) + cubic(mid + gauss * half));
        }
        Ok(total)
    }

    /// `∫ (d^k b / dx^k)^2 dx` evaluated from the closed-form derivative.
    pub fn derivative_l2_sq(&self, order: usize) -> f64 {
        assert!(order <= MAX_ORDER);
        let a = self.amplitude;
        let r = self.radius;
        a * a * r.powi(1 - 2 * order as i32) * unit_integral(|s| unit_profile(s, order).powi(2))
    }

    /// Sobolev norm `||b||_{H^s}` for integer `s <= 4`, using the Fourier
    /// weight `(1 + k^2)^s` expanded binomially.
    pub fn hs_norm(&self, s: usize) -> f64 {
        assert!(s <= MAX_ORDER);
        let mut binom = 1.0;
        let mut total = 0.0;
        for j in 0..=s {
            total += binom * self.derivative_l2_sq(j);
            binom = binom * (s - j) as f64 / (j + 1) as f64;
        }
        total.sqrt()
    }
}
