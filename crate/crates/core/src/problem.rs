use crate::bathymetry::Bathymetry;
use crate::error::Result;
use crate::model::{Grid1D, Numerics, Parameters};
use crate::solid::SolidConstants;

/// Everything a solver needs besides the evolving state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    pub params: Parameters,
    pub grid: Grid1D,
    pub bath: Bathymetry,
    pub numerics: Numerics,
    pub consts: SolidConstants,
}

impl Problem {
    pub fn new(params: Parameters, grid: Grid1D, bath: Bathymetry, numerics: Numerics) -> Result<Self> {
        params.validate()?;
        numerics.validate()?;
        bath.check_fits(&grid)?;
        Ok(Self::new_unchecked(params, grid, bath, numerics))
    }

    /// Skips parameter validation; used to probe formal limits such as
    /// `mu = 0` that a physical run must never reach.
    #[doc(hidden)]
    pub fn new_unchecked(params: Parameters, grid: Grid1D, bath: Bathymetry, numerics: Numerics) -> Self {
        let consts = SolidConstants::new(&bath, &params);
        Self {
            params,
            grid,
            bath,
            numerics,
            consts,
        }
    }

    /// Bottom samples at solid displacement `x_s`.
    pub fn bottom_at(&self, x_s: f64) -> Result<BottomSamples> {
        Ok(BottomSamples {
            b: self.bath.eval_b(x_s, &self.grid, 0)?,
            db: self.bath.eval_b(x_s, &self.grid, 1)?,
            db_balanced: self.bath.slope_balanced(x_s, &self.grid)?,
            d2b: self.bath.eval_b(x_s, &self.grid, 2)?,
        })
    }
}

/// Bottom elevation and slopes sampled at one solid position.
#[derive(Debug, Clone, PartialEq)]
pub struct BottomSamples {
    pub b: Vec<f64>,
    pub db: Vec<f64>,
    /// `db` with its grid mean removed.
    pub db_balanced: Vec<f64>,
    pub d2b: Vec<f64>,
}
