//! Fourier transforms on the periodic grid: wavenumbers, spectral Sobolev
//! norms, the spectral Laplacian and Fourier-multiplier solves.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::model::Grid1D;

#[derive(Clone)]
pub struct Spectral {
    grid: Grid1D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n;
        let base = 2.0 * std::f64::consts::PI / grid.length;
        let wavenumbers = (0..n)
            .map(|m| {
                let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
                base * signed
            })
            .collect();
        Self {
            grid: *grid,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Signed angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn forward(&self, u: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform including the `1/n` normalization; keeps the real part.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut spectrum);
        let scale = 1.0 / self.grid.n as f64;
        spectrum.into_iter().map(|c| c.re * scale).collect()
    }

    /// Applies the real even multiplier `symbol(k)` in Fourier space.
    pub fn apply_multiplier(&self, u: &[f64], symbol: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut spec = self.forward(u);
        for (c, &k) in spec.iter_mut().zip(&self.wavenumbers) {
            *c *= symbol(k);
        }
        self.inverse_real(spec)
    }

    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        self.apply_multiplier(u, |k| -k * k)
    }

    /// `||u||_{H^s}` with weight `(1 + k^2)^s`; for `sin(kx)` on a box of
    /// length `L` the square equals `(L/2)(1 + k^2)^s`.
    pub fn hs_norm(&self, u: &[f64], s: f64) -> f64 {
        let spec = self.forward(u);
        let n = self.grid.n as f64;
        let sum: f64 = spec
            .iter()
            .zip(&self.wavenumbers)
            .map(|(c, &k)| (1.0 + k * k).powf(s) * c.norm_sqr())
            .sum();
        (self.grid.length * sum / (n * n)).sqrt()
    }
}
