//! Periodic finite-difference stencils shared by the fluid solvers.

/// Second-order centered first derivative.
pub fn ddx(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    let inv = 0.5 / dx;
    (0..n)
        .map(|i| (u[(i + 1) % n] - u[(i + n - 1) % n]) * inv)
        .collect()
}

/// Second-order centered second derivative.
pub fn d2dx2(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    let inv = 1.0 / (dx * dx);
    (0..n)
        .map(|i| (u[(i + 1) % n] - 2.0 * u[i] + u[(i + n - 1) % n]) * inv)
        .collect()
}

/// Undivided fourth difference `u[i+2] - 4u[i+1] + 6u[i] - 4u[i-1] + u[i-2]`.
pub fn fourth_difference(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            u[(i + 2) % n] - 4.0 * u[(i + 1) % n] + 6.0 * u[i] - 4.0 * u[(i + n - 1) % n]
                + u[(i + n - 2) % n]
        })
        .collect()
}

/// Adds `-nu4 * dx^3 * D^4 u` to `out`.
pub fn add_hyperviscosity(out: &mut [f64], u: &[f64], nu4: f64, dx: f64) {
    if nu4 == 0.0 {
        return;
    }
    let coef = nu4 / dx;
    for (o, d) in out.iter_mut().zip(fourth_difference(u)) {
        *o -= coef * d;
    }
}

/// Largest absolute centered difference quotient.
pub fn max_abs_gradient(u: &[f64], dx: f64) -> f64 {
    ddx(u, dx).into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derivative_of_sine_has_discrete_symbol() {
        let n = 64;
        let dx = 2.0 * PI / n as f64;
        let u: Vec<f64> = (0..n).map(|i| (3.0 * i as f64 * dx).sin()).collect();
        let du = ddx(&u, dx);
        let symbol = (3.0 * dx).sin() / dx;
        for i in 0..n {
            assert!((du[i] - symbol * (3.0 * i as f64 * dx).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn stencils_annihilate_constants_and_sum_to_zero() {
        let u = [1.5; 12];
        assert!(ddx(&u, 0.1).iter().all(|v| v.abs() < 1e-12));
        assert!(fourth_difference(&u).iter().all(|v| v.abs() < 1e-12));
        let w: Vec<f64> = (0..12).map(|i| ((i * i) % 7) as f64).collect();
        assert!(ddx(&w, 0.1).iter().sum::<f64>().abs() < 1e-12);
        assert!(fourth_difference(&w).iter().sum::<f64>().abs() < 1e-12);
        assert!(d2dx2(&w, 0.1).iter().sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn hyperviscosity_damps_the_highest_mode() {
        let u: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let mut out = vec![0.0; 8];
        add_hyperviscosity(&mut out, &u, 0.02, 0.5);
        for (o, v) in out.iter().zip(&u) {
            assert!(o * v < 0.0);
        }
    }
}
