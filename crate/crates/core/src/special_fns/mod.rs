//! Complex-parameter special functions used by every other module.

mod bessel;
mod gamma;
mod hyp;

pub use bessel::{bessel_j, hankel1, spherical_hankel1};
pub use gamma::{
    gamma, gamma_ratio, gamma_ratio_asymptotic, gamma_real, ln_gamma_ratio, log_gamma, rgamma,
    rgamma_real, RatioOrder,
};
pub use hyp::{hyp2f1, hyp2f1_estimate, HypRoute, HypValue};

pub use num_complex::Complex64 as Complex;

use crate::error::{DswError, Result};
use num_complex::Complex64;

/// Stopping rule for the power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Above this |z| the Gauss series is replaced by the 1 - z connection.
    pub connection_threshold: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-15,
            max_terms: 10_000,
            connection_threshold: 0.5,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || max_terms < 1 {
            return Err(DswError::Invalid(format!(
                "series control needs rel_tol > 0 and max_terms >= 1, got {rel_tol}, {max_terms}"
            )));
        }
        Ok(SeriesControl {
            rel_tol,
            max_terms,
            ..Default::default()
        })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.connection_threshold = threshold;
        self
    }
}

/// ln(1 + z) without cancellation for small z.
pub fn ln1p(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if z.norm() > 0.5 {
        return (1.0 + z).ln();
    }
    Complex64::new(0.5 * (2.0 * x + x * x + y * y).ln_1p(), y.atan2(1.0 + x))
}

/// (sin πx, cos πx), exact at multiples of 1/2.
pub fn sin_cos_pi(x: f64) -> (f64, f64) {
    let r = x - 2.0 * (x / 2.0).round();
    if r == 0.0 {
        return (0.0, 1.0);
    }
    if r.abs() == 1.0 {
        return (0.0, -1.0);
    }
    if r == 0.5 {
        return (1.0, 0.0);
    }
    if r == -0.5 {
        return (-1.0, 0.0);
    }
    let t = std::f64::consts::PI * r;
    (t.sin(), t.cos())
}

/// sin(πz) with the real part reduced exactly.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let (s, c) = sin_cos_pi(z.re);
    let t = std::f64::consts::PI * z.im;
    Complex64::new(s * t.cosh(), c * t.sinh())
}

/// e^{iπx} with exact values at multiples of 1/2.
pub fn exp_i_pi(x: f64) -> Complex64 {
    let (s, c) = sin_cos_pi(x);
    Complex64::new(c, s)
}
