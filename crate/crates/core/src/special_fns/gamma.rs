//! Complex log-Gamma and Gamma-ratio evaluation.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{ln1p, sin_pi};
use crate::error::{DswError, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// B_{2k} / (2k (2k-1)) for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Below this modulus the argument is shifted upward before Stirling is applied.
const STIRLING_MIN: f64 = 10.0;

pub(crate) fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn stirling_tail(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

fn stirling(w: Complex64) -> Complex64 {
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + stirling_tail(w)
}

/// Principal branch of ln Γ(z), continuous off the negative real axis.
///
/// Accuracy is about 1e-15 absolute when |ln Γ| is of order one and 1e-15
/// relative to |ln Γ| for large arguments.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(DswError::Domain(format!("log_gamma of non-finite {z}")));
    }
    if is_pole(z) {
        return Err(DswError::pole(z));
    }
    if z.re < -100.0 {
        return Ok(reflected(z));
    }
    Ok(shifted(z))
}

fn shifted(z: Complex64) -> Complex64 {
    // ln Γ(z) = ln Γ(z + n) - ln Π (z + k); the product is logged once and the
    // branch is taken from the running sum of arguments.
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut arg_sum = 0.0;
    let mut ln_scale = 0.0;
    while w.re < 0.0 || w.norm() < STIRLING_MIN {
        prod *= w;
        arg_sum += w.arg();
        let n = prod.norm();
        if n > 1e150 {
            ln_scale += n.ln();
            prod /= n;
        }
        w += 1.0;
    }
    let lp = prod.ln();
    let turns = ((arg_sum - lp.im) / (2.0 * PI)).round();
    stirling(w) - Complex64::new(ln_scale + lp.re, lp.im + 2.0 * PI * turns)
}

fn ln_sin_pi(z: Complex64) -> Complex64 {
    // Any branch will do; the caller fixes multiples of 2πi.
    if z.im.abs() < 20.0 {
        return sin_pi(z).ln();
    }
    // Shifting re z by an even integer moves the log by a multiple of 2πi.
    let z = Complex64::new(z.re - 2.0 * (z.re / 2.0).round(), z.im);
    let two_pi_iz = |s: f64| Complex64::new(-2.0 * PI * s * z.im, 2.0 * PI * s * z.re).exp();
    if z.im > 0.0 {
        -Complex64::i() * PI * z
            + Complex64::new(0.5, 0.0).ln()
            + Complex64::new(0.0, PI / 2.0)
            + ln1p(-two_pi_iz(1.0))
    } else {
        Complex64::i() * PI * z + Complex64::new(0.5, 0.0).ln() - Complex64::new(0.0, PI / 2.0)
            + ln1p(-two_pi_iz(-1.0))
    }
}

fn reflected(z: Complex64) -> Complex64 {
    let right = shifted(Complex64::new(1.0, 0.0) - z);
    if z.im == 0.0 {
        let s = sin_pi(z).re.abs();
        let n = (-z.re).ceil();
        return Complex64::new(LN_PI - s.ln() - right.re, -PI * n);
    }
    let v = LN_PI - ln_sin_pi(z) - right;
    // Stirling is accurate to well within π in the imaginary part here, which
    // is enough to pick the branch that matches the sum-of-logs continuation.
    let guide = stirling(z).im;
    let k = ((guide - v.im) / (2.0 * PI)).round();
    v + Complex64::new(0.0, 2.0 * PI * k)
}

/// Γ(z). Fails at poles and when the value overflows.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    let lg = log_gamma(z)?;
    if lg.re > 709.0 {
        return Err(DswError::Overflow(format!("gamma({z})")));
    }
    Ok(lg.exp())
}

/// 1/Γ(z), zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lg = log_gamma(z)?;
    if lg.re < -709.0 {
        return Err(DswError::Overflow(format!("rgamma({z})")));
    }
    Ok((-lg).exp())
}

/// Γ at integers and half-integers by exact-as-possible recurrence from 1 or √π.
fn gamma_lattice(x: f64) -> Option<f64> {
    if (2.0 * x).fract() != 0.0 || x.abs() > 60.0 || (x <= 0.0 && x.fract() == 0.0) {
        return None;
    }
    let (mut g, mut t) = if x.fract() == 0.0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while t < x {
        g *= t;
        t += 1.0;
    }
    while t > x {
        t -= 1.0;
        g /= t;
    }
    Some(g)
}

/// Γ(x) for real x, returned as a real number.
pub fn gamma_real(x: f64) -> Result<f64> {
    if let Some(g) = gamma_lattice(x) {
        return Ok(g);
    }
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

/// 1/Γ(x) for real x.
pub fn rgamma_real(x: f64) -> Result<f64> {
    if let Some(g) = gamma_lattice(x) {
        return Ok(1.0 / g);
    }
    Ok(rgamma(Complex64::new(x, 0.0))?.re)
}

/// ln Γ(w + a) − ln Γ(w + b).
///
/// For |w| large against the offsets the difference is formed from the
/// Stirling expansion directly, so nothing of size |w ln w| cancels.
pub fn ln_gamma_ratio(w: Complex64, a: Complex64, b: Complex64) -> Result<Complex64> {
    let big = w.norm();
    let off = a.norm().max(b.norm());
    if big < 40.0 || big < 8.0 * off || (w.re < 0.0 && w.im.abs() < 2.0 * off + 10.0) {
        return Ok(log_gamma(w + a)? - log_gamma(w + b)?);
    }
    let da = a / w;
    let db = b / w;
    let head = (a - b) * w.ln() + (w + a - 0.5) * ln1p(da) - (w + b - 0.5) * ln1p(db) - (a - b);
    Ok(head + stirling_tail(w + a) - stirling_tail(w + b))
}

/// Γ(w + a) / Γ(w + b).
pub fn gamma_ratio(w: Complex64, a: Complex64, b: Complex64) -> Result<Complex64> {
    let l = ln_gamma_ratio(w, a, b)?;
    if l.re > 709.0 {
        return Err(DswError::Overflow(format!("gamma_ratio at w = {w}")));
    }
    Ok(l.exp())
}

/// Truncation order of [`gamma_ratio_asymptotic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioOrder {
    /// z^{A-B}
    Leading,
    /// z^{A-B} (1 + (A-B)(A+B-1)/(2z))
    FirstCorrection,
}

/// Large-|z| form of Γ(z + A)/Γ(z + B) on the principal branch of z^{A-B}.
pub fn gamma_ratio_asymptotic(
    z: Complex64,
    a: Complex64,
    b: Complex64,
    order: RatioOrder,
) -> Complex64 {
    let d = a - b;
    let lead = if d.im == 0.0 && d.re.fract() == 0.0 && d.re.abs() <= 64.0 {
        z.powi(d.re as i32)
    } else {
        (d * z.ln()).exp()
    };
    match order {
        RatioOrder::Leading => lead,
        RatioOrder::FirstCorrection => lead * (1.0 + d * (a + b - 1.0) / (2.0 * z)),
    }
}
