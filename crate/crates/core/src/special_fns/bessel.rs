//! Bessel functions of real order and the Hankel function of the first kind.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::rgamma_real;
use super::{exp_i_pi, sin_cos_pi};
use crate::error::{DswError, Result};

fn is_half_integer(p: f64) -> bool {
    (2.0 * p).fract() == 0.0 && p.fract() != 0.0
}

/// Power series (x/2)^p Σ (-x²/4)^n / (n! Γ(p+1+n)).
fn series(p: f64, x: f64) -> Result<f64> {
    let mut term = (p * (0.5 * x).ln()).exp() * rgamma_real(p + 1.0)?;
    if !term.is_finite() {
        return Err(DswError::Overflow(format!("J_{p}({x})")));
    }
    let q = -0.25 * x * x;
    let mut sum = term;
    for n in 0..10_000 {
        let nf = n as f64;
        term *= q / ((nf + 1.0) * (p + nf + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && nf + 1.0 > 0.5 * x {
            return Ok(sum);
        }
    }
    Err(DswError::NonConvergence { terms: 10_000 })
}

/// Hankel large-argument expansion; finite (hence exact) for half-integer p.
fn asymptotic(p: f64, x: f64) -> f64 {
    let mu = 4.0 * p * p;
    let terminates = is_half_integer(p);
    let chi = x - (0.5 * p + 0.25) * PI;
    let (mut pp, mut qq) = (0.0, 0.0);
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..200 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if a == 0.0 || (!terminates && a.abs() > last && k > 1) {
            break;
        }
        let signed = if (k / 2) % 2 == 0 { a } else { -a };
        if k % 2 == 0 {
            pp += signed;
        } else {
            qq += signed;
        }
        last = a.abs();
        if !terminates && a.abs() < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (pp * chi.cos() - qq * chi.sin())
}

/// J_ν(x) and Y_ν(x) for ν >= 0 and x >= 2 by Steed's method: the ratio
/// J_{ν+1}/J_ν from its continued fraction, downward recurrence to an order
/// μ in [−1/2, 1/2], then the complex continued fraction for
/// (J_μ' + iY_μ')/(J_μ + iY_μ) fixes the normalization through the Wronskian.
fn steed(nu: f64, x: f64) -> Result<(f64, f64)> {
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;
    const MAXIT: usize = 100_000;
    let nl = (nu - x + 1.5).max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    let mut sign = 1.0;
    let mut h = (nu * xi).max(TINY);
    let mut b = xi2 * nu;
    let (mut d, mut c) = (0.0, h);
    let mut done = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b - 1.0 / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            sign = -sign;
        }
        if (del - 1.0).abs() < EPS {
            done = true;
            break;
        }
    }
    if !done {
        return Err(DswError::NonConvergence { terms: MAXIT });
    }
    let mut rjl = sign * TINY;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let t = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * t - rjl;
        rjl = t;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let mut a = 0.25 - xmu * xmu;
    let (mut pp, mut qq) = (-0.5 * xi, 1.0);
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fct = a * xi / (pp * pp + qq * qq);
    let (mut cr, mut ci) = (br + qq * fct, bi + pp * fct);
    let mut den = br * br + bi * bi;
    let (mut dr, mut di) = (br / den, -bi / den);
    let (mut dlr, mut dli) = (cr * dr - ci * di, cr * di + ci * dr);
    let t = pp * dlr - qq * dli;
    qq = pp * dli + qq * dlr;
    pp = t;
    let mut done = false;
    for i in 2..MAXIT {
        a += 2.0 * (i - 1) as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < TINY {
            dr = TINY;
        }
        fct = a / (cr * cr + ci * ci);
        cr = br + cr * fct;
        ci = bi - ci * fct;
        if cr.abs() + ci.abs() < TINY {
            cr = TINY;
        }
        den = dr * dr + di * di;
        dr /= den;
        di = -di / den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        let t = pp * dlr - qq * dli;
        qq = pp * dli + qq * dlr;
        pp = t;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            done = true;
            break;
        }
    }
    if !done {
        return Err(DswError::NonConvergence { terms: MAXIT });
    }
    let gam = (pp - f) / qq;
    let rjmu = (w / ((pp - f) * gam + qq)).sqrt().copysign(rjl);
    let rymu = rjmu * gam;
    let rymup = rymu * (pp + qq / gam);
    let j = rjl1 * (rjmu / rjl);
    let (mut y0, mut y1) = (rymu, xmu * xi * rymu - rymup);
    for i in 1..=nl {
        let t = (xmu + i as f64) * xi2 * y1 - y0;
        y0 = y1;
        y1 = t;
    }
    Ok((j, y0))
}

/// Bessel function of the first kind J_p(x) for real order p and x >= 0.
///
/// Small arguments use the power series. For half-integer p the Hankel
/// expansion terminates and is used once x >= max(8, p²/4); other orders
/// switch to the Hankel expansion past max(25, 2p²) and to Steed's
/// continued fractions for x > 8 below that.
pub fn bessel_j(p: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() || !p.is_finite() {
        return Err(DswError::Domain(format!(
            "bessel_j needs finite x >= 0, got x = {x}, p = {p}"
        )));
    }
    if p < 0.0 && p.fract() == 0.0 {
        let n = -p;
        let v = bessel_j(n, x)?;
        return Ok(if n % 2.0 == 0.0 { v } else { -v });
    }
    if x == 0.0 {
        return if p == 0.0 {
            Ok(1.0)
        } else if p > 0.0 {
            Ok(0.0)
        } else {
            Err(DswError::Overflow(format!("J_{p}(0) is unbounded")))
        };
    }
    let p2 = p * p;
    if is_half_integer(p) && x >= 8.0f64.max(0.25 * p2) {
        return Ok(asymptotic(p, x));
    }
    if x > 25.0 && x > 2.0 * p2 {
        return Ok(asymptotic(p, x));
    }
    if x > 8.0 {
        if p >= 0.0 {
            return Ok(steed(p, x)?.0);
        }
        // J_{−ν} = cos νπ J_ν − sin νπ Y_ν
        let (jn, yn) = steed(-p, x)?;
        let (s, c) = sin_cos_pi(-p);
        return Ok(c * jn - s * yn);
    }
    series(p, x)
}

/// H⁽¹⁾_p(x) = (J_{-p}(x) - e^{-iπp} J_p(x)) / (i sin pπ).
pub fn hankel1(p: f64, x: f64) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(DswError::Domain(format!("hankel1 needs x > 0, got {x}")));
    }
    let (s, _) = sin_cos_pi(p);
    if s == 0.0 {
        return Err(DswError::Pole { re: p, im: 0.0 });
    }
    let jp = bessel_j(p, x)?;
    let jm = bessel_j(-p, x)?;
    Ok((jm - exp_i_pi(-p) * jp) / Complex64::new(0.0, s))
}

/// Spherical Hankel function h⁽¹⁾_j(x) = √(π/(2x)) H⁽¹⁾_{j+1/2}(x).
pub fn spherical_hankel1(j: u32, x: f64) -> Result<Complex64> {
    Ok((PI / (2.0 * x)).sqrt() * hankel1(j as f64 + 0.5, x)?)
}
