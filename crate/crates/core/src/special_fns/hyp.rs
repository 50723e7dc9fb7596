//! Gauss hypergeometric function 2F1(a, b; c; z) for complex parameters.

use num_complex::Complex64;

use super::gamma::{is_pole, log_gamma};
use super::SeriesControl;
use crate::error::{DswError, Result};

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypRoute {
    /// Gauss series about z = 0.
    Direct,
    /// Kummer connection to the two series about z = 1.
    Connection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypValue {
    pub value: Complex64,
    /// Rounding-error estimate in absolute terms.
    pub error_estimate: f64,
    pub route: HypRoute,
}

struct Partial {
    sum: Complex64,
    abs_sum: f64,
}

fn series(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<Partial> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    let mut quiet = 0;
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        term *= ratio;
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(DswError::Overflow(format!(
                "2F1 series term {n} at z = {z}"
            )));
        }
        if term.re == 0.0 && term.im == 0.0 {
            return Ok(Partial { sum, abs_sum });
        }
        sum += term;
        abs_sum += term.norm();
        if term.norm() <= ctl.rel_tol * sum.norm() && ratio.norm() < 1.0 {
            quiet += 1;
            if quiet >= 2 {
                return Ok(Partial { sum, abs_sum });
            }
        } else {
            quiet = 0;
        }
    }
    Err(DswError::NonConvergence {
        terms: ctl.max_terms,
    })
}

/// Gauss series re-summed in software floating point with `bits` of
/// mantissa, for when the double pass cancels heavily.
fn series_wide(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    bits: usize,
    max_terms: usize,
) -> Result<Complex64> {
    use astro_float::{BigFloat, RoundingMode};
    const RM: RoundingMode = RoundingMode::ToEven;
    let p = bits;
    let big = |x: f64| BigFloat::from_f64(x, p);
    let mul = |(ar, ai): &(BigFloat, BigFloat), (br, bi): &(BigFloat, BigFloat)| {
        (
            ar.mul(br, p, RM).sub(&ai.mul(bi, p, RM), p, RM),
            ar.mul(bi, p, RM).add(&ai.mul(br, p, RM), p, RM),
        )
    };
    let mag = |(re, im): &(BigFloat, BigFloat)| {
        let e = |x: &BigFloat| {
            if x.is_zero() {
                i64::MIN
            } else {
                x.exponent().map_or(i64::MIN, i64::from)
            }
        };
        e(re).max(e(im))
    };
    let zz = (big(z.re), big(z.im));
    let mut term = (big(1.0), big(0.0));
    let mut sum = term.clone();
    let mut quiet = 0;
    for n in 0..max_terms {
        let nf = n as f64;
        let an = (big(a.re).add(&big(nf), p, RM), big(a.im));
        let bn = (big(b.re).add(&big(nf), p, RM), big(b.im));
        let (cr, ci) = (big(c.re).add(&big(nf), p, RM), big(c.im));
        let num = mul(&mul(&an, &bn), &zz);
        // divide by (c + n)(n + 1)
        let d = cr
            .mul(&cr, p, RM)
            .add(&ci.mul(&ci, p, RM), p, RM)
            .mul(&big(nf + 1.0), p, RM);
        let (nr, ni) = mul(&num, &(cr.clone(), ci.neg()));
        term = mul(&term, &(nr.div(&d, p, RM), ni.div(&d, p, RM)));
        sum = (sum.0.add(&term.0, p, RM), sum.1.add(&term.1, p, RM));
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        if mag(&term) == i64::MIN
            || (mag(&term) < mag(&sum) - bits as i64 - 4 && ratio.norm() < 1.0)
        {
            quiet += 1;
            if quiet >= 2 || mag(&term) == i64::MIN {
                let f = |x: &BigFloat| x.to_string().parse::<f64>().unwrap_or(f64::NAN);
                return Ok(Complex64::new(f(&sum.0), f(&sum.1)));
            }
        } else {
            quiet = 0;
        }
    }
    Err(DswError::NonConvergence { terms: max_terms })
}

/// Digits the double-precision sum may lose before the wide pass takes over.
const CANCELLATION_LIMIT: f64 = 1e3;

/// [`series`], re-summed at higher precision when the terms cancel by more
/// than [`CANCELLATION_LIMIT`]; the returned `abs_sum` then reflects the
/// accuracy actually achieved.
fn accurate_series(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<Partial> {
    let p = series(a, b, c, z, ctl)?;
    let size = p.sum.norm();
    if !(p.abs_sum > CANCELLATION_LIMIT * size) || size == 0.0 {
        return Ok(p);
    }
    // the double sum understates the loss when it is itself mostly rounding
    // error, so re-estimate from each wide result until the precision covers it
    let bits_for = |size: f64| 80 + (p.abs_sum / size).log2().ceil().max(0.0) as usize;
    let mut bits = bits_for(size);
    loop {
        let sum = series_wide(a, b, c, z, bits, ctl.max_terms)?;
        if !(sum.re.is_finite() && sum.im.is_finite()) {
            return Ok(p);
        }
        let needed = if sum.norm() > 0.0 {
            bits_for(sum.norm())
        } else {
            2 * bits
        };
        if needed <= bits {
            return Ok(Partial {
                sum,
                abs_sum: sum.norm(),
            });
        }
        if bits > 4096 {
            // keep the pessimistic magnitude so callers see the loss
            return Ok(Partial {
                sum,
                abs_sum: p.abs_sum,
            });
        }
        bits = needed + 16;
    }
}

fn direct(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<HypValue> {
    let p = accurate_series(a, b, c, z, ctl)?;
    Ok(HypValue {
        value: p.sum,
        error_estimate: 2.0 * f64::EPSILON * p.abs_sum + ctl.rel_tol * p.sum.norm(),
        route: HypRoute::Direct,
    })
}

fn is_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re.fract() == 0.0
}

/// Sum of log-Gamma terms with their magnitudes; `None` when a denominator
/// argument sits on a pole (the whole coefficient is then zero).
fn log_coefficient(num: [Complex64; 2], den: [Complex64; 2]) -> Result<Option<(Complex64, f64)>> {
    if den.iter().any(|&d| is_pole(d)) {
        return Ok(None);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut size = 0.0;
    for x in num {
        let l = log_gamma(x)?;
        acc += l;
        size += l.norm();
    }
    for x in den {
        let l = log_gamma(x)?;
        acc -= l;
        size += l.norm();
    }
    Ok(Some((acc, size)))
}

fn connection(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    w: Complex64,
    ctl: &SeriesControl,
) -> Result<Option<HypValue>> {
    let d = c - a - b;
    if is_integer(d) {
        return Ok(None);
    }
    let eps = f64::EPSILON;
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;

    if let Some((l1, s1)) = log_coefficient([c, d], [c - a, c - b])? {
        if l1.re > 700.0 {
            return Ok(None);
        }
        let p = accurate_series(a, b, 1.0 - d, w, ctl)?;
        let t = l1.exp();
        value += t * p.sum;
        err += t.norm() * (p.abs_sum + p.sum.norm() * s1) * eps;
    }
    if let Some((l2, s2)) = log_coefficient([c, -d], [a, b])? {
        let lw = d * w.ln();
        let l = l2 + lw;
        if l.re > 700.0 {
            return Ok(None);
        }
        let p = accurate_series(c - a, c - b, 1.0 + d, w, ctl)?;
        let t = l.exp();
        value += t * p.sum;
        err += t.norm() * (p.abs_sum + p.sum.norm() * (s2 + lw.norm())) * eps;
    }
    Ok(Some(HypValue {
        value,
        error_estimate: 2.0 * err + ctl.rel_tol * value.norm(),
        route: HypRoute::Connection,
    }))
}

/// 2F1(a, b; c; z) with its error estimate and route, taking 1 - z separately
/// so callers near z = 1 can supply it without cancellation.
pub fn hyp2f1_estimate(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    one_minus_z: Complex64,
    ctl: &SeriesControl,
) -> Result<HypValue> {
    if is_pole(c) {
        return Err(DswError::pole(c));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(HypValue {
            value: Complex64::new(1.0, 0.0),
            error_estimate: 0.0,
            route: HypRoute::Direct,
        });
    }
    if one_minus_z.re == 0.0 && one_minus_z.im == 0.0 {
        return Err(DswError::Domain("2F1 at z = 1".into()));
    }
    let r = z.norm();
    if r <= ctl.connection_threshold {
        return match direct(a, b, c, z, ctl) {
            Err(DswError::NonConvergence { .. }) if one_minus_z.norm() < 1.0 => {
                connection(a, b, c, one_minus_z, ctl)?.ok_or(DswError::NonConvergence {
                    terms: ctl.max_terms,
                })
            }
            // cancellation in the Gauss series: let the z = 1 side compete
            Ok(d)
                if d.error_estimate > 1e3 * f64::EPSILON * d.value.norm()
                    && one_minus_z.norm() < 1.0 =>
            {
                match connection(a, b, c, one_minus_z, ctl) {
                    Ok(Some(k)) if k.error_estimate < d.error_estimate => Ok(k),
                    _ => Ok(d),
                }
            }
            other => other,
        };
    }
    if one_minus_z.norm() >= 1.0 {
        if r < 1.0 {
            return direct(a, b, c, z, ctl);
        }
        return Err(DswError::Domain(format!(
            "2F1 continuation to z = {z} is not supported"
        )));
    }
    let conn = connection(a, b, c, one_minus_z, ctl);
    // The Gauss series is only worth trying while it still converges quickly,
    // or when the connection is unavailable.
    let need_direct = r < 0.9
        || match &conn {
            Ok(Some(k)) => k.error_estimate > 1e3 * f64::EPSILON * k.value.norm(),
            _ => true,
        };
    let fallback = if need_direct {
        direct(a, b, c, z, ctl).ok()
    } else {
        None
    };
    match (conn, fallback) {
        (Ok(Some(k)), Some(d)) => Ok(if d.error_estimate < k.error_estimate {
            d
        } else {
            k
        }),
        (Ok(Some(k)), None) => Ok(k),
        (Ok(None), Some(d)) | (Err(_), Some(d)) => Ok(d),
        (Ok(None), None) => Err(DswError::NonConvergence {
            terms: ctl.max_terms,
        }),
        (Err(e), None) => Err(e),
    }
}

/// Gauss hypergeometric function 2F1(a, b; c; z).
///
/// The series about z = 0 is used for |z| up to `ctl.connection_threshold`;
/// beyond that the value comes from the Kummer connection to the two
/// solutions about z = 1, unless that route is degenerate or less accurate.
pub fn hyp2f1(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    Ok(hyp2f1_estimate(a, b, c, z, 1.0 - z, ctl)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_argument() {
        let v = hyp2f1(
            c(3.0, 1.0),
            c(-2.0, 5.0),
            c(1.5, 0.0),
            c(0.0, 0.0),
            &SeriesControl::default(),
        )
        .unwrap();
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn log_closed_form() {
        let ctl = SeriesControl::default();
        for z in [0.1, 0.5, 0.75, 0.95] {
            let v = hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(z, 0.0), &ctl).unwrap();
            let want = -(-z).ln_1p() / z;
            assert!((v.re - want).abs() < 1e-13 * want, "z={z}: {v}");
        }
    }

    #[test]
    fn closed_form_through_connection() {
        // F(a, b; b; z) = (1 - z)^{-a}; c - a - b = -a is not an integer here.
        let ctl = SeriesControl::default();
        let a = c(0.3, -2.0);
        let b = c(1.7, 0.4);
        for z in [0.6, 0.8, 0.99] {
            let v = hyp2f1_estimate(a, b, b, c(z, 0.0), c(1.0 - z, 0.0), &ctl).unwrap();
            let want = (-a * (1.0 - z).ln()).exp();
            assert!((v.value - want).norm() < 1e-13 * want.norm(), "z={z}");
        }
    }

    #[test]
    fn terminating_series() {
        // a = -2: 1 + 2(b/c)(-z)... F(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
        let ctl = SeriesControl::default();
        let (b, cc, z) = (c(0.5, 1.0), c(2.5, 0.0), c(0.3, 0.0));
        let want = 1.0 - 2.0 * b * z / cc + b * (b + 1.0) * z * z / (cc * (cc + 1.0));
        let v = hyp2f1(c(-2.0, 0.0), b, cc, z, &ctl).unwrap();
        assert!((v - want).norm() < 1e-15);
    }

    #[test]
    fn pole_in_c() {
        let r = hyp2f1(
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(-3.0, 0.0),
            c(0.2, 0.0),
            &SeriesControl::default(),
        );
        assert!(matches!(r, Err(DswError::Pole { .. })));
    }

    #[test]
    fn series_budget_exhausted() {
        let ctl = SeriesControl::new(1e-15, 5).unwrap();
        let r = hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.4, 0.0), &ctl);
        assert!(matches!(r, Err(DswError::NonConvergence { terms: 5 })));
    }
}
