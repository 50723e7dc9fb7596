//! Extended-precision reference values for the double-precision special
//! functions, by direct summation in software floating point.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{DswError, Result};

const RM: RoundingMode = RoundingMode::ToEven;
const MAX_TERMS: usize = 200_000;

struct Ctx {
    p: usize,
    cc: Consts,
}

#[derive(Clone, Debug)]
struct X {
    re: BigFloat,
    im: BigFloat,
}

impl Ctx {
    fn new(digits: usize) -> Result<Self> {
        let cc = Consts::new()
            .map_err(|e| DswError::Invalid(format!("extended precision constants: {e:?}")))?;
        Ok(Ctx {
            p: (digits as f64 * 3.33).ceil() as usize + 64,
            cc,
        })
    }

    fn real(&self, x: f64) -> X {
        X {
            re: BigFloat::from_f64(x, self.p),
            im: BigFloat::from_f64(0.0, self.p),
        }
    }

    fn c(&self, z: Complex64) -> X {
        X {
            re: BigFloat::from_f64(z.re, self.p),
            im: BigFloat::from_f64(z.im, self.p),
        }
    }

    fn int(&self, n: i64) -> X {
        X {
            re: BigFloat::from_i64(n, self.p),
            im: BigFloat::from_i64(0, self.p),
        }
    }

    fn big_int(&mut self, n: &BigInt) -> BigFloat {
        BigFloat::parse(&n.to_string(), Radix::Dec, self.p, RM, &mut self.cc)
    }

    fn rational(&mut self, q: &BigRational) -> X {
        let n = self.big_int(q.numer());
        let d = self.big_int(q.denom());
        X {
            re: n.div(&d, self.p, RM),
            im: BigFloat::from_i64(0, self.p),
        }
    }

    fn add(&self, a: &X, b: &X) -> X {
        X {
            re: a.re.add(&b.re, self.p, RM),
            im: a.im.add(&b.im, self.p, RM),
        }
    }

    fn sub(&self, a: &X, b: &X) -> X {
        X {
            re: a.re.sub(&b.re, self.p, RM),
            im: a.im.sub(&b.im, self.p, RM),
        }
    }

    fn mul(&self, a: &X, b: &X) -> X {
        let p = self.p;
        X {
            re: a.re.mul(&b.re, p, RM).sub(&a.im.mul(&b.im, p, RM), p, RM),
            im: a.re.mul(&b.im, p, RM).add(&a.im.mul(&b.re, p, RM), p, RM),
        }
    }

    fn div(&self, a: &X, b: &X) -> X {
        let p = self.p;
        let d = b.re.mul(&b.re, p, RM).add(&b.im.mul(&b.im, p, RM), p, RM);
        let re = a.re.mul(&b.re, p, RM).add(&a.im.mul(&b.im, p, RM), p, RM);
        let im = a.im.mul(&b.re, p, RM).sub(&a.re.mul(&b.im, p, RM), p, RM);
        X {
            re: re.div(&d, p, RM),
            im: im.div(&d, p, RM),
        }
    }

    fn norm(&self, a: &X) -> BigFloat {
        let p = self.p;
        a.re.mul(&a.re, p, RM)
            .add(&a.im.mul(&a.im, p, RM), p, RM)
            .sqrt(p, RM)
    }

    fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        let p = self.p;
        let pi = self.cc.pi(p, RM);
        if x.is_zero() {
            let half = pi.div(&BigFloat::from_i64(2, p), p, RM);
            return if y.is_negative() {
                half.neg()
            } else if y.is_zero() {
                BigFloat::from_i64(0, p)
            } else {
                half
            };
        }
        let t = y.div(x, p, RM).atan(p, RM, &mut self.cc);
        if x.is_positive() {
            t
        } else if y.is_negative() {
            t.sub(&pi, p, RM)
        } else {
            t.add(&pi, p, RM)
        }
    }

    /// Principal logarithm.
    fn ln(&mut self, a: &X) -> X {
        let r = self.norm(a);
        X {
            re: r.ln(self.p, RM, &mut self.cc),
            im: self.atan2(&a.im, &a.re),
        }
    }

    fn exp(&mut self, a: &X) -> X {
        let p = self.p;
        let m = a.re.exp(p, RM, &mut self.cc);
        let (s, c) = (a.im.sin(p, RM, &mut self.cc), a.im.cos(p, RM, &mut self.cc));
        X {
            re: m.mul(&c, p, RM),
            im: m.mul(&s, p, RM),
        }
    }

    /// Binary exponent of the larger component; None for zero.
    fn magnitude(a: &X) -> Option<i64> {
        let e = |x: &BigFloat| {
            if x.is_zero() {
                None
            } else {
                x.exponent().map(|e| e as i64)
            }
        };
        match (e(&a.re), e(&a.im)) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        }
    }

    /// True when `term` no longer changes `sum` at the working precision.
    fn negligible(&self, term: &X, sum: &X) -> bool {
        match (Self::magnitude(term), Self::magnitude(sum)) {
            (None, _) => true,
            (Some(t), Some(s)) => t < s - self.p as i64 - 8,
            (Some(_), None) => false,
        }
    }
}

fn bernoulli_even(count: usize) -> Vec<BigRational> {
    // B_0 … B_{2·count} by the standard recurrence; returns B_2, B_4, …
    let n_max = 2 * count;
    let mut b: Vec<BigRational> = Vec::with_capacity(n_max + 1);
    b.push(BigRational::one());
    for m in 1..=n_max {
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    (1..=count).map(|k| b[2 * k].clone()).collect()
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn ln_gamma(ctx: &mut Ctx, z: Complex64, digits: usize) -> Result<X> {
    if is_nonpositive_integer(z) {
        return Err(DswError::pole(z));
    }
    // Shift until Stirling's series reaches the target precision.
    let target = (digits as f64).max(20.0) + 10.0;
    let shift = if z.norm() >= target && z.re > 0.0 {
        0
    } else {
        (target - z.re).max(0.0).ceil() as i64
    };
    let zx = ctx.c(z);
    let mut log_prod = ctx.int(0);
    for k in 0..shift {
        let t = ctx.add(&zx, &ctx.int(k));
        let l = ctx.ln(&t);
        log_prod = ctx.add(&log_prod, &l);
    }
    let w = ctx.add(&zx, &ctx.int(shift));
    let lw = ctx.ln(&w);
    let half = ctx.real(0.5);
    let pi = X {
        re: ctx.cc.pi(ctx.p, RM),
        im: BigFloat::from_i64(0, ctx.p),
    };
    let two_pi = ctx.add(&pi, &pi);
    let ln_two_pi = ctx.ln(&two_pi);
    let mut sum = ctx.sub(&ctx.mul(&ctx.sub(&w, &half), &lw), &w);
    sum = ctx.add(&sum, &ctx.mul(&half, &ln_two_pi));
    let w2 = ctx.mul(&w, &w);
    let mut wpow = w.clone();
    let count = (digits / 2).max(40);
    let bern = bernoulli_even(count);
    let mut converged = false;
    for (i, b) in bern.iter().enumerate() {
        let k = (i + 1) as i64;
        let coef =
            ctx.rational(&(b / BigRational::from_integer(BigInt::from(2 * k * (2 * k - 1)))));
        let term = ctx.div(&coef, &wpow);
        sum = ctx.add(&sum, &term);
        if ctx.negligible(&term, &sum) {
            converged = true;
            break;
        }
        wpow = ctx.mul(&wpow, &w2);
    }
    if !converged {
        return Err(DswError::NonConvergence { terms: count });
    }
    Ok(ctx.sub(&sum, &log_prod))
}

fn hyp2f1(ctx: &mut Ctx, a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<X> {
    if is_nonpositive_integer(c) {
        return Err(DswError::pole(c));
    }
    if z.norm() >= 1.0 {
        return Err(DswError::Domain(format!(
            "extended 2F1 series needs |z| < 1, got {z}"
        )));
    }
    let (a, b, c, z) = (ctx.c(a), ctx.c(b), ctx.c(c), ctx.c(z));
    let mut term = ctx.int(1);
    let mut sum = term.clone();
    let mut quiet = 0;
    for n in 0..MAX_TERMS as i64 {
        let nx = ctx.int(n);
        let num = ctx.mul(&ctx.add(&a, &nx), &ctx.add(&b, &nx));
        let den = ctx.mul(&ctx.add(&c, &nx), &ctx.int(n + 1));
        term = ctx.mul(&ctx.div(&num, &den), &ctx.mul(&term, &z));
        sum = ctx.add(&sum, &term);
        if ctx.negligible(&term, &sum) {
            quiet += 1;
            if quiet >= 2 || Ctx::magnitude(&term).is_none() {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(DswError::NonConvergence { terms: MAX_TERMS })
}

fn bessel_j(ctx: &mut Ctx, p: f64, x: f64, digits: usize) -> Result<X> {
    if !(x > 0.0) {
        return Err(DswError::Domain(format!(
            "extended Bessel series needs x > 0, got {x}"
        )));
    }
    // 1/Γ(p + 1) vanishes at the poles; the series then starts at n = −p.
    let lead = if is_nonpositive_integer(Complex64::new(p + 1.0, 0.0)) {
        return Err(DswError::Domain(
            "integer negative order: use J_{-n} = (-1)^n J_n".into(),
        ));
    } else {
        let lg = ln_gamma(ctx, Complex64::new(p + 1.0, 0.0), digits)?;
        let half_x = ctx.real(0.5 * x);
        let l = ctx.ln(&half_x);
        let e = ctx.sub(&ctx.mul(&ctx.real(p), &l), &lg);
        ctx.exp(&e)
    };
    let q = ctx.real(-0.25 * x * x);
    let mut term = lead;
    let mut sum = term.clone();
    let pp = ctx.real(p);
    for n in 0..MAX_TERMS as i64 {
        let den = ctx.mul(&ctx.int(n + 1), &ctx.add(&pp, &ctx.int(n + 1)));
        term = ctx.div(&ctx.mul(&term, &q), &den);
        sum = ctx.add(&sum, &term);
        if (n as f64 + 1.0) > 0.5 * x && ctx.negligible(&term, &sum) {
            return Ok(sum);
        }
    }
    Err(DswError::NonConvergence { terms: MAX_TERMS })
}

/// Which function to evaluate, with its arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedArgs {
    LogGamma(Complex64),
    Gamma(Complex64),
    Hyp2f1 {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        z: Complex64,
    },
    Bessel {
        p: f64,
        x: f64,
    },
}

/// A complex value carried at extended precision.
#[derive(Debug, Clone)]
pub struct ExtendedValue {
    re: BigFloat,
    im: BigFloat,
    pub digits: usize,
}

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.to_string().parse().unwrap_or(f64::NAN)
}

impl ExtendedValue {
    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    /// Decimal renderings of the real and imaginary parts.
    pub fn to_strings(&self) -> (String, String) {
        (self.re.to_string(), self.im.to_string())
    }

    /// −log10 of the relative difference, capped at the smaller precision.
    pub fn agreeing_digits(&self, other: &ExtendedValue) -> f64 {
        let digits = self.digits.min(other.digits);
        let Ok(mut ctx) = Ctx::new(digits.max(self.digits).max(other.digits)) else {
            return 0.0;
        };
        let a = X {
            re: self.re.clone(),
            im: self.im.clone(),
        };
        let b = X {
            re: other.re.clone(),
            im: other.im.clone(),
        };
        let d = ctx.norm(&ctx.sub(&a, &b));
        let s = ctx.norm(&b);
        if d.is_zero() {
            return digits as f64;
        }
        if s.is_zero() {
            return 0.0;
        }
        let rel = d.div(&s, ctx.p, RM);
        let l = rel.log10(ctx.p, RM, &mut ctx.cc);
        (-to_f64(&l)).min(digits as f64)
    }
}

/// Evaluate by exhaustive summation with `digits` significant decimal
/// digits (at least 30).
pub fn extended_series(args: &ExtendedArgs, digits: usize) -> Result<ExtendedValue> {
    if digits < 30 {
        return Err(DswError::Invalid(format!(
            "extended precision needs at least 30 digits, got {digits}"
        )));
    }
    let mut ctx = Ctx::new(digits)?;
    let v = match *args {
        ExtendedArgs::LogGamma(z) => ln_gamma(&mut ctx, z, digits)?,
        ExtendedArgs::Gamma(z) => {
            let l = ln_gamma(&mut ctx, z, digits)?;
            ctx.exp(&l)
        }
        ExtendedArgs::Hyp2f1 { a, b, c, z } => hyp2f1(&mut ctx, a, b, c, z)?,
        ExtendedArgs::Bessel { p, x } => bessel_j(&mut ctx, p, x, digits)?,
    };
    if v.re.is_nan() || v.im.is_nan() {
        return Err(DswError::Overflow(
            "extended evaluation produced NaN".into(),
        ));
    }
    Ok(ExtendedValue {
        re: v.re,
        im: v.im,
        digits,
    })
}

/// The exact value of `s` (a decimal string) at the given precision, for
/// comparing against known constants.
pub fn extended_constant(s: &str, digits: usize) -> Result<ExtendedValue> {
    let mut ctx = Ctx::new(digits)?;
    let re = BigFloat::parse(s, Radix::Dec, ctx.p, RM, &mut ctx.cc);
    if re.is_nan() {
        return Err(DswError::Invalid(format!("cannot parse {s:?}")));
    }
    Ok(ExtendedValue {
        re,
        im: BigFloat::from_i64(0, ctx.p),
        digits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const SQRT_PI: &str = "1.7724538509055160272981674833411451827975494561223871282138";
    const TWO_LN2: &str = "1.3862943611198906188344642429163531361510002687205105082413";

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli_even(3);
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(b, vec![q(1, 6), q(-1, 30), q(1, 42)]);
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let v = extended_series(&ExtendedArgs::Gamma(c(0.5, 0.0)), 30).unwrap();
        let want = extended_constant(SQRT_PI, 50).unwrap();
        assert!(v.agreeing_digits(&want) >= 30.0);
    }

    #[test]
    fn log_closed_form_hyp() {
        let args = ExtendedArgs::Hyp2f1 {
            a: c(1.0, 0.0),
            b: c(1.0, 0.0),
            c: c(2.0, 0.0),
            z: c(0.5, 0.0),
        };
        let v = extended_series(&args, 30).unwrap();
        assert!(v.agreeing_digits(&extended_constant(TWO_LN2, 50).unwrap()) >= 30.0);
    }

    #[test]
    fn bessel_half_order() {
        // J_{1/2}(x) = √(2/(πx)) sin x
        let x = 2.0;
        let v = extended_series(&ExtendedArgs::Bessel { p: 0.5, x }, 30)
            .unwrap()
            .to_complex64();
        let want = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
        assert!((v.re - want).abs() < 1e-16);
    }

    #[test]
    fn precision_floor() {
        assert!(extended_series(&ExtendedArgs::Gamma(c(1.0, 0.0)), 20).is_err());
        assert!(matches!(
            extended_series(&ExtendedArgs::Gamma(c(-2.0, 0.0)), 30),
            Err(DswError::Pole { .. })
        ));
    }
}
