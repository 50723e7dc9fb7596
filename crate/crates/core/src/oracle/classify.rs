//! Singular points of y'' + P y' + Q y = 0 with rational P, Q whose
//! denominators are given in factored form.
//!
//! Fixture schema (JSON). Rationals are strings such as `"-3/4"` or integers:
//!
//! ```json
//! {
//!   "name": "...", "description": "...", "variable": "z",
//!   "p": {"numerator": ["3", "-5"],
//!         "denominator": {"constant": "-2",
//!                         "factors": [{"root": "0", "power": 1}, {"root": "1", "power": 1}]}},
//!   "q": {"numerator": [...], "denominator": {...}}
//! }
//! ```
//!
//! Numerators list coefficients in ascending powers. A denominator given as
//! `{"coefficients": [...]}` of positive degree is rejected.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{DswError, Result};

/// The bundled de Sitter fixture (z = r², ε = 10, m = 5, j = 1).
pub const DE_SITTER_FIXTURE: &str = include_str!("../../fixtures/de_sitter.json");
/// The bundled four-point fixture.
pub const SCHWARZSCHILD_LIKE_FIXTURE: &str = include_str!("../../fixtures/schwarzschild_like.json");

/// Linear factor (x − root)^power of a denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor<T> {
    pub root: T,
    pub power: u32,
}

impl<T> Factor<T> {
    pub fn new(root: T, power: u32) -> Self {
        Factor { root, power }
    }
}

/// numerator(x) / (constant · Π (x − root)^power)
#[derive(Debug, Clone, PartialEq)]
pub struct PolyRatio<T> {
    /// Ascending powers.
    pub numerator: Vec<T>,
    pub constant: T,
    pub factors: Vec<Factor<T>>,
}

impl PolyRatio<f64> {
    pub fn eval(&self, x: f64) -> f64 {
        let num = self.numerator.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        let den = self.factors.iter().fold(self.constant, |acc, f| {
            acc * (x - f.root).powi(f.power as i32)
        });
        num / den
    }

    pub fn to_exact(&self) -> Result<PolyRatio<BigRational>> {
        let q = |x: f64| {
            BigRational::from_float(x)
                .ok_or_else(|| DswError::Invalid(format!("{x} is not finite")))
        };
        Ok(PolyRatio {
            numerator: self
                .numerator
                .iter()
                .map(|&c| q(c))
                .collect::<Result<_>>()?,
            constant: q(self.constant)?,
            factors: self
                .factors
                .iter()
                .map(|f| Ok(Factor::new(q(f.root)?, f.power)))
                .collect::<Result<_>>()?,
        })
    }
}

impl PolyRatio<BigRational> {
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let num = horner(&self.numerator, x);
        let den = self.factors.iter().fold(self.constant.clone(), |acc, f| {
            acc * (x - &f.root).pow(f.power as i32)
        });
        num / den
    }

    pub fn to_f64(&self) -> PolyRatio<f64> {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        PolyRatio {
            numerator: self.numerator.iter().map(f).collect(),
            constant: f(&self.constant),
            factors: self
                .factors
                .iter()
                .map(|g| Factor::new(f(&g.root), g.power))
                .collect(),
        }
    }
}

/// Coefficient data for y'' + P y' + Q y = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeCoefficients<T> {
    pub name: String,
    pub variable: String,
    pub p: PolyRatio<T>,
    pub q: PolyRatio<T>,
}

impl OdeCoefficients<f64> {
    pub fn to_exact(&self) -> Result<OdeCoefficients<BigRational>> {
        Ok(OdeCoefficients {
            name: self.name.clone(),
            variable: self.variable.clone(),
            p: self.p.to_exact()?,
            q: self.q.to_exact()?,
        })
    }
}

impl OdeCoefficients<BigRational> {
    pub fn to_f64(&self) -> OdeCoefficients<f64> {
        OdeCoefficients {
            name: self.name.clone(),
            variable: self.variable.clone(),
            p: self.p.to_f64(),
            q: self.q.to_f64(),
        }
    }
}

fn horner(c: &[BigRational], x: &BigRational) -> BigRational {
    c.iter()
        .rev()
        .fold(BigRational::zero(), |acc, k| acc * x + k)
}

fn trimmed(c: &[BigRational]) -> &[BigRational] {
    let n = c.iter().rposition(|k| !k.is_zero()).map_or(0, |i| i + 1);
    &c[..n]
}

/// Divide by (x − root) as often as it divides exactly; returns the quotient
/// and the multiplicity.
fn deflate(c: &[BigRational], root: &BigRational) -> (Vec<BigRational>, u32) {
    let mut cur = trimmed(c).to_vec();
    let mut mult = 0;
    while !cur.is_empty() && horner(&cur, root).is_zero() {
        // synthetic division, highest power first
        let mut q = vec![BigRational::zero(); cur.len() - 1];
        let mut carry = BigRational::zero();
        for i in (1..cur.len()).rev() {
            carry = &cur[i] + carry * root;
            q[i - 1] = carry.clone();
        }
        cur = q;
        mult += 1;
    }
    (cur, mult)
}

// ---------------------------------------------------------------- report

#[derive(Debug, Clone, PartialEq)]
pub enum Location {
    Finite(BigRational),
    Infinity,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Finite(x) => write!(f, "{x}"),
            Location::Infinity => f.write_str("infinity"),
        }
    }
}

impl Serialize for Location {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Regular,
    Irregular,
}

/// Root of the indicial equation: exact when the discriminant is a rational
/// square, otherwise a double-precision complex number.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Rational(BigRational),
    Complex(Complex64),
}

impl Exponent {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Exponent::Rational(q) => Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0),
            Exponent::Complex(z) => *z,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Rational(q) => write!(f, "{q}"),
            Exponent::Complex(z) => write!(f, "{:.17e}{:+.17e}i", z.re, z.im),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularPoint {
    pub location: Location,
    pub kind: PointKind,
    /// Indicial exponents, present for regular singular points.
    pub exponents: Option<[Exponent; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    HypergeometricClass,
    HeunClass,
    Other(usize),
}

impl Classification {
    pub fn count(&self) -> usize {
        match self {
            Classification::HypergeometricClass => 3,
            Classification::HeunClass => 4,
            Classification::Other(n) => *n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    pub name: String,
    /// Finite points in increasing order, then infinity when singular.
    pub points: Vec<SingularPoint>,
    pub includes_infinity: bool,
    pub all_regular: bool,
    pub classification: Classification,
}

// ---------------------------------------------------------------- analysis

/// Pole order of `r` at `x0` and its leading Laurent coefficient at that order.
fn local_order(r: &PolyRatio<BigRational>, x0: &BigRational) -> (i64, BigRational) {
    let (num, s) = deflate(&r.numerator, x0);
    if num.is_empty() {
        return (i64::MIN, BigRational::zero());
    }
    let mut k = 0i64;
    let mut den = r.constant.clone();
    for f in &r.factors {
        if &f.root == x0 {
            k += f.power as i64;
        } else {
            den *= (x0 - &f.root).pow(f.power as i32);
        }
    }
    (k - s as i64, horner(&num, x0) / den)
}

/// Degree excess deg(num) − deg(den) and the ratio of leading coefficients.
fn degree_at_infinity(r: &PolyRatio<BigRational>) -> (i64, BigRational) {
    let num = trimmed(&r.numerator);
    if num.is_empty() {
        return (i64::MIN, BigRational::zero());
    }
    let den_deg: i64 = r.factors.iter().map(|f| f.power as i64).sum();
    (
        (num.len() as i64 - 1) - den_deg,
        num[num.len() - 1].clone() / &r.constant,
    )
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

/// Roots of ρ² + (p0 − 1)ρ + q0 = 0, larger real part first.
fn indicial(p0: &BigRational, q0: &BigRational) -> [Exponent; 2] {
    let one = BigRational::from_integer(BigInt::from(1));
    let two = BigRational::from_integer(BigInt::from(2));
    let b = p0 - &one;
    let disc = &b * &b - BigRational::from_integer(BigInt::from(4)) * q0;
    if let Some(s) = rational_sqrt(&disc) {
        return [
            Exponent::Rational((-&b + &s) / &two),
            Exponent::Rational((-&b - &s) / &two),
        ];
    }
    let bf = b.to_f64().unwrap_or(f64::NAN);
    let df = disc.to_f64().unwrap_or(f64::NAN);
    let s = Complex64::new(df, 0.0).sqrt();
    [
        Exponent::Complex((-bf + s) / 2.0),
        Exponent::Complex((-bf - s) / 2.0),
    ]
}

fn check_denominator(r: &PolyRatio<BigRational>, which: &str) -> Result<()> {
    if r.constant.is_zero() {
        return Err(DswError::Invalid(format!(
            "{which}: denominator constant is zero"
        )));
    }
    if let Some(f) = r.factors.iter().find(|f| f.power == 0) {
        return Err(DswError::Invalid(format!(
            "{which}: factor at {} has power 0",
            f.root
        )));
    }
    Ok(())
}

/// Locate the singular points, test each with the Fuchs pole-order bounds,
/// compute indicial exponents at the regular ones and classify by count.
pub fn classify_singularities(coeffs: &OdeCoefficients<BigRational>) -> Result<SingularityReport> {
    check_denominator(&coeffs.p, "P")?;
    check_denominator(&coeffs.q, "Q")?;
    let candidates: BTreeSet<BigRational> = coeffs
        .p
        .factors
        .iter()
        .chain(&coeffs.q.factors)
        .map(|f| f.root.clone())
        .collect();

    let mut points = Vec::new();
    for x0 in candidates {
        let (kp, lp) = local_order(&coeffs.p, &x0);
        let (kq, lq) = local_order(&coeffs.q, &x0);
        if kp <= 0 && kq <= 0 {
            continue;
        }
        let regular = kp <= 1 && kq <= 2;
        let exponents = regular.then(|| {
            let p0 = if kp == 1 { lp } else { BigRational::zero() };
            let q0 = if kq == 2 { lq } else { BigRational::zero() };
            indicial(&p0, &q0)
        });
        let kind = if regular {
            PointKind::Regular
        } else {
            PointKind::Irregular
        };
        points.push(SingularPoint {
            location: Location::Finite(x0),
            kind,
            exponents,
        });
    }

    // t = 1/x: P̃ = 2/t − x²P, Q̃ = x⁴Q.
    let two = BigRational::from_integer(BigInt::from(2));
    let (dp, lp) = degree_at_infinity(&coeffs.p);
    let (dq, lq) = degree_at_infinity(&coeffs.q);
    let lim_xp = if dp == -1 { lp } else { BigRational::zero() };
    // Ordinary iff P = 2/x + O(1/x²) and Q = O(1/x⁴).
    let ordinary = dp == -1 && lim_xp == two && dq <= -4;
    let includes_infinity = !ordinary;
    if includes_infinity {
        let regular = dp <= -1 && dq <= -2;
        let exponents = regular.then(|| {
            let lim_x2q = if dq == -2 { lq } else { BigRational::zero() };
            indicial(&(two - lim_xp), &lim_x2q)
        });
        let kind = if regular {
            PointKind::Regular
        } else {
            PointKind::Irregular
        };
        points.push(SingularPoint {
            location: Location::Infinity,
            kind,
            exponents,
        });
    }

    let all_regular = points.iter().all(|p| p.kind == PointKind::Regular);
    let n = points.len();
    let classification = match (all_regular, n) {
        (true, 3) => Classification::HypergeometricClass,
        (true, 4) => Classification::HeunClass,
        _ => Classification::Other(n),
    };
    Ok(SingularityReport {
        name: coeffs.name.clone(),
        points,
        includes_infinity,
        all_regular,
        classification,
    })
}

// ---------------------------------------------------------------- fixtures

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalText {
    Int(i64),
    Text(String),
}

fn parse_rational(t: &RationalText) -> Result<BigRational> {
    match t {
        RationalText::Int(n) => Ok(BigRational::from_integer(BigInt::from(*n))),
        RationalText::Text(s) => {
            let s = s.trim();
            if let Ok(q) = BigRational::from_str(s) {
                return Ok(q);
            }
            // plain decimals such as "-0.25"
            let (neg, body) = s.strip_prefix('-').map_or((false, s), |b| (true, b));
            let (int, frac) = body
                .split_once('.')
                .ok_or_else(|| DswError::Invalid(format!("bad rational {s:?}")))?;
            let digits = format!("{int}{frac}");
            let n = BigInt::from_str(&digits)
                .map_err(|_| DswError::Invalid(format!("bad rational {s:?}")))?;
            let q = BigRational::new(n, BigInt::from(10).pow(frac.len() as u32));
            Ok(if neg { -q } else { q })
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorText {
    root: RationalText,
    power: u32,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DenominatorText {
    Factored {
        #[serde(default)]
        constant: Option<RationalText>,
        factors: Vec<FactorText>,
    },
    Expanded {
        coefficients: Vec<RationalText>,
    },
}

#[derive(Deserialize)]
struct RatioText {
    numerator: Vec<RationalText>,
    denominator: DenominatorText,
}

#[derive(Deserialize)]
struct FixtureText {
    name: String,
    #[serde(default)]
    #[allow(dead_code)]
    description: String,
    #[serde(default = "default_variable")]
    variable: String,
    p: RatioText,
    q: RatioText,
}

fn default_variable() -> String {
    "x".into()
}

fn ratio_from_text(t: &RatioText, which: &str) -> Result<PolyRatio<BigRational>> {
    let numerator = t
        .numerator
        .iter()
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    let (constant, factors) = match &t.denominator {
        DenominatorText::Factored { constant, factors } => {
            let c = constant.as_ref().map_or(
                Ok(BigRational::from_integer(BigInt::from(1))),
                parse_rational,
            )?;
            let fs = factors
                .iter()
                .map(|f| Ok(Factor::new(parse_rational(&f.root)?, f.power)))
                .collect::<Result<Vec<_>>>()?;
            (c, fs)
        }
        DenominatorText::Expanded { coefficients } => {
            let c = coefficients
                .iter()
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            let c = trimmed(&c);
            if c.len() > 1 {
                return Err(DswError::UnfactoredInput(format!(
                    "{which}: denominator of degree {} must be given as linear factors",
                    c.len() - 1
                )));
            }
            let k = c
                .first()
                .cloned()
                .ok_or_else(|| DswError::Invalid(format!("{which}: zero denominator")))?;
            (k, Vec::new())
        }
    };
    Ok(PolyRatio {
        numerator,
        constant,
        factors,
    })
}

/// Parse a fixture document in the schema described at the top of this module.
pub fn parse_fixture(json: &str) -> Result<OdeCoefficients<BigRational>> {
    let t: FixtureText =
        serde_json::from_str(json).map_err(|e| DswError::Invalid(format!("fixture: {e}")))?;
    Ok(OdeCoefficients {
        name: t.name,
        variable: t.variable,
        p: ratio_from_text(&t.p, "P")?,
        q: ratio_from_text(&t.q, "Q")?,
    })
}
