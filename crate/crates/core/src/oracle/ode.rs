//! Adaptive Dormand–Prince 5(4) integration and Frobenius starting data.

use num_complex::Complex64;

use super::classify::{OdeCoefficients, PolyRatio};
use crate::error::{DswError, Result};

/// Local error control: each step keeps |err_i| <= atol + rtol·|y_i|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeTolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        OdeTolerance {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

/// Environment variable that replaces the default relative tolerance.
pub const TOLERANCE_ENV: &str = "DSW_TOL";

impl OdeTolerance {
    /// Default tolerance with `rtol` taken from `DSW_TOL` when set; `atol`
    /// follows at 1% of it.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOLERANCE_ENV) {
            Ok(v) => {
                let rtol: f64 = v.trim().parse().map_err(|_| {
                    DswError::Invalid(format!("{TOLERANCE_ENV} = {v:?} is not a number"))
                })?;
                Self::relative(rtol)
            }
            Err(std::env::VarError::NotPresent) => Ok(Self::default()),
            Err(e) => Err(DswError::Invalid(format!("{TOLERANCE_ENV}: {e}"))),
        }
    }

    /// `rtol` as given, `atol` at 1% of it.
    pub fn relative(rtol: f64) -> Result<Self> {
        if !(rtol > 0.0 && rtol.is_finite()) {
            return Err(DswError::Invalid(format!(
                "tolerance must be positive, got {rtol}"
            )));
        }
        Ok(OdeTolerance {
            rtol,
            atol: 1e-2 * rtol,
            ..Default::default()
        })
    }

    /// Same relative and absolute tolerance.
    pub fn uniform(tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(DswError::Invalid(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        Ok(OdeTolerance {
            rtol: tol,
            atol: tol,
            ..Default::default()
        })
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn finite<const N: usize>(y: &[Complex64; N]) -> bool {
    y.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Integrate y' = f(x, y) from (x0, y0) and return y at each sample point.
///
/// Samples must be ordered away from x0 in one direction; steps are clamped
/// so every sample is hit exactly.
pub fn dopri5<const N: usize, F>(
    mut f: F,
    x0: f64,
    y0: [Complex64; N],
    samples: &[f64],
    tol: &OdeTolerance,
) -> Result<Vec<[Complex64; N]>>
where
    F: FnMut(f64, &[Complex64; N]) -> [Complex64; N],
{
    let Some(&last) = samples.last() else {
        return Ok(Vec::new());
    };
    let dir = if last >= x0 { 1.0 } else { -1.0 };
    let mut prev = x0;
    for &s in samples {
        if (s - prev) * dir < 0.0 || !s.is_finite() {
            return Err(DswError::Invalid(
                "sample points must move monotonically away from x0".into(),
            ));
        }
        prev = s;
    }

    let mut x = x0;
    let mut y = y0;
    let mut k0 = f(x, &y);
    let span = (last - x0).abs();
    let mut h = (1e-3 * span).max(1e-12);
    let mut out = Vec::with_capacity(samples.len());
    let mut next = 0;
    let mut steps = 0;

    while next < samples.len() {
        if samples[next] == x {
            out.push(y);
            next += 1;
            continue;
        }
        steps += 1;
        if steps > tol.max_steps {
            return Err(DswError::StepFailure {
                at: x,
                reason: format!("exceeded {} steps", tol.max_steps),
            });
        }
        let target = samples[next];
        let clamped = h >= (target - x).abs();
        let step = if clamped { target - x } else { dir * h };
        if step.abs() <= 1e-14 * x.abs().max(1.0) && !clamped {
            return Err(DswError::StepFailure {
                at: x,
                reason: "step size underflow".into(),
            });
        }

        let mut k = [[Complex64::new(0.0, 0.0); N]; 7];
        k[0] = k0;
        for s in 1..7 {
            let mut ys = y;
            for i in 0..N {
                let mut acc = Complex64::new(0.0, 0.0);
                for (r, kr) in k.iter().enumerate().take(s) {
                    acc += A[s][r] * kr[i];
                }
                ys[i] += step * acc;
            }
            k[s] = f(x + C[s] * step, &ys);
        }
        let mut y_new = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut e = Complex64::new(0.0, 0.0);
            for s in 0..6 {
                acc += A[6][s] * k[s][i];
            }
            for s in 0..7 {
                e += E[s] * k[s][i];
            }
            y_new[i] = y[i] + step * acc;
            let scale = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max((step * e).norm() / scale);
        }
        if !finite(&y_new) || !err.is_finite() {
            if h.abs() < 1e-14 {
                return Err(DswError::StepFailure {
                    at: x,
                    reason: "non-finite solution".into(),
                });
            }
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            x = if clamped { target } else { x + step };
            y = y_new;
            k0 = k[6];
            if clamped {
                out.push(y);
                next += 1;
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        // A clamped step says nothing about the natural step size when it was shortened.
        if !(clamped && err <= 1.0 && factor > 1.0) {
            h = step.abs() * factor;
        }
        if h < 1e-14 * x.abs().max(1.0) {
            return Err(DswError::StepFailure {
                at: x,
                reason: "step size underflow".into(),
            });
        }
    }
    Ok(out)
}

/// Solution value and derivative at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSample {
    pub x: f64,
    pub y: Complex64,
    pub dy: Complex64,
}

/// y'' + P y' + Q y = 0 with initial data at x0.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeProblem {
    pub coefficients: OdeCoefficients<f64>,
    pub x0: f64,
    pub y0: Complex64,
    pub dy0: Complex64,
}

fn poles(r: &PolyRatio<f64>) -> impl Iterator<Item = f64> + '_ {
    r.factors.iter().map(|f| f.root)
}

/// Integrate an [`OdeProblem`] to the given points.
pub fn integrate(prob: &OdeProblem, targets: &[f64], tol: &OdeTolerance) -> Result<Vec<OdeSample>> {
    let c = &prob.coefficients;
    let (lo, hi) = targets
        .iter()
        .fold((prob.x0, prob.x0), |(a, b), &t| (a.min(t), b.max(t)));
    if let Some(s) = poles(&c.p).chain(poles(&c.q)).find(|&s| s >= lo && s <= hi) {
        return Err(DswError::StepFailure {
            at: s,
            reason: "integration path meets a singular point".into(),
        });
    }
    let rhs = |x: f64, y: &[Complex64; 2]| [y[1], -c.p.eval(x) * y[1] - c.q.eval(x) * y[0]];
    let ys = dopri5(rhs, prob.x0, [prob.y0, prob.dy0], targets, tol)?;
    Ok(targets
        .iter()
        .zip(ys)
        .map(|(&x, y)| OdeSample {
            x,
            y: y[0],
            dy: y[1],
        })
        .collect())
}

/// Frobenius starting point: x = singular point + offset, series through
/// degree `terms − 1`. Two nonzero terms are enough for even equations at
/// offset 1e−3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrobeniusLaunch {
    pub offset: f64,
    pub terms: usize,
}

impl Default for FrobeniusLaunch {
    fn default() -> Self {
        FrobeniusLaunch {
            offset: 1e-3,
            terms: 3,
        }
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of p(x0 + t) in t.
fn taylor_shift(c: &[f64], x0: f64) -> Vec<f64> {
    let mut out = vec![0.0; c.len().max(1)];
    for &coef in c.iter().rev() {
        // out = out·(t + x0) + coef
        let mut next = vec![0.0; out.len()];
        for i in 0..out.len() {
            next[i] += out[i] * x0;
            if i + 1 < out.len() {
                next[i + 1] += out[i];
            }
        }
        next[0] += coef;
        out = next;
    }
    out
}

/// Power series of (x − x0)^shift · r(x) about x0, `n` coefficients.
fn local_series(r: &PolyRatio<f64>, x0: f64, shift: u32, n: usize) -> Result<Vec<f64>> {
    let mut den = vec![r.constant];
    let mut at_x0 = 0;
    for f in &r.factors {
        if f.root == x0 {
            at_x0 += f.power;
        } else {
            for _ in 0..f.power {
                den = poly_mul(&den, &[x0 - f.root, 1.0]);
            }
        }
    }
    if at_x0 > shift {
        return Err(DswError::Domain(format!(
            "{x0} is not a regular singular point"
        )));
    }
    let num = taylor_shift(&r.numerator, x0);
    let lead = (shift - at_x0) as usize;
    let mut q = vec![0.0; n];
    for i in 0..n.saturating_sub(lead) {
        let mut acc = num.get(i).copied().unwrap_or(0.0);
        for j in 1..=i.min(den.len() - 1) {
            acc -= den[j] * q[lead + i - j];
        }
        q[lead + i] = acc / den[0];
    }
    Ok(q)
}

/// Frobenius coefficients c_0 = 1, c_1, … for the exponent `rho` at the
/// regular singular point `x0`.
pub fn frobenius_coefficients(
    coeffs: &OdeCoefficients<f64>,
    x0: f64,
    rho: f64,
    terms: usize,
) -> Result<Vec<f64>> {
    let p = local_series(&coeffs.p, x0, 1, terms)?;
    let q = local_series(&coeffs.q, x0, 2, terms)?;
    let ind = |s: f64| s * (s - 1.0) + p[0] * s + q[0];
    if ind(rho).abs() > 1e-9 * (1.0 + rho * rho) {
        return Err(DswError::Invalid(format!(
            "{rho} is not an indicial exponent (residual {})",
            ind(rho)
        )));
    }
    let mut c = vec![0.0; terms];
    c[0] = 1.0;
    for n in 1..terms {
        let mut rhs = 0.0;
        for k in 1..=n {
            rhs -= c[n - k] * ((rho + (n - k) as f64) * p[k] + q[k]);
        }
        let d = ind(rho + n as f64);
        if d.abs() < 1e-12 {
            if rhs.abs() > 1e-12 {
                return Err(DswError::Invalid(format!("logarithmic case at term {n}")));
            }
            c[n] = 0.0;
        } else {
            c[n] = rhs / d;
        }
    }
    Ok(c)
}

/// Initial value problem started just off `x0` on the Frobenius branch `rho`.
pub fn frobenius_problem(
    coeffs: &OdeCoefficients<f64>,
    x0: f64,
    rho: f64,
    launch: &FrobeniusLaunch,
) -> Result<OdeProblem> {
    let c = frobenius_coefficients(coeffs, x0, rho, launch.terms.max(1))?;
    let t = launch.offset;
    let (mut y, mut dy) = (0.0, 0.0);
    for (n, cn) in c.iter().enumerate() {
        let s = rho + n as f64;
        y += cn * t.powf(s);
        dy += cn * s * t.powf(s - 1.0);
    }
    Ok(OdeProblem {
        coefficients: coeffs.clone(),
        x0: x0 + t,
        y0: Complex64::new(y, 0.0),
        dy0: Complex64::new(dy, 0.0),
    })
}
