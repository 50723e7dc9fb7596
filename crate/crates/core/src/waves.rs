//! Exact hypergeometric waves: standing waves regular or singular at the
//! origin, running waves with pure phase at the horizon, the connection
//! between them and the flat-space limit.
//!
//! With z = r², the standing waves are
//! f = z^{j/2} (1 − z)^{−iε/2} F(a, b; c; z) and
//! g = z^{−(j+1)/2} (1 − z)^{−iε/2} F(α, β; γ; z), where
//! a = (3/2 + j + iS − iε)/2, b = (3/2 + j − iS − iε)/2, c = j + 3/2,
//! α = a − c + 1, β = b − c + 1, γ = 1/2 − j and S = √(m² − 1/4).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DswError, Result};
use crate::model::{phi, HorizonUnitsParams};
use crate::special_fns::{
    exp_i_pi, gamma, gamma_ratio, hankel1, hyp2f1_estimate, ln_gamma_ratio, log_gamma,
    SeriesControl,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// f ~ r^j at the origin
    Regular,
    /// g ~ r^{−(j+1)} at the origin
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Out,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    StandingRegular,
    StandingSingular,
    RunningOut,
    RunningIn,
}

/// Hypergeometric parameters and exponents of one wave family: the
/// standing wave is z^κ (1 − z)^σ F(a, b; c; z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveAnsatz {
    pub family: Family,
    pub j: u32,
    pub epsilon: f64,
    pub m: f64,
    pub kappa: f64,
    pub sigma: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

fn i(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

/// S = √(m² − 1/4), rejecting m² <= 1/4.
pub fn mass_root(m: f64) -> Result<f64> {
    let m2 = m * m;
    if m2 <= 0.25 {
        return Err(DswError::UnsupportedMass { m2 });
    }
    Ok(((m - 0.5) * (m + 0.5)).sqrt())
}

pub fn make_ansatz(hp: &HorizonUnitsParams, family: Family) -> Result<WaveAnsatz> {
    let s = mass_root(hp.m)?;
    let j = hp.j as f64;
    let eps = hp.epsilon;
    let a = Complex64::new(0.75 + 0.5 * j, 0.5 * (s - eps));
    let b = Complex64::new(0.75 + 0.5 * j, -0.5 * (s + eps));
    let c = Complex64::new(j + 1.5, 0.0);
    let sigma = i(-0.5 * eps);
    Ok(match family {
        Family::Regular => WaveAnsatz {
            family,
            j: hp.j,
            epsilon: eps,
            m: hp.m,
            kappa: 0.5 * j,
            sigma,
            a,
            b,
            c,
        },
        Family::Singular => WaveAnsatz {
            family,
            j: hp.j,
            epsilon: eps,
            m: hp.m,
            kappa: -0.5 * (j + 1.0),
            sigma,
            a: a - c + 1.0,
            b: b - c + 1.0,
            c: Complex64::new(0.5 - j, 0.0),
        },
    })
}

fn check_open(r: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero {
        (0.0..1.0).contains(&r)
    } else {
        r > 0.0 && r < 1.0
    };
    if !ok {
        return Err(DswError::Domain(format!(
            "radius {r} outside the static patch"
        )));
    }
    Ok(())
}

/// z^κ (1 − z)^{σ} evaluated from r without forming 1 − z by subtraction.
fn prefactor(kappa: f64, sigma: Complex64, r: f64) -> Complex64 {
    let zk = r.powi((2.0 * kappa).round() as i32);
    zk * (sigma * phi(r).ln()).exp()
}

fn hyp(a: Complex64, b: Complex64, c: Complex64, z: f64, one_minus_z: f64) -> Result<Complex64> {
    let ctl = SeriesControl::default();
    Ok(hyp2f1_estimate(a, b, c, z.into(), one_minus_z.into(), &ctl)?.value)
}

/// Standing wave f (regular family) or g (singular family) at radius r.
pub fn eval_standing(ans: &WaveAnsatz, r: f64) -> Result<Complex64> {
    check_open(r, ans.family == Family::Regular)?;
    if r == 0.0 {
        return Ok(Complex64::new(if ans.j == 0 { 1.0 } else { 0.0 }, 0.0));
    }
    let z = r * r;
    Ok(prefactor(ans.kappa, ans.sigma, r) * hyp(ans.a, ans.b, ans.c, z, phi(r))?)
}

/// Standing wave and its r-derivative.
pub fn eval_standing_with_derivative(ans: &WaveAnsatz, r: f64) -> Result<(Complex64, Complex64)> {
    check_open(r, false)?;
    let z = r * r;
    let one_minus = phi(r);
    let pre = prefactor(ans.kappa, ans.sigma, r);
    let f = pre * hyp(ans.a, ans.b, ans.c, z, one_minus)?;
    let shifted = hyp(ans.a + 1.0, ans.b + 1.0, ans.c + 1.0, z, one_minus)?;
    let dfdz = f * (ans.kappa / z - ans.sigma / one_minus) + pre * ans.a * ans.b / ans.c * shifted;
    Ok((f, 2.0 * r * dfdz))
}

/// Running wave z^κ (1 − z)^{∓iε/2} F(·, ·; ·; 1 − z), outgoing or incoming.
pub fn eval_running(ans: &WaveAnsatz, direction: Direction, r: f64) -> Result<Complex64> {
    check_open(r, false)?;
    let z = r * r;
    let one_minus = phi(r);
    let (a, b, c) = (ans.a, ans.b, ans.c);
    Ok(match direction {
        Direction::Out => {
            prefactor(ans.kappa, ans.sigma, r) * hyp(a, b, a + b - c + 1.0, one_minus, z)?
        }
        Direction::In => {
            prefactor(ans.kappa, -ans.sigma, r) * hyp(c - a, c - b, c - a - b + 1.0, one_minus, z)?
        }
    })
}

/// standing = to_out · U_out + to_in · U_in
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionCoefficients {
    pub to_out: Complex64,
    pub to_in: Complex64,
}

fn gamma_quotient(num: [Complex64; 2], den: [Complex64; 2]) -> Result<Complex64> {
    let l = log_gamma(num[0])? + log_gamma(num[1])? - log_gamma(den[0])? - log_gamma(den[1])?;
    if l.re > 709.0 {
        return Err(DswError::Overflow(format!(
            "connection coefficient exp({l})"
        )));
    }
    Ok(l.exp())
}

/// Γ(c)Γ(c − a − b)/(Γ(c − a)Γ(c − b)) and Γ(c)Γ(a + b − c)/(Γ(a)Γ(b)).
pub fn connect(ans: &WaveAnsatz) -> Result<ConnectionCoefficients> {
    let (a, b, c) = (ans.a, ans.b, ans.c);
    Ok(ConnectionCoefficients {
        to_out: gamma_quotient([c, c - a - b], [c - a, c - b])?,
        to_in: gamma_quotient([c, a + b - c], [a, b])?,
    })
}

/// |standing − (to_out U_out + to_in U_in)| / |standing| at r.
pub fn connection_residual(ans: &WaveAnsatz, cc: &ConnectionCoefficients, r: f64) -> Result<f64> {
    let s = eval_standing(ans, r)?;
    let rebuilt = cc.to_out * eval_running(ans, Direction::Out, r)?
        + cc.to_in * eval_running(ans, Direction::In, r)?;
    Ok((s - rebuilt).norm() / s.norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub kind: WaveKind,
    pub r: Vec<f64>,
    pub value: Vec<Complex64>,
}

pub fn wave_profile(hp: &HorizonUnitsParams, kind: WaveKind, grid: &[f64]) -> Result<WaveProfile> {
    let family = if kind == WaveKind::StandingSingular {
        Family::Singular
    } else {
        Family::Regular
    };
    let ans = make_ansatz(hp, family)?;
    let value = grid
        .iter()
        .map(|&r| match kind {
            WaveKind::StandingRegular | WaveKind::StandingSingular => eval_standing(&ans, r),
            WaveKind::RunningOut => eval_running(&ans, Direction::Out, r),
            WaveKind::RunningIn => eval_running(&ans, Direction::In, r),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WaveProfile {
        kind,
        r: grid.to_vec(),
        value,
    })
}

// ---------------------------------------------------------------- flat limit

/// The factor A and the coefficients with A·U_out = α′ f + β′ g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationFactor {
    pub a: Complex64,
    pub alpha_prime: Complex64,
    pub beta_prime: Complex64,
}

/// Exact A = Γ(w_a + 1/4)Γ(w_b + 1/4)/Γ(w_a + w_b + 1) and
/// α′ = Γ(−p) Π Γ(w + 1/4)/Γ(w + (1 − p)/2), β′ = Γ(p) Π Γ(w + 1/4)/Γ(w + (1 + p)/2)
/// over w ∈ {w_a, w_b}, where a = (1 + p)/2 + w_a and b = (1 + p)/2 + w_b.
///
/// A itself under- or overflows once |ε − S| is large; α′ and β′ stay finite.
pub fn flat_normalization(hp: &HorizonUnitsParams) -> Result<NormalizationFactor> {
    let s = mass_root(hp.m)?;
    let p = hp.p();
    let wa = i(0.5 * (s - hp.epsilon));
    let wb = i(-0.5 * (s + hp.epsilon));
    let q = Complex64::new(0.25, 0.0);
    let lo = Complex64::new(0.5 * (1.0 - p), 0.0);
    let hi = Complex64::new(0.5 * (1.0 + p), 0.0);
    let alpha_prime =
        gamma(Complex64::new(-p, 0.0))? * gamma_ratio(wa, q, lo)? * gamma_ratio(wb, q, lo)?;
    let beta_prime =
        gamma(Complex64::new(p, 0.0))? * gamma_ratio(wa, q, hi)? * gamma_ratio(wb, q, hi)?;
    let ln_a = log_gamma(wa + q)? + ln_gamma_ratio(wb, q, wa + 1.0)?;
    let a = if ln_a.re.abs() < 700.0 {
        ln_a.exp()
    } else {
        Complex64::new(f64::NAN, f64::NAN)
    };
    Ok(NormalizationFactor {
        a,
        alpha_prime,
        beta_prime,
    })
}

/// e^{−iπ(p + 1/2)/2} √(2/(kr)) H⁽¹⁾_p(kr), the Minkowski outgoing wave.
pub fn flat_limit_reference(hp: &HorizonUnitsParams, k: f64, r: f64) -> Result<Complex64> {
    if hp.epsilon.abs() <= hp.m {
        return Err(DswError::EvanescentMode { mu: hp.mu() });
    }
    let p = hp.p();
    let x = k * r;
    Ok(exp_i_pi(-0.5 * (p + 0.5)) * (2.0 / x).sqrt() * hankel1(p, x)?)
}

/// A·U_out / (−π e^{iπp}) at radius r, the quantity that tends to the
/// reference wave as R → ∞. Small z goes through α′ f + β′ g.
pub fn flat_limit_normalized(
    hp: &HorizonUnitsParams,
    nf: &NormalizationFactor,
    r: f64,
) -> Result<Complex64> {
    let p = hp.p();
    let scale = -std::f64::consts::PI * exp_i_pi(p);
    let v = if r * r <= 0.5 {
        let f = eval_standing(&make_ansatz(hp, Family::Regular)?, r)?;
        let g = eval_standing(&make_ansatz(hp, Family::Singular)?, r)?;
        nf.alpha_prime * f + nf.beta_prime * g
    } else {
        if !(nf.a.re.is_finite() && nf.a.im.is_finite()) {
            return Err(DswError::Overflow(
                "normalization factor A is out of range".into(),
            ));
        }
        nf.a * eval_running(&make_ansatz(hp, Family::Regular)?, Direction::Out, r)?
    };
    Ok(v / scale)
}

/// Largest relative deviation from the reference wave over the given kr values.
pub fn flat_limit_deviation(hp: &HorizonUnitsParams, kr: &[f64]) -> Result<f64> {
    let k = hp.wave_number()?;
    let nf = flat_normalization(hp)?;
    let mut worst = 0.0f64;
    for &x in kr {
        let r = x / k;
        let exact = flat_limit_normalized(hp, &nf, r)?;
        let reference = flat_limit_reference(hp, k, r)?;
        worst = worst.max((exact - reference).norm() / reference.norm());
    }
    Ok(worst)
}

/// How the energy is tied to the curvature radius in a flat-limit sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatSweep {
    /// Fixed μ > 1 with λ = 1; kR grows with R.
    FixedEnergy { mu: f64 },
    /// kR = j at every radius, the regime where εR ≫ j fails.
    HorizonMomentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatLimitRow {
    pub radius_over_lambda: f64,
    pub deviation: f64,
}

/// Deviation table over R/λ at fixed kr, rows sorted by R/λ.
pub fn flat_limit_convergence(
    sweep: FlatSweep,
    j: u32,
    radii: &[f64],
    kr: &[f64],
) -> Result<Vec<FlatLimitRow>> {
    let mut rows = radii
        .iter()
        .map(|&m| {
            let epsilon = match sweep {
                FlatSweep::FixedEnergy { mu } => {
                    if mu <= 1.0 {
                        return Err(DswError::EvanescentMode { mu });
                    }
                    mu * m
                }
                FlatSweep::HorizonMomentum => {
                    if j == 0 {
                        return Err(DswError::Invalid("kR = j needs j >= 1".into()));
                    }
                    (m * m + (j * j) as f64).sqrt()
                }
            };
            let hp = HorizonUnitsParams::new(epsilon, m, j)?;
            Ok(FlatLimitRow {
                radius_over_lambda: m,
                deviation: flat_limit_deviation(&hp, kr)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.radius_over_lambda.total_cmp(&b.radius_over_lambda));
    Ok(rows)
}
