//! Expansion of the exact waves in the small parameter X = λ/R.
//!
//! Lengths here are in units of λ: the curvature radius is R = 1/X, the
//! wave number is k = √(μ² − 1), and a physical radius r sits at
//! z = X² r² in the hypergeometric variable.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One};
use serde::{Deserialize, Serialize};

use crate::error::{DswError, Result};
use crate::model::{HorizonUnitsParams, ModelParams};
use crate::special_fns::{
    bessel_j, exp_i_pi, gamma_ratio_asymptotic, gamma_real, hankel1, spherical_hankel1, RatioOrder,
};
use crate::waves::{
    eval_standing, flat_normalization, make_ansatz, Direction, Family, NormalizationFactor,
};

/// Largest X for which the expansion is evaluated.
pub const MAX_X: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionParams {
    /// X = λ/R
    pub x: f64,
    /// Y = R/(2λ)
    pub y: f64,
    /// k = √(μ² − 1) in units of 1/λ
    pub k: f64,
    pub mu: f64,
    pub j: u32,
    /// p = j + 1/2
    pub p: f64,
}

impl ExpansionParams {
    pub fn new(x: f64, mu: f64, j: u32) -> Result<Self> {
        if !(x > 0.0 && x <= MAX_X) {
            return Err(DswError::Validity(format!(
                "X = {x} must lie in (0, {MAX_X}]"
            )));
        }
        if !(mu > 1.0) {
            return Err(DswError::EvanescentMode { mu });
        }
        Ok(ExpansionParams {
            x,
            y: 0.5 / x,
            k: ((mu - 1.0) * (mu + 1.0)).sqrt(),
            mu,
            j,
            p: j as f64 + 0.5,
        })
    }

    pub fn from_model(p: &ModelParams) -> Result<Self> {
        Self::new(p.lambda / p.radius, p.mu, p.j)
    }

    /// X·Y in exact arithmetic, Y taken as 1/(2X) of the stored X.
    pub fn xy_exact(&self) -> BigRational {
        let x = BigRational::from_f64(self.x).unwrap_or_else(BigRational::one);
        let y = (BigRational::from_integer(2.into()) * &x).recip();
        x * y
    }

    /// ε = μ/X, m = 1/X in horizon units.
    pub fn horizon(&self) -> Result<HorizonUnitsParams> {
        HorizonUnitsParams::new(self.mu / self.x, 1.0 / self.x, self.j)
    }
}

/// Both sides of (1 + p) + (3 + p) + … + (1 + p + 2n) = (n + 1)(n + 1 + p).
pub fn sum_identity(n: u64, p: &BigRational) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let mut lhs = BigRational::from_integer(0.into());
    for i in 0..=n {
        lhs += &one + p + BigRational::from_integer((2 * i).into());
    }
    let n1 = BigRational::from_integer((n + 1).into());
    let rhs = &n1 * (&n1 + p);
    (lhs, rhs)
}

/// The regular-family parameter a from its exact definition, with
/// S − 1/X formed without cancellation.
pub fn parameter_a_exact(ep: &ExpansionParams) -> Complex64 {
    let inv = 1.0 / ep.x;
    let s = ((inv - 0.5) * (inv + 0.5)).sqrt();
    let s_minus = -0.25 / (s + inv);
    Complex64::new(0.5 * (1.0 + ep.p), 0.5 * (s_minus - (ep.mu - 1.0) * inv))
}

/// a ≈ (1 + p)/2 − i(μ − 1)/(2X) − iX/16, accurate to O(X³).
pub fn parameter_a_expansion(ep: &ExpansionParams) -> Complex64 {
    Complex64::new(
        0.5 * (1.0 + ep.p),
        -0.5 * (ep.mu - 1.0) / ep.x - ep.x / 16.0,
    )
}

fn check_small(x: f64, r: f64) -> Result<f64> {
    let s = 0.5 * x * r * r;
    if 2.0 * s > 0.1 {
        return Err(DswError::Validity(format!(
            "r^2/(lambda R) = {} exceeds 0.1",
            2.0 * s
        )));
    }
    Ok(s)
}

/// (1 − r²/R²)^{∓iμR/(2λ)} expanded through (r²/λR)²:
/// 1 ± iμs − μ²s²/2 ± iμXs² with s = r²/(2λR); `Out` takes the upper sign
/// (exponent −iμR/(2λ)). `r` is in units of λ.
pub fn exponential_factor_expansion(
    mu: f64,
    x: f64,
    r: f64,
    direction: Direction,
) -> Result<Complex64> {
    let s = check_small(x, r)?;
    let sign = if direction == Direction::Out {
        1.0
    } else {
        -1.0
    };
    Ok(Complex64::new(
        1.0 - 0.5 * mu * mu * s * s,
        sign * (mu * s + mu * x * s * s),
    ))
}

/// The exact principal-branch power that [`exponential_factor_expansion`] truncates.
pub fn exponential_factor_exact(mu: f64, x: f64, r: f64, direction: Direction) -> Complex64 {
    let z = x * x * r * r;
    let sign = if direction == Direction::Out {
        -1.0
    } else {
        1.0
    };
    Complex64::new(0.0, sign * 0.5 * mu / x * (-z).ln_1p()).exp()
}

/// Order-by-order profiles of the hypergeometric factors of f and g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionDecomposition {
    pub r: Vec<f64>,
    /// Γ(1 + p)(kr/2)^{−p} J_p(kr)
    pub f0: Vec<f64>,
    /// (−k²r²/4)(2iμ/(μ² − 1)) F̄₀
    pub f1: Vec<Complex64>,
    /// (F̄ − F̄₀ − X F̄₁)/X²
    pub f2_residual: Vec<Complex64>,
    /// Γ(1 − p)(kr/2)^{p} J_{−p}(kr)
    pub g0: Vec<f64>,
    pub g1: Vec<Complex64>,
    pub g2_residual: Vec<Complex64>,
}

fn sign_p(ep: &ExpansionParams, family: Family) -> f64 {
    if family == Family::Regular {
        ep.p
    } else {
        -ep.p
    }
}

/// F̄₀ (regular) or Ḡ₀ (singular) at radius r.
pub fn order0(ep: &ExpansionParams, family: Family, r: f64) -> Result<f64> {
    let q = sign_p(ep, family);
    let x = ep.k * r;
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(gamma_real(1.0 + q)? * (0.5 * x).powf(-q) * bessel_j(q, x)?)
}

/// F̄₁ or Ḡ₁ from the closed form (−k²r²/4)(2iμ/(μ² − 1)) × order 0.
pub fn order1(ep: &ExpansionParams, family: Family, r: f64) -> Result<Complex64> {
    let w = -0.25 * ep.k * ep.k * r * r;
    Ok(Complex64::new(0.0, 2.0 * ep.mu / (ep.k * ep.k)) * w * order0(ep, family, r)?)
}

/// Terms T_n = w^n/((1 ± p)_n n!) of the order-0 series, w = −k²r²/4.
fn order0_terms(ep: &ExpansionParams, family: Family, r: f64) -> Vec<f64> {
    let q = sign_p(ep, family);
    let w = -0.25 * ep.k * ep.k * r * r;
    let mut t = 1.0;
    let mut out = vec![t];
    for n in 0..400 {
        let nf = n as f64;
        t *= w / ((1.0 + q + nf) * (nf + 1.0));
        out.push(t);
        if t.abs() < 1e-18 * out.iter().map(|v| v.abs()).fold(0.0, f64::max) && nf > w.abs().sqrt()
        {
            break;
        }
    }
    out
}

/// F̄₁ or Ḡ₁ summed term by term: Σ_n T_n Σ_{i<n} 2iμ(1 ± p + 2i)/(μ² − 1),
/// without using the closed form of the inner sum.
pub fn order1_series(ep: &ExpansionParams, family: Family, r: f64) -> Complex64 {
    let q = sign_p(ep, family);
    let mut total = 0.0;
    let mut inner = 0.0;
    for (n, t) in order0_terms(ep, family, r).into_iter().enumerate() {
        total += t * inner;
        inner += 1.0 + q + 2.0 * n as f64;
    }
    Complex64::new(0.0, 2.0 * ep.mu / (ep.k * ep.k) * total)
}

/// F̄₂ or Ḡ₂ from the explicit second-order coefficients, term n carrying
/// T_n [e₂(u_0 … u_{n−1}) + Σ v_i] with u_i = 2iμ(1 ± p + 2i)/(μ² − 1) and
/// v_i = −((1 ± p + 2i)² − 1/4)/(μ² − 1).
pub fn order2_series(ep: &ExpansionParams, family: Family, r: f64) -> Complex64 {
    let q = sign_p(ep, family);
    let k2 = ep.k * ep.k;
    let mut total = Complex64::new(0.0, 0.0);
    let (mut e1, mut e2, mut vsum) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
    for (n, t) in order0_terms(ep, family, r).into_iter().enumerate() {
        total += t * (e2 + vsum);
        let s = 1.0 + q + 2.0 * n as f64;
        let u = Complex64::new(0.0, 2.0 * ep.mu * s / k2);
        e2 += e1 * u;
        e1 += u;
        vsum -= (s * s - 0.25) / k2;
    }
    total
}

/// The exact hypergeometric factor F(a, b; c; X²r²) or F(α, β; γ; X²r²).
pub fn exact_factor(ep: &ExpansionParams, family: Family, r: f64) -> Result<Complex64> {
    let hp = ep.horizon()?;
    let ans = make_ansatz(&hp, family)?;
    let rh = ep.x * r;
    if rh == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // strip z^κ (1 − z)^σ from the standing wave
    let pre = rh.powi((2.0 * ans.kappa).round() as i32) * (ans.sigma * (-(rh * rh)).ln_1p()).exp();
    Ok(eval_standing(&ans, rh)? / pre)
}

pub fn decompose_hypergeometric(
    ep: &ExpansionParams,
    r_grid: &[f64],
) -> Result<ExpansionDecomposition> {
    let x2 = ep.x * ep.x;
    let mut d = ExpansionDecomposition {
        r: r_grid.to_vec(),
        f0: Vec::new(),
        f1: Vec::new(),
        f2_residual: Vec::new(),
        g0: Vec::new(),
        g1: Vec::new(),
        g2_residual: Vec::new(),
    };
    for &r in r_grid {
        for fam in [Family::Regular, Family::Singular] {
            let o0 = order0(ep, fam, r)?;
            let o1 = order1(ep, fam, r)?;
            let res = (exact_factor(ep, fam, r)? - o0 - ep.x * o1) / x2;
            let (v0, v1, v2) = match fam {
                Family::Regular => (&mut d.f0, &mut d.f1, &mut d.f2_residual),
                Family::Singular => (&mut d.g0, &mut d.g1, &mut d.g2_residual),
            };
            v0.push(o0);
            v1.push(o1);
            v2.push(res);
        }
    }
    Ok(d)
}

/// (1 − z)^{−iμ/(2X)} (F̄₀ + X F̄₁) expanded and truncated at s²; real by
/// construction of the orders, which the imaginary part checks.
pub fn assembled_approximant(ep: &ExpansionParams, family: Family, r: f64) -> Result<Complex64> {
    let s = check_small(ep.x, r)?;
    let o0 = Complex64::new(order0(ep, family, r)?, 0.0);
    if s == 0.0 {
        return Ok(o0);
    }
    let phi1 = ep.x * order1(ep, family, r)? / s;
    let i_mu = Complex64::new(0.0, ep.mu);
    Ok(o0 + s * (i_mu * o0 + phi1) + s * s * (-0.5 * ep.mu * ep.mu * o0 + i_mu * phi1))
}

/// α′ and β′ from the leading large-|w| Γ ratios, w_a = −i(μ − 1)/(2X),
/// w_b = −i(μ + 1)/(2X); `a` is left as the exact factor.
pub fn normalization_zero_order(ep: &ExpansionParams) -> Result<NormalizationFactor> {
    let p = ep.p;
    let wa = Complex64::new(0.0, -0.5 * (ep.mu - 1.0) / ep.x);
    let wb = Complex64::new(0.0, -0.5 * (ep.mu + 1.0) / ep.x);
    let q = Complex64::new(0.25, 0.0);
    let lo = Complex64::new(0.5 * (1.0 - p), 0.0);
    let hi = Complex64::new(0.5 * (1.0 + p), 0.0);
    let lead = RatioOrder::Leading;
    let alpha_prime = gamma_real(-p)?
        * gamma_ratio_asymptotic(wa, q, lo, lead)
        * gamma_ratio_asymptotic(wb, q, lo, lead);
    let beta_prime = gamma_real(p)?
        * gamma_ratio_asymptotic(wa, q, hi, lead)
        * gamma_ratio_asymptotic(wb, q, hi, lead);
    let a = flat_normalization(&ep.horizon()?)?.a;
    Ok(NormalizationFactor {
        a,
        alpha_prime,
        beta_prime,
    })
}

/// Zero order times 1 − i(4p² − 1)μX/(8(μ² − 1)), the first correction
/// shared by α′ and β′.
pub fn normalization_first_order(ep: &ExpansionParams) -> Result<NormalizationFactor> {
    let nf = normalization_zero_order(ep)?;
    let corr = Complex64::new(
        1.0,
        -(4.0 * ep.p * ep.p - 1.0) * ep.mu * ep.x / (8.0 * ep.k * ep.k),
    );
    Ok(NormalizationFactor {
        alpha_prime: nf.alpha_prime * corr,
        beta_prime: nf.beta_prime * corr,
        ..nf
    })
}

/// ψ⁰ = α′₀ (Xr)^j F̄₀ + β′₀ (Xr)^{−(j+1)} Ḡ₀ on the grid (r in units of λ).
pub fn normalized_out_wave_zero_order(
    ep: &ExpansionParams,
    r_grid: &[f64],
) -> Result<Vec<Complex64>> {
    let nf = normalization_zero_order(ep)?;
    let j = ep.j as i32;
    r_grid
        .iter()
        .map(|&r| {
            if !(r > 0.0) {
                return Err(DswError::Domain(format!("radius {r} must be positive")));
            }
            let xr = ep.x * r;
            Ok(
                nf.alpha_prime * xr.powi(j) * order0(ep, Family::Regular, r)?
                    + nf.beta_prime * xr.powi(-(j + 1)) * order0(ep, Family::Singular, r)?,
            )
        })
        .collect()
}

/// The constant ψ⁰ / (√(2/(kr)) H⁽¹⁾_p(kr)) should take: iπ e^{iπ(p/2 + 1/4)}.
pub fn zero_order_hankel_constant(p: f64) -> Complex64 {
    Complex64::new(0.0, std::f64::consts::PI) * exp_i_pi(0.5 * p + 0.25)
}

/// ψ⁰ / (√(2/(kr)) H⁽¹⁾_p(kr)) on the grid.
pub fn zero_order_hankel_ratio(ep: &ExpansionParams, r_grid: &[f64]) -> Result<Vec<Complex64>> {
    let psi = normalized_out_wave_zero_order(ep, r_grid)?;
    r_grid
        .iter()
        .zip(psi)
        .map(|(&r, v)| {
            let x = ep.k * r;
            Ok(v / ((2.0 / x).sqrt() * hankel1(ep.p, x)?))
        })
        .collect()
}

/// Least-squares fit of `values` on {h⁽¹⁾_j(kr), h⁽²⁾_j(kr)}; returns the
/// coefficients and the relative residual ‖v − fit‖/‖v‖.
pub fn fit_spherical_waves(
    ep: &ExpansionParams,
    r_grid: &[f64],
    values: &[Complex64],
) -> Result<([Complex64; 2], f64)> {
    if r_grid.len() != values.len() || r_grid.len() < 3 {
        return Err(DswError::Invalid(
            "fit needs at least three matching samples".into(),
        ));
    }
    let basis = r_grid
        .iter()
        .map(|&r| {
            let h = spherical_hankel1(ep.j, ep.k * r)?;
            Ok([h, h.conj()])
        })
        .collect::<Result<Vec<_>>>()?;
    // 2×2 normal equations
    let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut rhs = [Complex64::new(0.0, 0.0); 2];
    for (b, v) in basis.iter().zip(values) {
        for i in 0..2 {
            for k in 0..2 {
                g[i][k] += b[i].conj() * b[k];
            }
            rhs[i] += b[i].conj() * v;
        }
    }
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if det.norm() == 0.0 {
        return Err(DswError::Invalid("degenerate fit basis".into()));
    }
    let c0 = (rhs[0] * g[1][1] - g[0][1] * rhs[1]) / det;
    let c1 = (g[0][0] * rhs[1] - g[1][0] * rhs[0]) / det;
    let (mut num, mut den) = (0.0, 0.0);
    for (b, v) in basis.iter().zip(values) {
        num += (v - c0 * b[0] - c1 * b[1]).norm_sqr();
        den += v.norm_sqr();
    }
    Ok(([c0, c1], (num / den).sqrt()))
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Slope of max |F̄ − F̄₀ − X F̄₁| against X.
pub fn residual_scaling_slope(mu: f64, j: u32, xs: &[f64], r_grid: &[f64]) -> Result<f64> {
    let mut ys = Vec::with_capacity(xs.len());
    for &x in xs {
        let ep = ExpansionParams::new(x, mu, j)?;
        let d = decompose_hypergeometric(&ep, r_grid)?;
        ys.push(
            d.f2_residual
                .iter()
                .map(|v| v.norm() * x * x)
                .fold(0.0, f64::max),
        );
    }
    Ok(loglog_slope(xs, &ys))
}

/// Whether the zero-order wave and the r⁴-weighted first correction of the
/// approximant can be written as outgoing plus incoming spherical waves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mu: f64,
    pub j: u32,
    /// Relative residual of ψ⁰ on {h⁽¹⁾_j, h⁽²⁾_j}.
    pub order0_fit_residual: f64,
    /// Relative residual of (μ²r⁴X²/8) ψ⁰ on the same basis.
    pub order1_fit_residual: f64,
    /// Incoming coefficient of ψ⁰ relative to the outgoing one.
    pub order0_incoming: f64,
    pub xs: Vec<f64>,
    /// max |(α′f + β′g) − ψ⁰| / max |ψ⁰| at each X.
    pub first_order_size: Vec<f64>,
    pub first_order_slope: f64,
    /// Order 0 separates and order 1 does not.
    pub non_separable: bool,
}

/// Floor on the order-1 fit residual below which the correction would count
/// as a combination of spherical waves.
pub const NON_SEPARABLE_FLOOR: f64 = 1e-2;

/// Grid used by the audit: kr from 1 to 10 in 200 steps.
pub fn audit_grid(ep: &ExpansionParams) -> Vec<f64> {
    (0..200)
        .map(|i| (1.0 + 9.0 * i as f64 / 199.0) / ep.k)
        .collect()
}

pub fn first_order_correction_audit(ep: &ExpansionParams) -> Result<AuditReport> {
    let grid = audit_grid(ep);
    let psi = normalized_out_wave_zero_order(ep, &grid)?;
    let (c, order0_fit_residual) = fit_spherical_waves(ep, &grid, &psi)?;
    let weighted: Vec<Complex64> = grid
        .iter()
        .zip(&psi)
        .map(|(&r, v)| 0.125 * ep.mu * ep.mu * r.powi(4) * ep.x * ep.x * v)
        .collect();
    let (_, order1_fit_residual) = fit_spherical_waves(ep, &grid, &weighted)?;

    let xs: Vec<f64> = [1.0, 0.1, 0.01].iter().map(|f| f * ep.x).collect();
    let mut sizes = Vec::new();
    for &x in &xs {
        let e = ExpansionParams::new(x, ep.mu, ep.j)?;
        let grid = audit_grid(&e);
        let psi0 = normalized_out_wave_zero_order(&e, &grid)?;
        let hp = e.horizon()?;
        let nf = flat_normalization(&hp)?;
        let f = make_ansatz(&hp, Family::Regular)?;
        let g = make_ansatz(&hp, Family::Singular)?;
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for (&r, p0) in grid.iter().zip(&psi0) {
            let rh = x * r;
            let exact =
                nf.alpha_prime * eval_standing(&f, rh)? + nf.beta_prime * eval_standing(&g, rh)?;
            diff = diff.max((exact - p0).norm());
            scale = scale.max(p0.norm());
        }
        sizes.push(diff / scale);
    }
    let first_order_slope = loglog_slope(&xs, &sizes);
    Ok(AuditReport {
        mu: ep.mu,
        j: ep.j,
        order0_fit_residual,
        order1_fit_residual,
        order0_incoming: (c[1] / c[0]).norm(),
        xs,
        first_order_size: sizes,
        first_order_slope,
        non_separable: order0_fit_residual < 1e-8 && order1_fit_residual > NON_SEPARABLE_FLOOR,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn sum_identity_small_cases() {
        let (l, r) = sum_identity(0, &q(1, 2));
        assert_eq!(l, q(3, 2));
        assert_eq!(l, r);
        let (l, r) = sum_identity(2, &q(3, 2));
        assert_eq!(l, q(27, 2));
        assert_eq!(r, q(27, 2));
    }

    #[test]
    fn xy_is_half() {
        for x in [0.1, 0.03, 1e-4, 0.0123] {
            assert_eq!(ExpansionParams::new(x, 2.0, 0).unwrap().xy_exact(), q(1, 2));
        }
        assert!(ExpansionParams::new(0.2, 2.0, 0).is_err());
        assert!(ExpansionParams::new(0.01, 1.0, 0).is_err());
    }

    #[test]
    fn exponential_factor_at_origin_and_validity() {
        assert_eq!(
            exponential_factor_expansion(2.0, 0.01, 0.0, Direction::Out).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert!(exponential_factor_expansion(2.0, 0.01, 4.0, Direction::Out).is_err());
        let e = exponential_factor_exact(2.0, 0.01, 2.0, Direction::In);
        assert!((e.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn order0_at_origin() {
        let ep = ExpansionParams::new(0.01, 2.0, 1).unwrap();
        assert_eq!(order0(&ep, Family::Regular, 0.0).unwrap(), 1.0);
        assert!((order0(&ep, Family::Regular, 1e-6).unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn order1_series_matches_closed_form() {
        for j in 0..3 {
            let ep = ExpansionParams::new(0.01, 1.7, j).unwrap();
            for fam in [Family::Regular, Family::Singular] {
                for r in [0.3, 1.0, 4.0] {
                    let a = order1_series(&ep, fam, r);
                    let b = order1(&ep, fam, r).unwrap();
                    assert!((a - b).norm() < 1e-10 * b.norm(), "j={j} {fam:?} r={r}");
                }
            }
        }
    }

    #[test]
    fn order2_series_matches_residual() {
        // what remains is the next order, O(X) relative
        for x in [1e-3, 1e-4] {
            let ep = ExpansionParams::new(x, 2.0, 1).unwrap();
            for fam in [Family::Regular, Family::Singular] {
                let r = 1.3;
                let res = (exact_factor(&ep, fam, r).unwrap()
                    - order0(&ep, fam, r).unwrap()
                    - ep.x * order1(&ep, fam, r).unwrap())
                    / (ep.x * ep.x);
                let series = order2_series(&ep, fam, r);
                assert!(
                    (res - series).norm() < 2.0 * x * series.norm(),
                    "{fam:?}: {res} vs {series}"
                );
            }
        }
    }

    #[test]
    fn hankel_ratio_constant_j0() {
        let ep = ExpansionParams::new(1e-3, 3.0, 0).unwrap();
        let grid = audit_grid(&ep);
        let want = zero_order_hankel_constant(0.5);
        for v in zero_order_hankel_ratio(&ep, &grid).unwrap() {
            assert!((v - want).norm() < 1e-12 * want.norm());
        }
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0];
        assert!((loglog_slope(&xs, &[3.0, 12.0, 48.0]) - 2.0).abs() < 1e-12);
    }
}
