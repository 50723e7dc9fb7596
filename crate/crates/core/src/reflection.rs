//! Far-field amplitudes of the outgoing running wave and the reflection
//! coefficient, plus an independent estimate from integrating the
//! Schrödinger form G'' + (ε² − U) G = 0 in the tortoise coordinate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DswError, Result};
use crate::model::{
    liouville_potential_tortoise, to_horizon_units, HorizonUnitsParams, ModelParams,
};
use crate::oracle::ode::{dopri5, OdeTolerance};
use crate::special_fns::{
    exp_i_pi, gamma_ratio, gamma_ratio_asymptotic, gamma_real, log_gamma, RatioOrder,
};
use crate::waves::{make_ansatz, mass_root, Family, WaveAnsatz};

/// Default factor in ε² − m² > margin · j².
pub const DEFAULT_MARGIN: f64 = 100.0;

/// Whether ε² − m² > margin · j².
pub fn check_regime(hp: &HorizonUnitsParams, margin: f64) -> bool {
    let j = hp.j as f64;
    hp.k_squared() > margin * j * j
}

/// C₁ multiplies the J_p channel and C₂ the J_{−p} channel of the far-field
/// outgoing wave; A_± are the coefficients of e^{±ikr}/(kr).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldAmplitudes {
    pub c1: Complex64,
    pub c2: Complex64,
    pub a_plus: Complex64,
    pub a_minus: Complex64,
}

/// Size of what the leading-order far-field recipe drops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationEstimate {
    /// First omitted term of the large-argument Bessel expansion at kr ~ k,
    /// |4p² − 1|/(8k).
    pub bessel: f64,
    /// |exact Γ-ratio product / leading power − 1| for the C₁ channel.
    pub gamma_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionResult {
    pub amplitudes: FarFieldAmplitudes,
    /// |A_minus / A_plus|
    pub ratio: f64,
    /// ratio²
    pub coefficient: f64,
    pub regime_ok: bool,
    pub truncation: TruncationEstimate,
}

/// (A_plus, A_minus) from (C₁, C₂):
/// A_± = C₁ e^{∓iπ(p + 1/2)/2} + C₂ e^{∓iπ(−p + 1/2)/2}.
pub fn far_field_phases(c1: Complex64, c2: Complex64, p: f64) -> (Complex64, Complex64) {
    let a_plus = c1 * exp_i_pi(-0.5 * (p + 0.5)) + c2 * exp_i_pi(-0.5 * (-p + 0.5));
    let a_minus = c1 * exp_i_pi(0.5 * (p + 0.5)) + c2 * exp_i_pi(0.5 * (-p + 0.5));
    (a_plus, a_minus)
}

fn amplitudes(
    ans: &WaveAnsatz,
    hp: &HorizonUnitsParams,
) -> Result<(FarFieldAmplitudes, TruncationEstimate)> {
    if ans.family != Family::Regular {
        return Err(DswError::Invalid(
            "far-field coefficients are built from the regular-family parameters".into(),
        ));
    }
    let k = hp.wave_number()?;
    let p = hp.p();
    let (a, b, c) = (ans.a, ans.b, ans.c);
    // N = Γ(a + b − c + 1)/(Γ(a)Γ(b)), shared by both channels.
    let n = (log_gamma(a + b - c + 1.0)? - log_gamma(a)? - log_gamma(b)?).exp();
    let half = Complex64::new(0.5 * (1.0 + p), 0.0);
    let low = Complex64::new(0.5 * (1.0 - p), 0.0);
    // Large-|w| form of Γ(a)Γ(b)/(Γ(a − c + 1)Γ(b − c + 1)) with w = −i(ε ∓ m)/2.
    let wa = Complex64::new(0.0, -0.5 * (hp.epsilon - hp.m));
    let wb = Complex64::new(0.0, -0.5 * (hp.epsilon + hp.m));
    let lead = gamma_ratio_asymptotic(wa, half, low, RatioOrder::Leading)
        * gamma_ratio_asymptotic(wb, half, low, RatioOrder::Leading);
    let norm = (0.5 * k / std::f64::consts::PI).sqrt();
    let c1 = n * gamma_real(-p)? * lead * gamma_real(1.0 + p)? * (0.5 * k).powf(-p) * norm;
    let c2 = n * gamma_real(p)? * gamma_real(1.0 - p)? * (0.5 * k).powf(p) * norm;
    let (a_plus, a_minus) = far_field_phases(c1, c2, p);

    let s = mass_root(hp.m)?;
    let exact_wa = Complex64::new(0.0, 0.5 * (s - hp.epsilon));
    let exact_wb = Complex64::new(0.0, -0.5 * (s + hp.epsilon));
    let exact = gamma_ratio(exact_wa, half, low)? * gamma_ratio(exact_wb, half, low)?;
    let truncation = TruncationEstimate {
        bessel: (4.0 * p * p - 1.0).abs() / (8.0 * k),
        gamma_ratio: (exact / lead - 1.0).norm(),
    };
    Ok((
        FarFieldAmplitudes {
            c1,
            c2,
            a_plus,
            a_minus,
        },
        truncation,
    ))
}

/// C₁, C₂ and A_± for the outgoing wave; fails outside ε² − m² ≫ j².
pub fn far_field_coefficients(
    ans: &WaveAnsatz,
    hp: &HorizonUnitsParams,
) -> Result<FarFieldAmplitudes> {
    require_regime(hp)?;
    Ok(amplitudes(ans, hp)?.0)
}

fn require_regime(hp: &HorizonUnitsParams) -> Result<()> {
    if !check_regime(hp, DEFAULT_MARGIN) {
        let j = hp.j as f64;
        return Err(DswError::Regime {
            lhs: hp.k_squared(),
            rhs: DEFAULT_MARGIN * j * j,
        });
    }
    Ok(())
}

/// Like [`reflection_coefficient`] but never fails on the regime check;
/// the result carries `regime_ok = false` instead.
pub fn reflection_report(hp: &HorizonUnitsParams) -> Result<ReflectionResult> {
    if hp.epsilon.abs() <= hp.m {
        return Err(DswError::EvanescentMode { mu: hp.mu() });
    }
    let ans = make_ansatz(hp, Family::Regular)?;
    let (amps, truncation) = amplitudes(&ans, hp)?;
    let ratio = (amps.a_minus / amps.a_plus).norm();
    Ok(ReflectionResult {
        amplitudes: amps,
        ratio,
        coefficient: ratio * ratio,
        regime_ok: check_regime(hp, DEFAULT_MARGIN),
        truncation,
    })
}

/// R = |A_minus / A_plus|², valid only where εR ≫ j.
pub fn reflection_coefficient(p: &ModelParams) -> Result<ReflectionResult> {
    if p.mu <= 1.0 {
        return Err(DswError::EvanescentMode { mu: p.mu });
    }
    let hp = to_horizon_units(p);
    require_regime(&hp)?;
    reflection_report(&hp)
}

// ---------------------------------------------------------------- flux oracle

/// Interval of r* where the interior solution is decomposed, and its sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxWindow {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

const CHEBYSHEV_DEGREE: usize = 14;

/// Integrate G'' + (ε² − U(x)) G = 0 inward from `start` with purely
/// outgoing data G = e^{iεx}, then measure the ratio of e^{−iθ} to e^{+iθ}
/// content inside the window, θ = ∫ √(ε² − U) dx.
///
/// In the window q|G|² = |A|² + |B|² + 2|AB| cos(2θ + φ) + slow terms, so the
/// oscillating fraction y = 2ρ/(1 + ρ²) fixes ρ = |B/A|.
pub fn flux_balance_with_potential<U>(
    epsilon: f64,
    potential: U,
    start: f64,
    window: FluxWindow,
    tol: &OdeTolerance,
) -> Result<f64>
where
    U: Fn(f64) -> f64,
{
    if !(window.lo < window.hi && window.hi <= start) || window.samples < 2 * (CHEBYSHEV_DEGREE + 3)
    {
        return Err(DswError::Invalid(format!(
            "flux window {window:?} does not fit below start {start}"
        )));
    }
    let e2 = epsilon * epsilon;
    let g0 = Complex64::new(0.0, epsilon * start).exp();
    let rhs2 = |x: f64, y: &[Complex64; 2]| [y[1], -(e2 - potential(x)) * y[0]];
    let at_hi = dopri5(
        rhs2,
        start,
        [g0, Complex64::new(0.0, epsilon) * g0],
        &[window.hi],
        tol,
    )?[0];

    let n = window.samples;
    let xs: Vec<f64> = (0..n)
        .map(|i| window.hi - (window.hi - window.lo) * i as f64 / (n - 1) as f64)
        .collect();
    let q = |x: f64| {
        let v = e2 - potential(x);
        if v > 0.0 {
            Ok(v.sqrt())
        } else {
            Err(DswError::Domain(format!(
                "classically forbidden point r* = {x} inside the flux window"
            )))
        }
    };
    for &x in &xs {
        q(x)?;
    }
    let rhs3 = |x: f64, y: &[Complex64; 3]| {
        let qq = (e2 - potential(x)).max(0.0).sqrt();
        [y[1], -(e2 - potential(x)) * y[0], Complex64::new(qq, 0.0)]
    };
    let ys = dopri5(
        rhs3,
        window.hi,
        [at_hi[0], at_hi[1], Complex64::new(0.0, 0.0)],
        &xs,
        tol,
    )?;

    let cols = CHEBYSHEV_DEGREE + 3;
    let mut design = DMatrix::<f64>::zeros(n, cols);
    let mut target = DVector::<f64>::zeros(n);
    for (row, (&x, y)) in xs.iter().zip(&ys).enumerate() {
        let s = (2.0 * x - window.lo - window.hi) / (window.hi - window.lo);
        let (mut t0, mut t1) = (1.0, s);
        design[(row, 0)] = t0;
        design[(row, 1)] = t1;
        for d in 2..=CHEBYSHEV_DEGREE {
            let t2 = 2.0 * s * t1 - t0;
            design[(row, d)] = t2;
            t0 = t1;
            t1 = t2;
        }
        let theta = 2.0 * y[2].re;
        design[(row, cols - 2)] = theta.cos();
        design[(row, cols - 1)] = theta.sin();
        target[row] = q(x)? * y[0].norm_sqr();
    }
    let qr = design.clone().qr();
    let fit = qr
        .r()
        .solve_upper_triangular(&(qr.q().transpose() * &target))
        .ok_or_else(|| DswError::Invalid("flux fit basis is rank deficient".into()))?;
    // Normalize by the slow part alone; the sample mean is biased by the
    // oscillation over a non-integer number of periods.
    let slow = design.columns(0, CHEBYSHEV_DEGREE + 1) * fit.rows(0, CHEBYSHEV_DEGREE + 1);
    let mean = slow.mean();
    let y = fit[cols - 2].hypot(fit[cols - 1]) / mean;
    if !(0.0..=1.0 + 1e-6).contains(&y) {
        return Err(DswError::Invalid(format!(
            "oscillation fraction {y} out of range"
        )));
    }
    let y = y.min(1.0);
    Ok(y / (1.0 + (1.0 - y * y).sqrt()))
}

/// |A_minus / A_plus| for the de Sitter mode from direct integration of the
/// Schrödinger form with potential m² sech² r* + j(j+1)/sinh² r*.
pub fn horizon_flux_balance(hp: &HorizonUnitsParams) -> Result<f64> {
    let tol = OdeTolerance {
        rtol: 1e-12,
        atol: 1e-14,
        ..Default::default()
    };
    horizon_flux_balance_with(hp, &tol)
}

/// [`horizon_flux_balance`] with caller-chosen integration tolerance.
pub fn horizon_flux_balance_with(hp: &HorizonUnitsParams, tol: &OdeTolerance) -> Result<f64> {
    let k = hp.wave_number()?;
    let e2 = hp.epsilon * hp.epsilon;
    let lo = (15.0 / k).max(0.3);
    let hi = lo + 3.0;
    let mut start = hi.max(1.0);
    while liouville_potential_tortoise(hp, start) / e2 >= 1e-15 {
        start += 0.5;
    }
    let window = FluxWindow {
        lo,
        hi,
        samples: 8000,
    };
    flux_balance_with_potential(
        hp.epsilon,
        |x| liouville_potential_tortoise(hp, x),
        start,
        window,
        tol,
    )
}
