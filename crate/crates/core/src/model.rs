//! Parameters, the tortoise coordinate, the effective potential and the
//! radial equation in static de Sitter coordinates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{DswError, Result};
use crate::oracle::classify::{Factor, OdeCoefficients, PolyRatio};

/// Physical parameterization: curvature radius, Compton length, energy in
/// rest-energy units and angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Curvature radius R.
    pub radius: f64,
    /// Compton length λ = ħ/Mc, same length unit as `radius`.
    pub lambda: f64,
    /// μ = E/Mc².
    pub mu: f64,
    pub j: u32,
}

impl ModelParams {
    pub fn new(radius: f64, lambda: f64, mu: f64, j: u32) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite())
            || !(lambda > 0.0 && lambda.is_finite())
            || !mu.is_finite()
        {
            return Err(DswError::Invalid(format!(
                "need R > 0, lambda > 0 and finite mu, got R = {radius}, lambda = {lambda}, mu = {mu}"
            )));
        }
        Ok(ModelParams {
            radius,
            lambda,
            mu,
            j,
        })
    }

    /// Wave number k with k² = (μ² − 1)/λ².
    pub fn wave_number(&self) -> Result<f64> {
        if self.mu <= 1.0 {
            return Err(DswError::EvanescentMode { mu: self.mu });
        }
        Ok((self.mu * self.mu - 1.0).sqrt() / self.lambda)
    }
}

/// Dimensionless parameters with the horizon at r = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonUnitsParams {
    /// ε = μR/λ
    pub epsilon: f64,
    /// m = R/λ
    pub m: f64,
    pub j: u32,
}

impl HorizonUnitsParams {
    pub fn new(epsilon: f64, m: f64, j: u32) -> Result<Self> {
        if !epsilon.is_finite() || !(m >= 0.0 && m.is_finite()) {
            return Err(DswError::Invalid(format!(
                "need finite epsilon and m >= 0, got {epsilon}, {m}"
            )));
        }
        Ok(HorizonUnitsParams { epsilon, m, j })
    }

    /// p = j + 1/2
    pub fn p(&self) -> f64 {
        self.j as f64 + 0.5
    }

    /// j(j + 1)
    pub fn centrifugal(&self) -> f64 {
        let j = self.j as f64;
        j * (j + 1.0)
    }

    /// μ = ε/m
    pub fn mu(&self) -> f64 {
        self.epsilon / self.m
    }

    /// k² = ε² − m² in units of 1/R².
    pub fn k_squared(&self) -> f64 {
        (self.epsilon - self.m) * (self.epsilon + self.m)
    }

    /// Horizon-units wave number, failing for non-propagating modes.
    pub fn wave_number(&self) -> Result<f64> {
        if self.epsilon.abs() <= self.m {
            return Err(DswError::EvanescentMode { mu: self.mu() });
        }
        Ok(self.k_squared().sqrt())
    }
}

/// Φ(r) = 1 − r²
pub fn phi(r: f64) -> f64 {
    (1.0 - r) * (1.0 + r)
}

pub fn to_horizon_units(p: &ModelParams) -> HorizonUnitsParams {
    let m = p.radius / p.lambda;
    HorizonUnitsParams {
        epsilon: p.mu * m,
        m,
        j: p.j,
    }
}

/// Inverse of [`to_horizon_units`] given the curvature radius.
pub fn to_physical(hp: &HorizonUnitsParams, radius: f64) -> ModelParams {
    ModelParams {
        radius,
        lambda: radius / hp.m,
        mu: hp.epsilon / hp.m,
        j: hp.j,
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(DswError::Domain(format!("radius {r} outside [0, 1)")));
    }
    Ok(())
}

/// r* = atanh r, in units of R.
pub fn tortoise(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(r.atanh())
}

/// r = tanh r*
pub fn inverse_tortoise(r_star: f64) -> Result<f64> {
    if !(r_star >= 0.0) {
        return Err(DswError::Domain(format!(
            "tortoise coordinate {r_star} must be >= 0"
        )));
    }
    Ok(r_star.tanh())
}

/// One sample of the effective potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialPoint {
    pub r: f64,
    pub r_star: f64,
    /// U in units of 1/R².
    pub u: f64,
    /// F = −dU/dr* in units of 1/R³.
    pub force: f64,
}

/// Effective potential and force on a grid. The Schrödinger-form unknown is
/// G(r*), with G'' + (ε² − U) G = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub points: Vec<PotentialPoint>,
}

impl PotentialProfile {
    pub fn barrierless(&self) -> bool {
        self.points.iter().all(|p| p.force > 0.0)
    }
}

/// U = Φ [4(1 − r) + r/(1 + r) + m² + j(j+1)/r²] and F = −dU/dr*.
///
/// With the bracket W, F = Φ [2rW + Φ(2j(j+1)/r³ + 4 − 1/(1+r)²)].
pub fn effective_potential(hp: &HorizonUnitsParams, r: f64) -> Result<(f64, f64)> {
    check_radius(r)?;
    let l = hp.centrifugal();
    if r == 0.0 && l > 0.0 {
        return Err(DswError::Domain(
            "centrifugal term is singular at r = 0 for j > 0".into(),
        ));
    }
    let ph = phi(r);
    let cent = if l > 0.0 { l / (r * r) } else { 0.0 };
    let w = 4.0 * (1.0 - r) + r / (1.0 + r) + hp.m * hp.m + cent;
    let dcent = if l > 0.0 { 2.0 * l / (r * r * r) } else { 0.0 };
    let force = ph * (2.0 * r * w + ph * (dcent + 4.0 - 1.0 / ((1.0 + r) * (1.0 + r))));
    Ok((ph * w, force))
}

/// Potential of the exact Liouville form of the radial equation, G = r f:
/// U = Φ (m² + j(j+1)/r²), equal to m² sech² r* + j(j+1)/sinh² r*.
pub fn liouville_potential(hp: &HorizonUnitsParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    let l = hp.centrifugal();
    if r == 0.0 && l > 0.0 {
        return Err(DswError::Domain(
            "centrifugal term is singular at r = 0 for j > 0".into(),
        ));
    }
    let cent = if l > 0.0 { l / (r * r) } else { 0.0 };
    Ok(phi(r) * (hp.m * hp.m + cent))
}

/// [`liouville_potential`] written in the tortoise coordinate; stable for large r*.
pub fn liouville_potential_tortoise(hp: &HorizonUnitsParams, r_star: f64) -> f64 {
    let sech = 1.0 / r_star.cosh();
    let l = hp.centrifugal();
    let cent = if l > 0.0 {
        l / r_star.sinh().powi(2)
    } else {
        0.0
    };
    hp.m * hp.m * sech * sech + cent
}

pub fn potential_profile(hp: &HorizonUnitsParams, r_grid: &[f64]) -> Result<PotentialProfile> {
    let points = r_grid
        .iter()
        .map(|&r| {
            let (u, force) = effective_potential(hp, r)?;
            Ok(PotentialPoint {
                r,
                r_star: tortoise(r)?,
                u,
                force,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PotentialProfile { points })
}

/// Coefficients of f'' + P f' + Q f = 0 in the variable r:
/// P = 2/r + Φ'/Φ, Q = ε²/Φ² − (m² + 2)/Φ − j(j+1)/(Φ r²).
pub fn radial_ode_coefficients(hp: &HorizonUnitsParams) -> OdeCoefficients<f64> {
    let (e2, m2, l) = (hp.epsilon * hp.epsilon, hp.m * hp.m, hp.centrifugal());
    // P = (2 − 4r²) / (−r (r − 1)(r + 1))
    let p = PolyRatio {
        numerator: vec![2.0, 0.0, -4.0],
        constant: -1.0,
        factors: vec![
            Factor::new(0.0, 1),
            Factor::new(1.0, 1),
            Factor::new(-1.0, 1),
        ],
    };
    // Q = (−L + (ε² − m² − 2 + L) r² + (m² + 2) r⁴) / (r² (r − 1)² (r + 1)²)
    let q = PolyRatio {
        numerator: vec![-l, 0.0, e2 - m2 - 2.0 + l, 0.0, m2 + 2.0],
        constant: 1.0,
        factors: vec![
            Factor::new(0.0, 2),
            Factor::new(1.0, 2),
            Factor::new(-1.0, 2),
        ],
    };
    OdeCoefficients {
        name: "de Sitter radial equation in r".into(),
        variable: "r".into(),
        p,
        q,
    }
}

/// The same equation in z = r², with exact rational coefficients:
/// P = (3 − 5z)/(2z(1 − z)),
/// Q = (ε²z − (m² + 2) z(1 − z) − j(j+1)(1 − z)) / (4z²(1 − z)²).
pub fn radial_ode_coefficients_z(hp: &HorizonUnitsParams) -> Result<OdeCoefficients<BigRational>> {
    let exact = |x: f64| {
        BigRational::from_f64(x)
            .ok_or_else(|| DswError::Invalid(format!("{x} has no rational value")))
    };
    let e2 = exact(hp.epsilon)?.pow(2);
    let m2 = exact(hp.m)?.pow(2);
    let j = BigRational::from_integer(BigInt::from(hp.j));
    let l = &j * (&j + BigRational::one());
    let int = |n: i64| BigRational::from_integer(BigInt::from(n));
    let two = int(2);
    let p = PolyRatio {
        numerator: vec![int(3), int(-5)],
        constant: int(-2),
        factors: vec![
            Factor::new(BigRational::zero(), 1),
            Factor::new(BigRational::one(), 1),
        ],
    };
    let q = PolyRatio {
        numerator: vec![-l.clone(), &e2 - &m2 - &two + &l, &m2 + &two],
        constant: int(4),
        factors: vec![
            Factor::new(BigRational::zero(), 2),
            Factor::new(BigRational::one(), 2),
        ],
    };
    Ok(OdeCoefficients {
        name: "de Sitter radial equation in z = r^2".into(),
        variable: "z".into(),
        p,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversion_examples() {
        let hp = to_horizon_units(&ModelParams::new(1.0, 1.0, 1.0, 0).unwrap());
        assert_eq!((hp.epsilon, hp.m, hp.p()), (1.0, 1.0, 0.5));
        let mp = ModelParams::new(10.0, 1.0, 2.0, 1).unwrap();
        let hp = to_horizon_units(&mp);
        assert_eq!((hp.epsilon, hp.m, hp.p()), (20.0, 10.0, 1.5));
        assert_eq!(to_physical(&hp, 10.0), mp);
        assert_eq!(hp.epsilon, mp.mu * hp.m);
    }

    #[test]
    fn invalid_params() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0, 0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN, 0).is_err());
    }

    #[test]
    fn tortoise_examples() {
        assert_eq!(tortoise(0.0).unwrap(), 0.0);
        assert!((inverse_tortoise(1.0).unwrap() - 0.761_594_155_955_764_9).abs() < 1e-15);
        let mut last = 0.0;
        for k in 1..15 {
            let rs = tortoise(1.0 - 10f64.powi(-k)).unwrap();
            assert!(rs > last);
            last = rs;
        }
        assert!(last > 16.0);
        assert!(tortoise(1.0).is_err());
        assert!(tortoise(-0.1).is_err());
    }

    #[test]
    fn potential_hand_value() {
        let hp = HorizonUnitsParams::new(1.0, 0.0, 0).unwrap();
        let (u, f) = effective_potential(&hp, 0.5).unwrap();
        assert!((u - 1.75).abs() < 1e-15);
        assert!(f > 0.0);
    }

    #[test]
    fn centrifugal_origin_rejected() {
        let hp = HorizonUnitsParams::new(1.0, 0.0, 2).unwrap();
        assert!(effective_potential(&hp, 0.0).is_err());
        let hp0 = HorizonUnitsParams::new(1.0, 0.0, 0).unwrap();
        assert!(effective_potential(&hp0, 0.0).is_ok());
    }

    #[test]
    fn liouville_forms_agree() {
        let hp = HorizonUnitsParams::new(7.0, 3.0, 2).unwrap();
        for r in [0.1, 0.5, 0.9, 0.999] {
            let a = liouville_potential(&hp, r).unwrap();
            let b = liouville_potential_tortoise(&hp, tortoise(r).unwrap());
            assert!((a - b).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn ode_coefficients_by_hand() {
        let hp = HorizonUnitsParams::new(10.0, 5.0, 1).unwrap();
        let c = radial_ode_coefficients(&hp);
        let r: f64 = 0.3;
        let ph = 1.0 - r * r;
        let p_hand = 2.0 / r - 2.0 * r / ph;
        let q_hand = 100.0 / (ph * ph) - 27.0 / ph - 2.0 / (ph * r * r);
        assert!((c.p.eval(r) - p_hand).abs() < 1e-13 * p_hand.abs());
        assert!((c.q.eval(r) - q_hand).abs() < 1e-13 * q_hand.abs());
    }
}
