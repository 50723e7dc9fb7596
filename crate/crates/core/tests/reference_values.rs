//! Values frozen from the extended-precision oracle (40 digits), plus
//! hand-checkable examples across modules.

// oracle digits are kept as printed
#![allow(clippy::excessive_precision)]

use num_complex::Complex64;

use dsw_core::model::{inverse_tortoise, tortoise, HorizonUnitsParams};
use dsw_core::oracle::{extended_series, ExtendedArgs, OdeTolerance};
use dsw_core::reflection::{flux_balance_with_potential, reflection_report, FluxWindow};
use dsw_core::special_fns::{
    bessel_j, gamma_ratio, gamma_ratio_asymptotic, hankel1, hyp2f1, log_gamma, RatioOrder,
    SeriesControl,
};
use dsw_core::waves::{eval_running, make_ansatz, Direction, Family};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * b.norm()
}

// ln Γ(1 + i)
const LOG_GAMMA_1_PLUS_I: (f64, f64) = (
    -0.650_923_199_301_856_338_885_216_831_503_9,
    -0.301_640_320_467_533_197_887_531_657_796_9,
);
// 2F1(a, b; c; 1/4) with the regular-family parameters at ε = 10, m = 5, j = 0
const HYP_QUARTER: (f64, f64) = (
    -0.029_711_862_439_383_039_582_576_932_672_05,
    0.223_120_949_894_744_228_305_184_827_729_2,
);
// J_{3/2}(7)
const BESSEL_THREE_HALVES_AT_7: f64 = -0.199_051_713_292_493_548_819_753_545_536_7;
// ln Γ(50.75 + 30i) − ln Γ(50 + 30i)
const LN_RATIO_50_30: (f64, f64) = (
    3.047_946_420_635_386_974_272_487_442_221,
    0.406_139_788_949_341_101_465_436_025_983,
);

#[test]
fn log_gamma_frozen() {
    let (re, im) = LOG_GAMMA_1_PLUS_I;
    assert!(close(log_gamma(c(1.0, 1.0)).unwrap(), c(re, im), 1e-14));
}

#[test]
fn hypergeometric_frozen() {
    let hp = HorizonUnitsParams::new(10.0, 5.0, 0).unwrap();
    let ans = make_ansatz(&hp, Family::Regular).unwrap();
    let v = hyp2f1(ans.a, ans.b, ans.c, c(0.25, 0.0), &SeriesControl::default()).unwrap();
    let (re, im) = HYP_QUARTER;
    assert!(close(v, c(re, im), 1e-12), "{v}");
}

#[test]
fn bessel_frozen() {
    let v = bessel_j(1.5, 7.0).unwrap();
    assert!((v - BESSEL_THREE_HALVES_AT_7).abs() < 1e-14);
}

#[test]
fn gamma_ratio_frozen() {
    let (a, b) = (c(0.75, 0.0), c(0.0, 0.0));
    let z = c(50.0, 30.0);
    let (re, im) = LN_RATIO_50_30;
    let want = c(re, im).exp();
    assert!(close(gamma_ratio(z, a, b).unwrap(), want, 1e-13));
    let asym = gamma_ratio_asymptotic(z, a, b, RatioOrder::FirstCorrection);
    let err = (asym - want).norm() / want.norm();
    assert!(err < 1.0 / z.norm_sqr() && err > 1e-8, "{err}");
}

#[test]
fn oracle_reproduces_frozen_values_at_two_precisions() {
    let args = ExtendedArgs::Bessel { p: 1.5, x: 7.0 };
    let lo = extended_series(&args, 30).unwrap();
    let hi = extended_series(&args, 40).unwrap();
    assert!(lo.agreeing_digits(&hi) >= 29.0);
    assert!((hi.to_complex64().re - BESSEL_THREE_HALVES_AT_7).abs() < 1e-16);
}

#[test]
fn leading_ratio_against_direct_gammas() {
    // A = 1/4, B = (1 − p)/2 with p = 3/2
    let z = c(50.0, 0.0);
    let (a, b) = (c(0.25, 0.0), c(-0.25, 0.0));
    let direct = (log_gamma(z + a).unwrap() - log_gamma(z + b).unwrap()).exp();
    let lead = gamma_ratio_asymptotic(z, a, b, RatioOrder::Leading);
    let first = gamma_ratio_asymptotic(z, a, b, RatioOrder::FirstCorrection);
    assert!((lead - direct).norm() / direct.norm() < 1.0 / 50.0);
    assert!((first - direct).norm() / direct.norm() < 1.0 / 2500.0);
}

#[test]
fn hankel_large_argument() {
    let (p, x) = (2.5, 10.0);
    let h = hankel1(p, x).unwrap();
    let asym = (2.0 / (std::f64::consts::PI * x)).sqrt()
        * c(
            0.0,
            x - p * std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_4,
        )
        .exp();
    let mu = 4.0 * p * p;
    let leading_err = (h - asym).norm() / asym.norm();
    assert!(leading_err < 2.0 * (mu - 1.0) / (8.0 * x), "{leading_err}");
    let first = asym * c(1.0, (mu - 1.0) / (8.0 * x));
    let first_err = (h - first).norm() / asym.norm();
    assert!(
        first_err < (mu - 1.0) * (mu - 9.0) / (128.0 * x * x),
        "{first_err}"
    );
}

#[test]
fn tortoise_at_one() {
    assert!((inverse_tortoise(1.0).unwrap() - 0.761_594_155_955_764_9).abs() < 1e-15);
    assert!((tortoise(0.761_594_155_955_764_9).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn outgoing_phase_tracks_tortoise_coordinate() {
    let hp = HorizonUnitsParams::new(10.0, 5.0, 1).unwrap();
    let ans = make_ansatz(&hp, Family::Regular).unwrap();
    let (x1, x2) = (8.0, 8.001);
    let u1 = eval_running(&ans, Direction::Out, inverse_tortoise(x1).unwrap()).unwrap();
    let u2 = eval_running(&ans, Direction::Out, inverse_tortoise(x2).unwrap()).unwrap();
    let slope = (u2 / u1).arg() / (x2 - x1);
    assert!((slope - 10.0).abs() < 1e-4, "{slope}");
}

#[test]
fn reflection_sweep_with_fixed_mass() {
    for eps in [20.0, 50.0, 100.0] {
        for j in 0..3 {
            let rep = reflection_report(&HorizonUnitsParams::new(eps, 10.0, j).unwrap()).unwrap();
            assert!(
                rep.coefficient < 1e-18,
                "eps={eps} j={j}: {}",
                rep.coefficient
            );
        }
    }
}

#[test]
fn barrier_reflects() {
    // Pöschl–Teller barrier with peak above ε²
    let (eps, u0, w, x0) = (5.0, 50.0, 0.5, 10.0);
    let u = |x: f64| u0 / ((x - x0) / w).cosh().powi(2);
    let window = FluxWindow {
        lo: 0.5,
        hi: x0 - 12.0 * w,
        samples: 8000,
    };
    let r = flux_balance_with_potential(eps, u, x0 + 20.0 * w, window, &OdeTolerance::default())
        .unwrap();
    assert!(r > 0.99, "{r}");
}
