//! Independent checks: ODE integration, extended-precision series and the
//! singular-point classifier.

pub mod classify;
pub mod ode;
pub mod xprec;

pub use classify::{
    classify_singularities, parse_fixture, Classification, Exponent, Location, OdeCoefficients,
    PointKind, PolyRatio, SingularPoint, SingularityReport,
};
pub use ode::{
    dopri5, frobenius_coefficients, frobenius_problem, integrate, FrobeniusLaunch, OdeProblem,
    OdeSample, OdeTolerance, TOLERANCE_ENV,
};
pub use xprec::{extended_constant, extended_series, ExtendedArgs, ExtendedValue};
