//! Scalar waves in static de Sitter coordinates.
//!
//! Everything runs in horizon units (R = 1, 0 <= r < 1) unless a function
//! says otherwise; [`model::ModelParams`] converts from physical units.

// `!(x > 0.0)` is how NaN inputs get rejected alongside bad values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expansion;
pub mod model;
pub mod oracle;
pub mod reflection;
pub mod special_fns;
pub mod waves;

pub use error::{DswError, Result};
