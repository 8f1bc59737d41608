//! Moment-SOS relaxations for polynomial optimization, with explicit
//! `(ε, η)` solver noise models and their robust (max-min) readings.

pub mod error;
pub mod extract;
pub mod poly;
pub mod relax;
pub mod robust;
pub mod sdpsolve;

pub use error::{Error, Result};
