//! Dark-state (EIT-like) laser cooling of single ions and ion crystals.
//!
//! The crate cross-validates closed-form cooling rates, spin absorption
//! spectra, and collective rate equations against exact Lindblad
//! master-equation numerics at desk scale.
//!
//! Units: every frequency and rate is an angular frequency in rad/µs.
//! Configuration values quoted as "2π × MHz" convert via [`two_pi_mhz`].

pub mod engine;
pub mod error;
pub mod models;
pub mod modes;
pub mod par;
pub mod qops;
pub mod strong;
pub mod weak;

pub use error::{CoolError, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// 2π, for unit conversions.
pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Convert a frequency quoted as 2π × `x` MHz into rad/µs.
///
/// 1 MHz = 1/µs, so 2π × 40 MHz = `two_pi_mhz(40.0)` = 251.33 rad/µs.
pub fn two_pi_mhz(x: f64) -> f64 {
    TWO_PI * x
}
