//! Spectral and scattering data for the half-line operators
//! `-d^2/dr^2 + (m^2 - 1/4)/r^2` with boundary parameter `kappa`
//! (family `H_{m,kappa}`) or, at `m = 0`, `nu` (family `H_0^nu`).
//!
//! The crate computes eigenvalues, spectral singularities, scattering
//! symbols and resolvent kernels, and checks numerically that the winding
//! number of the wave-operator symbol counts eigenvalues (on the square for
//! `Re m != 0`, per period for `m = i n`).

pub mod cli;
pub mod contour;
pub mod error;
pub mod index;
pub mod model;
pub mod opcalc;
pub mod quad;
pub mod scattering;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Shorthand used throughout the crate.
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
