//! Complex special functions: Gamma, the Gamma ratio `xi`, and the
//! dimension-1 Bessel family.

mod bessel;
mod gamma;

pub use bessel::{bessel_dim1, bessel_j, bessel_y, BesselKind, BESSEL_MAX_ARG};
pub use gamma::{gamma, gamma_real, ln_gamma, xi, xi_product_limit, POLE_TOL};
