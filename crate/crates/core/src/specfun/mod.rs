//! Certified elementary and special functions.

pub mod bessel;
pub(crate) mod dd;
pub mod gamma;

pub use bessel::{
    bessel_j, bessel_j0_enclosure, bessel_j1_enclosure, j01_point_enclosure, j0_taylor_coeffs, BesselOrder,
};
pub use gamma::{
    digamma, digamma_enclosure, gamma, gamma_enclosure, log_gamma, log_gamma_dd, log_gamma_dd_enclosure,
    log_gamma_enclosure,
};

use crate::error::{domain, range, Result};

/// `min{1, sqrt(2/(pi t))}`, an upper bound for `|J_0(t)|` on `t > 0`.
pub fn j0_envelope(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("j0_envelope requires t > 0, got {t}"));
    }
    Ok((2.0 / (std::f64::consts::PI * t)).sqrt().min(1.0))
}

/// `exp(-t^2/4 - t^4/64)`, an upper bound for `|J_0(t)|` on `(0, 2.59)`.
pub fn kk_bound(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 2.59) {
        return range(format!("kk_bound is only claimed on (0, 2.59), got {t}"));
    }
    Ok((-t * t / 4.0 - t.powi(4) / 64.0).exp())
}
