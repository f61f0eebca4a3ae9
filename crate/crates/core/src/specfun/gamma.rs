//! Gamma, log-gamma and digamma.
//!
//! Point values use the Lanczos approximation (g = 7, nine coefficients) with
//! reflection below one half. Certified enclosures shift the argument above
//! fifteen and apply Stirling's series, whose remainder for a real positive
//! argument is bounded by the first omitted term.

use crate::error::{domain, Result};
use crate::interval::Enclosure;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Location of the minimum of Gamma on the positive axis.
pub const GAMMA_ARGMIN: f64 = 1.461_632_144_968_362_3;

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// `Gamma(x)` for `x > 0`, relative error below `1e-13`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("gamma requires x > 0, got {x}"));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return pi / ((pi * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x > 171.0 {
        return f64::INFINITY;
    }
    if x.fract() == 0.0 && x <= 30.0 {
        return (1..x as usize).fold(1.0, |acc, k| acc * k as f64);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// `ln Gamma(x)` for `x > 0`, absolute error below `1e-13 max(1, |ln Gamma(x)|)`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("log_gamma requires x > 0, got {x}"));
    }
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return Ok((pi / (pi * x).sin()).ln() - log_gamma(1.0 - x)?);
    }
    if x < 30.0 {
        return Ok(gamma_unchecked(x).ln());
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Digamma `psi(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("digamma requires x > 0, got {x}"));
    }
    let mut z = x;
    let mut acc = 0.0;
    while z < 12.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let z2 = 1.0 / (z * z);
    let mut series = 0.0;
    for (k, b) in BERNOULLI.iter().enumerate().take(8).rev() {
        series = series * z2 + b / (2.0 * (k + 1) as f64);
    }
    Ok(acc + z.ln() - 0.5 / z - series * z2)
}

/// `B_2, B_4, ..., B_20`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const STIRLING_SHIFT_TO: f64 = 15.0;
const STIRLING_TERMS: usize = 8;

fn shift_count(lo: f64) -> usize {
    if lo >= STIRLING_SHIFT_TO {
        0
    } else {
        (STIRLING_SHIFT_TO - lo).ceil() as usize
    }
}

/// Certified `ln Gamma` over a positive enclosure.
pub fn log_gamma_enclosure(x: Enclosure) -> Result<Enclosure> {
    if !(x.lo() > 0.0) {
        return domain(format!("log_gamma requires x > 0, got {x:?}"));
    }
    let n = shift_count(x.lo());
    let mut shift = Enclosure::point(0.0);
    for k in 0..n {
        shift += (x + k as f64).ln()?;
    }
    let z = x + n as f64;
    let half_ln_2pi = (Enclosure::pi() * 2.0).ln()? * 0.5;
    let lnz = z.ln()?;
    let mut s = (z - 0.5) * lnz - z + half_ln_2pi;
    let zinv = z.try_recip()?;
    let zinv2 = zinv.sqr();
    let mut zpow = zinv;
    for (k, b) in BERNOULLI.iter().enumerate().take(STIRLING_TERMS) {
        let kk = (k + 1) as f64;
        s += zpow * (b / (2.0 * kk * (2.0 * kk - 1.0)));
        zpow *= zinv2;
    }
    let kk = (STIRLING_TERMS + 1) as f64;
    let rem = BERNOULLI[STIRLING_TERMS].abs() / (2.0 * kk * (2.0 * kk - 1.0)) * zpow.hi();
    s += Enclosure::symmetric(rem);
    Ok(s - shift)
}

/// Certified `Gamma` over a positive enclosure.
pub fn gamma_enclosure(x: Enclosure) -> Result<Enclosure> {
    Ok(log_gamma_enclosure(x)?.exp())
}

/// Certified digamma over a positive enclosure.
pub fn digamma_enclosure(x: Enclosure) -> Result<Enclosure> {
    if !(x.lo() > 0.0) {
        return domain(format!("digamma requires x > 0, got {x:?}"));
    }
    let n = shift_count(x.lo());
    let mut shift = Enclosure::point(0.0);
    for k in 0..n {
        shift += (x + k as f64).try_recip()?;
    }
    let z = x + n as f64;
    let zinv = z.try_recip()?;
    let zinv2 = zinv.sqr();
    let mut s = z.ln()? - zinv * 0.5;
    let mut zpow = zinv2;
    for (k, b) in BERNOULLI.iter().enumerate().take(STIRLING_TERMS) {
        s -= zpow * (b / (2.0 * (k + 1) as f64));
        zpow *= zinv2;
    }
    let rem = BERNOULLI[STIRLING_TERMS].abs() / (2.0 * (STIRLING_TERMS + 1) as f64) * zpow.hi();
    s += Enclosure::symmetric(rem);
    Ok(s - shift)
}

/// `(ln Gamma)''(z) = sum_{n >= 0} 1/(n+z)^2`: the first `terms` summands
/// plus the integral-comparison tail `[1/(terms+z), 1/(terms+z-1)]`.
pub fn log_gamma_dd(z: f64, terms: usize) -> Result<Enclosure> {
    log_gamma_dd_enclosure(Enclosure::point(z), terms)
}

pub fn log_gamma_dd_enclosure(z: Enclosure, terms: usize) -> Result<Enclosure> {
    if !(z.lo() > 0.0) {
        return domain(format!("log_gamma_dd requires z > 0, got {z:?}"));
    }
    if terms == 0 {
        return domain("log_gamma_dd requires at least one term");
    }
    let mut s = Enclosure::point(0.0);
    for n in 0..terms {
        s += (z + n as f64).sqr().try_recip()?;
    }
    let nz = z + terms as f64;
    let lower = nz.try_recip()?.lo();
    let upper = (nz - 1.0).try_recip()?.hi();
    Ok(s + Enclosure::new(lower, upper))
}
