//! `E|S|^{-p} = kappa_p int_0^inf prod_j J_0(a_j t) t^{p-1} dt` by panel quadrature.

use crate::constants::kappa_p;
use crate::error::{convergence, domain, Result};
use crate::specfun::bessel::j0;

use super::gauss;
use super::tail::{Expansion, FAST};
use super::{check_p, CoefficientVector, MomentEstimate, MomentMethod};

/// Geometric panels below the first regular panel.
const GRADED_LEVELS: u32 = 24;
const MAX_ENVELOPE_START: f64 = 4000.0;
const MAX_ASYMPTOTIC_TERMS: usize = 20;
const REFINEMENTS: u32 = 4;

/// Overrides for [`quad_negative_moment_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    /// Start of the tail; default `max(40, 30 / min a_j)`.
    pub tail_start: Option<f64>,
    /// Regular panel width; default `min(0.25, 1.5 / sum a_j)`.
    pub mesh: Option<f64>,
    /// Panel budget before giving up.
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tail_start: None, mesh: None, max_panels: 4_000_000 }
    }
}

/// Quadrature estimate of `E|sum a_j xi_j|^{-p}` with half-width at most `tol`.
///
/// Gauss-Legendre panels cover `[0, T]`; the first panel uses `u = t^p`.
/// Beyond `T` the integral is bounded by the Bessel envelope when that is
/// small enough, and otherwise evaluated from the Hankel expansion.
pub fn quad_negative_moment(a: &CoefficientVector, p: f64, tol: f64) -> Result<MomentEstimate> {
    quad_negative_moment_with(a, p, tol, &QuadConfig::default())
}

/// [`quad_negative_moment`] with explicit configuration.
pub fn quad_negative_moment_with(a: &CoefficientVector, p: f64, tol: f64, cfg: &QuadConfig) -> Result<MomentEstimate> {
    check_p(p)?;
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let b = a.as_slice();
    if b.len() < 2 {
        return domain("quadrature needs at least two nonzero coefficients");
    }
    let kappa = kappa_p(p)?;
    let (sum, amin) = (a.sum(), a.min());
    let t0 = cfg.tail_start.unwrap_or((30.0 / amin).max(40.0));
    if t0 * amin < FAST {
        return domain(format!("tail start {t0} is below the asymptotic range"));
    }
    let (tail_start, tail, tail_err) = tail(b, p, t0, tol / (4.0 * kappa))?;
    let mut mesh = cfg.mesh.unwrap_or((1.5 / sum).min(0.25));
    for _ in 0..=REFINEMENTS {
        let panels = ((tail_start / mesh) as usize).saturating_add(64);
        if panels > cfg.max_panels {
            return convergence(format!("{panels} panels exceed the budget {}", cfg.max_panels));
        }
        let (head, head_err, count) = head(b, p, tail_start, mesh, sum);
        let value = kappa * (head + tail);
        let half_width = kappa * (head_err + tail_err) + 4.0 * f64::EPSILON * value.abs();
        if half_width <= tol {
            return Ok(MomentEstimate {
                value,
                half_width,
                method: MomentMethod::BesselQuadrature,
                meta: count as u64,
                warning: None,
            });
        }
        if tail_err * kappa > tol {
            break;
        }
        mesh *= 0.5;
    }
    convergence(format!("quadrature cannot reach half-width {tol:.3e} for p = {p}"))
}

fn product(b: &[f64], t: f64) -> f64 {
    b.iter().map(|&bj| j0(bj * t)).product()
}

/// `int_0^T` and its estimated error, with the panel count.
fn head(b: &[f64], p: f64, t_end: f64, mesh: f64, sum: f64) -> (f64, f64, usize) {
    let f = |t: f64| product(b, t) * t.powf(p - 1.0);
    let panel = |lo: f64, hi: f64, val: &mut f64, err: &mut f64| {
        let v8 = gauss::integrate(8, lo, hi, f);
        let v6 = gauss::integrate(6, lo, hi, f);
        *val += v8;
        *err += (v8 - v6).abs();
    };
    let (mut val, mut err, mut count) = (0.0, 0.0, 0usize);
    let h0 = (1.0 / sum).min(0.25).min(t_end);
    // [0, eps] in u = t^p, where the product is flat.
    let eps = h0 * 0.5f64.powi(GRADED_LEVELS as i32);
    let g = |u: f64| product(b, u.powf(1.0 / p)) / p;
    let v8 = gauss::integrate(8, 0.0, eps.powf(p), g);
    let v6 = gauss::integrate(6, 0.0, eps.powf(p), g);
    val += v8;
    err += (v8 - v6).abs();
    let mut lo = eps;
    while lo < h0 {
        let hi = (2.0 * lo).min(h0);
        panel(lo, hi, &mut val, &mut err);
        lo = hi;
        count += 1;
    }
    let mut lo = h0;
    while lo < t_end {
        let hi = (lo + lo.min(mesh)).min(t_end);
        panel(lo, hi, &mut val, &mut err);
        lo = hi;
        count += 1;
    }
    (val, err, count + 1)
}

/// Chooses the tail treatment; returns `(T, value, error)`.
fn tail(b: &[f64], p: f64, t0: f64, budget: f64) -> Result<(f64, f64, f64)> {
    let n = b.len() as f64;
    let c: f64 = b.iter().map(|&bj| (2.0 / (std::f64::consts::PI * bj)).sqrt()).product();
    let decay = 0.5 * n - p;
    // |int_T^inf| <= c T^{p - n/2} / (n/2 - p).
    let bound = |t: f64| c * t.powf(-decay) / decay;
    if bound(t0) <= budget {
        return Ok((t0, 0.0, bound(t0)));
    }
    let t_env = (c / (decay * budget)).powf(1.0 / decay);
    if t_env <= MAX_ENVELOPE_START {
        return Ok((t_env, 0.0, bound(t_env)));
    }
    if b.len() > MAX_ASYMPTOTIC_TERMS {
        return convergence("envelope tail too slow and too many factors for the expansion");
    }
    let e = Expansion::new(b, p - 1.0)?;
    let (v, err) = e.integrate_from(t0)?;
    Ok((t0, v, err))
}
