//! Log-convexity, monotonicity and positivity of `D(p) = 2^{p/2} Gamma(1-p) / Gamma(1-p/2)^3`.

use std::time::Instant;

use rayon::prelude::*;

use crate::constants::{d_func_enclosure, log_d_enclosure};
use crate::error::{domain, Result};
use crate::interval::Enclosure;
use crate::specfun::log_gamma_dd_enclosure;

use super::{check_p_grid, LemmaId, Margin, VerificationReport};

/// Step of the second differences.
pub const SECOND_DIFF_STEP: f64 = 1e-3;
const SERIES_TERMS: usize = 64;

fn pt(x: f64) -> Enclosure {
    Enclosure::point(x)
}

/// `1/x^2 - 2/(x+1/2)^2 + 4 - pi^2/2`, a lower bound for
/// `(ln Gamma)''(x) - 2 (ln Gamma)''(x + 1/2)` on `(0, 1/2]`.
pub fn lower_bound_second_derivative(x: f64) -> Result<Enclosure> {
    if !(x > 0.0 && x <= 0.5) {
        return domain(format!("the bound is stated for 0 < x <= 1/2, got {x}"));
    }
    let xe = pt(x);
    Ok(xe.sqr().try_recip()? - (xe + 0.5).sqr().try_recip()? * 2.0 + 4.0 - Enclosure::pi().sqr() * 0.5)
}

/// Derivative of [`lower_bound_second_derivative`]: `-2/x^3 + 4/(x+1/2)^3`.
fn lower_bound_slope(x: f64) -> Result<Enclosure> {
    let xe = pt(x);
    Ok(xe.powi(3).try_recip()? * -2.0 + (xe + 0.5).powi(3).try_recip()? * 4.0)
}

/// `f''(x)` for `f(x) = ln Gamma(x) - 2 ln Gamma(x + 1/2)`.
fn f_second(x: f64) -> Result<Enclosure> {
    Ok(log_gamma_dd_enclosure(pt(x), SERIES_TERMS)? - log_gamma_dd_enclosure(pt(x + 0.5), SERIES_TERMS)? * 2.0)
}

/// Checks convexity of `ln D` directly (second differences centred at each
/// grid point) and along the proof path in `x = (1-p)/2`, plus `D > 1` and
/// monotonicity.
pub fn verify_d_logconvex(p_grid: &[f64]) -> Result<VerificationReport> {
    let started = Instant::now();
    check_p_grid(p_grid)?;
    let h = SECOND_DIFF_STEP;
    let rows: Vec<Result<Vec<Margin>>> = p_grid
        .par_iter()
        .map(|&p| {
            let at = [("p", p)];
            let mut m = Vec::new();
            if p - h >= 0.0 && p + h < 1.0 {
                let dd = log_d_enclosure(p - h)? + log_d_enclosure(p + h)? - log_d_enclosure(p)? * 2.0;
                m.push(Margin::positive("log_d_second_difference", &at, dd));
            }
            m.push(Margin::positive("log_d", &at, log_d_enclosure(p)?));
            let x = 0.5 * (1.0 - p);
            let xa = [("x", x)];
            let g = lower_bound_second_derivative(x)?;
            m.push(Margin::positive("lower_bound", &xa, g));
            m.push(Margin::positive("lower_bound_slope_negated", &xa, -lower_bound_slope(x)?));
            let fs = f_second(x)?;
            m.push(Margin::positive("f_second_minus_lower_bound", &xa, fs - g));
            Ok(m)
        })
        .collect();
    let mut margins = Vec::new();
    for r in rows {
        margins.extend(r?);
    }
    // Monotonicity along the grid.
    for w in p_grid.windows(2) {
        if w[1] > w[0] {
            let inc = log_d_enclosure(w[1])? - log_d_enclosure(w[0])?;
            margins.push(Margin::positive("log_d_increment", &[("p", w[0]), ("p_next", w[1])], inc));
        }
    }

    let end = lower_bound_second_derivative(0.5)?;
    let closed = pt(6.0) - Enclosure::pi().sqr() * 0.5;
    margins.push(Margin::positive("endpoint_value", &[("x", 0.5)], end));
    margins.push(Margin::equality("endpoint_minus_closed_form", &[("x", 0.5)], end - closed, 1e-12));
    let slope0 = (Enclosure::ln2() - Enclosure::euler_gamma()) * 0.5;
    margins.push(Margin::positive("log_d_slope_at_zero", &[("p", 0.0)], slope0));
    let (d1, d5) = (d_func_enclosure(0.1)?, d_func_enclosure(0.5)?);
    margins.push(Margin::positive("d_0.1_minus_one", &[("p", 0.1)], d1 - 1.0));
    margins.push(Margin::positive("d_0.5_minus_d_0.1", &[("p", 0.5)], d5 - d1));

    let notes = vec![format!("lower bound at x = 1/2 is {end}, closed form 6 - pi^2/2 = {closed}")];
    let grid = format!("{} p values, second differences with step {h}", p_grid.len());
    Ok(VerificationReport::new(LemmaId::DLogconvex, grid, margins, notes, started))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_value() {
        let e = lower_bound_second_derivative(0.5).unwrap();
        assert!(e.contains(6.0 - std::f64::consts::PI.powi(2) / 2.0));
        assert!(e.lo() > 1.065 && e.hi() < 1.0653);
    }

    #[test]
    fn bound_is_below_f_second() {
        for x in [0.01, 0.1, 0.25, 0.49, 0.5] {
            let fs = f_second(x).unwrap();
            let g = lower_bound_second_derivative(x).unwrap();
            assert!(fs.lo() > g.hi(), "{x}: {fs:?} {g:?}");
        }
    }

    #[test]
    fn domain() {
        assert!(lower_bound_second_derivative(0.0).is_err());
        assert!(lower_bound_second_derivative(0.6).is_err());
    }
}
