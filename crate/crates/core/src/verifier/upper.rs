//! `F_p <= U_p` and `U_p <= G_p`.

use std::time::Instant;

use rayon::prelude::*;

use crate::constants::{d_func_enclosure, psi_2_enclosure};
use crate::error::{domain, Result};
use crate::interval::Enclosure;
use crate::specfun::gamma_enclosure;

use super::{certify_f, check_p_grid, LemmaId, Margin, VerificationReport};

/// `b_0` of the comparison functions.
pub const B0: f64 = 1.295;
const SPLIT: f64 = 2.59;
/// Lower bound for `Gamma` on `(0, inf)` used in the relaxed form.
const GAMMA_FLOOR: f64 = 0.88;

fn pt(x: f64) -> Enclosure {
    Enclosure::point(x)
}

fn b0() -> Enclosure {
    pt(B0)
}

/// `b_0 pi`.
fn b0_pi() -> Enclosure {
    b0() * Enclosure::pi()
}

/// `U_p(s) = 2^{p-1} s^{-p/2} (G(p/2) - G(p/2+2)/(4s) + G(p/2+4)/(32 s^2))
///          + 2.59^p (1.295 pi)^{-s/2} / (s/2 - p)`.
pub fn u_p_enclosure(p: f64, s: f64) -> Result<Enclosure> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("U_p requires 0 < p < 1, got {p}"));
    }
    if !(s > 2.0 * p) || !s.is_finite() {
        return domain(format!("U_p requires s > 2p, got p = {p}, s = {s}"));
    }
    let h = pt(p) * 0.5;
    let se = pt(s);
    let poly =
        gamma_enclosure(h)? - gamma_enclosure(h + 2.0)? / (se * 4.0) + gamma_enclosure(h + 4.0)? / (se.sqr() * 32.0);
    let head = pt(2.0).pow_f64(p - 1.0)? * se.pow_f64(-0.5 * p)? * poly;
    let tail = pt(SPLIT).pow_f64(p)? * b0_pi().pow_f64(-0.5 * s)? / (pt(0.5 * s) - p);
    Ok(head + tail)
}

/// `G_p(s) = s^{-p/2} Psi_p(2)`.
pub fn g_p_enclosure(p: f64, s: f64) -> Result<Enclosure> {
    if !(s > 0.0) {
        return domain(format!("G_p requires s > 0, got {s}"));
    }
    Ok(pt(s).pow_f64(-0.5 * p)? * psi_2_enclosure(p)?)
}

/// `2 b_0^p (b_0 pi)^{-3/2} / (3/2 - p)`.
fn tail_term(p: f64) -> Result<Enclosure> {
    Ok(b0().pow_f64(p)? * 2.0 * b0_pi().pow_f64(-1.5)? / (pt(1.5) - p))
}

/// `(p/2+2)(p/2+3)/32`.
fn quad_term(p: f64) -> Enclosure {
    (pt(0.5 * p) + 2.0) * (pt(0.5 * p) + 3.0) / 32.0
}

/// Relaxed `s = 3` form as printed: `(R(p), L(p))` with
/// `R = 7.92 (D - 1) + 3/4` and `L = (p/2+2)(p/2+3)/32 + 2 b_0^p (b_0 pi)^{-3/2}/(3/2-p)`.
pub fn up_gp_relaxed_form(p: f64) -> Result<(Enclosure, Enclosure)> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p must lie in [0, 1], got {p}"));
    }
    let dm1 = if p == 0.0 {
        pt(0.0)
    } else if p == 1.0 {
        pt(f64::INFINITY)
    } else {
        d_func_enclosure(p)? - 1.0
    };
    let r = dm1 * (9.0 * GAMMA_FLOOR) + 0.75;
    Ok((r, quad_term(p) + tail_term(p)?))
}

/// `R'(0) = 7.92 (ln 2 - gamma) / 2` for the relaxed form.
fn relaxed_form_slope() -> Enclosure {
    (Enclosure::ln2() - Enclosure::euler_gamma()) * (9.0 * GAMMA_FLOOR * 0.5)
}

/// `L''(p)` of the relaxed form.
fn relaxed_form_l_second(p: f64) -> Result<Enclosure> {
    let lb = b0().ln()?;
    let q = pt(1.5) - p;
    let bracket = lb.sqr() / q + lb * 2.0 / q.sqr() + q.powi(-3) * 2.0;
    Ok(pt(1.0 / 64.0) + b0().pow_f64(p)? * 2.0 * b0_pi().pow_f64(-1.5)? * bracket)
}

/// Exact `s = 3` inequality after multiplying by `2^{1-p} 3^{p/2+2}`:
/// `9 G(p/2)(D-1) + G(p/2+2)(24 - (p/2+2)(p/2+3))/32 - 3^{p/2+2} 2 b_0^p (b_0 pi)^{-3/2}/(3/2-p)`.
pub fn up_gp_exact_s3(p: f64) -> Result<Enclosure> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p must lie in (0, 1), got {p}"));
    }
    let h = pt(0.5 * p);
    let rhs = gamma_enclosure(h)? * (d_func_enclosure(p)? - 1.0) * 9.0
        + gamma_enclosure(h + 2.0)? * (pt(24.0) - quad_term(p) * 32.0) / 32.0;
    let lhs = pt(3.0).pow_f64(0.5 * p + 2.0)? * tail_term(p)?;
    Ok(rhs - lhs)
}

/// Relaxed form with the factor `3^{p/2+2}` restored.
fn corrected_relaxed(p: f64) -> Result<Enclosure> {
    let (r, _) = up_gp_relaxed_form(p)?;
    Ok(r - quad_term(p) - pt(3.0).pow_f64(0.5 * p + 2.0)? * tail_term(p)?)
}

/// `F_p(s) <= U_p(s)` on a grid of certified `F_p(s)` enclosures.
pub fn verify_fp_le_up(p_grid: &[f64], s_grid: &[f64]) -> Result<VerificationReport> {
    let started = Instant::now();
    check_p_grid(p_grid)?;
    if s_grid.is_empty() {
        return domain("empty s grid");
    }
    let p_max = p_grid.iter().copied().fold(0.0, f64::max);
    if let Some(s) = s_grid.iter().find(|&&s| !(s > 2.0 * p_max) || !s.is_finite()) {
        return domain(format!("s = {s} violates s > 2p for p = {p_max}"));
    }
    let rows: Vec<Result<(Vec<Margin>, Vec<String>)>> = s_grid
        .par_iter()
        .map(|&s| {
            let us = p_grid.iter().map(|&p| u_p_enclosure(p, s)).collect::<Result<Vec<_>>>()?;
            let (fs, notes) = certify_f(p_grid, s, |i, f| us[i].lo() - f.hi() > 0.0);
            let margins = p_grid
                .iter()
                .zip(&fs)
                .zip(&us)
                .map(|((&p, f), u)| Margin::positive("u_minus_f", &[("p", p), ("s", s)], *u - *f))
                .collect();
            Ok((margins, notes))
        })
        .collect();
    let mut margins = Vec::new();
    let mut notes = Vec::new();
    for r in rows {
        let (m, n) = r?;
        margins.extend(m);
        notes.extend(n);
    }
    let grid = format!("{} p values x {} s values", p_grid.len(), s_grid.len());
    Ok(VerificationReport::new(LemmaId::FpLeUp, grid, margins, notes, started))
}

/// `U_p(s) <= G_p(s)` for `s >= 3` along the reduction to `s = 3`.
///
/// Checks the monotonicity claims, the tangent endpoint margins of the
/// relaxed form, convexity of both sides, the exact `s = 3` inequality, and
/// direct comparisons at `s` in `{3, 5, 10}`.
pub fn verify_up_le_gp(p_grid: &[f64]) -> Result<VerificationReport> {
    let started = Instant::now();
    check_p_grid(p_grid)?;
    let mut margins = Vec::new();
    let mut notes = Vec::new();

    // Left side decreasing for s > 3: -log(b0 pi)/2 + 3/(2s) < 0 at s = 3.
    let slope = b0_pi().ln()? * 0.5 - 0.5;
    margins.push(Margin::positive("lhs_log_slope_bound_negated", &[("s", 3.0)], slope));

    // Tangent at 0 of the relaxed right side against its left side.
    let (r0, l0) = up_gp_relaxed_form(0.0)?;
    let (_, l1) = up_gp_relaxed_form(1.0)?;
    let tangent1 = r0 + relaxed_form_slope();
    let end0 = r0 - l0;
    let end1 = tangent1 - l1;
    margins.push(Margin::positive("tangent_endpoint", &[("p", 0.0)], end0));
    margins.push(Margin::positive("tangent_endpoint", &[("p", 1.0)], end1));
    margins.push(Margin::positive("tangent_endpoint_over_0.4", &[("p", 0.0)], end0 - 0.4));
    margins.push(Margin::positive("tangent_endpoint_over_0.3", &[("p", 1.0)], end1 - 0.3));
    notes.push(format!("tangent endpoint margins: {:.6} at p = 0, {:.6} at p = 1", end0.mid(), end1.mid()));

    // Slope of the tangent against a central difference of the relaxed R.
    let h = 1e-4;
    let fd = (up_gp_relaxed_form(h)?.0.mid() - up_gp_relaxed_form(0.0)?.0.mid()) / h;
    let slope_err = (fd - relaxed_form_slope().mid()).abs();
    margins.push(Margin::positive("tangent_slope_vs_difference", &[("h", h)], pt(1e-3) - slope_err));

    let per_p: Vec<Result<Vec<Margin>>> = p_grid
        .par_iter()
        .map(|&p| {
            let at = [("p", p)];
            let mut m = Vec::new();
            // Right side increasing in s needs D(p) > 1.
            m.push(Margin::positive("d_minus_one", &at, d_func_enclosure(p)? - 1.0));
            m.push(Margin::positive("l_second_derivative", &at, relaxed_form_l_second(p)?));
            let (r, l) = up_gp_relaxed_form(p)?;
            m.push(Margin::positive("tangent_minus_l", &at, r0 + relaxed_form_slope() * p - l));
            m.push(Margin::positive("r_minus_l", &at, r - l));
            m.push(Margin::positive("exact_s3", &at, up_gp_exact_s3(p)?));
            for s in [3.0, 5.0, 10.0] {
                let gap = g_p_enclosure(p, s)? - u_p_enclosure(p, s)?;
                m.push(Margin::positive("g_minus_u", &[("p", p), ("s", s)], gap));
            }
            Ok(m)
        })
        .collect();
    for m in per_p {
        margins.extend(m?);
    }

    // Convexity of R through second differences of D on the grid.
    let ds = p_grid.iter().map(|&p| d_func_enclosure(p)).collect::<Result<Vec<_>>>()?;
    for k in 1..p_grid.len().saturating_sub(1) {
        let (a, b, c) = (p_grid[k - 1], p_grid[k], p_grid[k + 1]);
        if ((c - b) - (b - a)).abs() > 1e-12 {
            continue;
        }
        let dd = ds[k - 1] + ds[k + 1] - ds[k] * 2.0;
        margins.push(Margin::positive("d_second_difference", &[("p", b)], dd));
    }

    let worst_corr = p_grid
        .iter()
        .filter_map(|&p| corrected_relaxed(p).ok().map(|e| (p, e.mid())))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    if let Some((p, v)) = worst_corr {
        notes.push(format!(
            "relaxed form with the factor 3^(p/2+2) restored has minimum {v:.4} at p = {p}; \
             the exact s = 3 form is checked instead"
        ));
    }
    let grid = format!("{} p values; direct checks at s = 3, 5, 10", p_grid.len());
    Ok(VerificationReport::new(LemmaId::UpLeGp, grid, margins, notes, started))
}
