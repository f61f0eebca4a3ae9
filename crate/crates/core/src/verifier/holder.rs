//! Interpolation between `s = 2` and `s = 3`, and the assembled bound
//! `Psi_p(s) <= Psi_p(2)`.

use std::time::Instant;

use rayon::prelude::*;

use crate::constants::psi_2_enclosure;
use crate::error::{domain, Result};
use crate::interval::Enclosure;

use super::upper::g_p_enclosure;
use super::{certify_f, check_p_grid, LemmaId, Margin, VerificationReport};

/// Tolerance for margins that vanish identically but involve a certified `F_p`.
pub const F_EQUALITY_TOL: f64 = 1e-3;
/// Tolerance for closed-form margins that vanish identically.
const CLOSED_EQUALITY_TOL: f64 = 1e-12;
/// Width at which `F_p(2)` and `F_p(3)` are considered settled.
const ANCHOR_WIDTH: f64 = 1e-6;

fn pt(x: f64) -> Enclosure {
    Enclosure::point(x)
}

fn anchor(p: f64, s: f64) -> (Enclosure, Vec<String>) {
    let (f, notes) = certify_f(&[p], s, |_, f| f.width() <= ANCHOR_WIDTH);
    (f[0], notes)
}

/// `x^lambda y^{1-lambda}` for positive enclosures.
fn interpolate(x: Enclosure, y: Enclosure, lambda: f64) -> Result<Enclosure> {
    Ok(x.pow_f64(lambda)? * y.pow_f64(1.0 - lambda)?)
}

/// Checks each link of
/// `F(s) <= F(2)^l F(3)^{1-l} <= G(2) e^{-p(s-2)/4} <= G(2) s^{-p/2} 2^{p/2}`
/// with `l = 3 - s`, and the resulting `Psi_p(s) <= Psi_p(2)`.
#[allow(clippy::eq_op)]
pub fn verify_holder_chain(p: f64, s_grid: &[f64]) -> Result<VerificationReport> {
    let started = Instant::now();
    check_p_grid(&[p])?;
    if s_grid.is_empty() {
        return domain("empty s grid");
    }
    if let Some(s) = s_grid.iter().find(|&&s| !(2.0..=3.0).contains(&s)) {
        return domain(format!("s grid must lie in [2, 3], got {s}"));
    }
    let mut notes = Vec::new();
    let (f2, n2) = anchor(p, 2.0);
    let (f3, n3) = anchor(p, 3.0);
    notes.extend(n2);
    notes.extend(n3);
    let g2 = g_p_enclosure(p, 2.0)?;
    let psi2 = psi_2_enclosure(p)?;
    let mut margins = vec![
        Margin::equality("f2_minus_g2", &[("p", p), ("s", 2.0)], f2 - g2, F_EQUALITY_TOL),
        Margin::positive("fp3_bound_minus_f3", &[("p", p), ("s", 3.0)], pt(-0.25 * p).exp() * g2 - f3),
    ];

    let inner: Vec<f64> = s_grid.iter().copied().filter(|&s| s > 2.0 && s < 3.0).collect();
    let bounds = inner.iter().map(|&s| interpolate(f2, f3, 3.0 - s)).collect::<Result<Vec<_>>>()?;
    let fs = if inner.is_empty() {
        Vec::new()
    } else {
        let rows: Vec<(Vec<Enclosure>, Vec<String>)> =
            inner.par_iter().zip(&bounds).map(|(&s, b)| certify_f(&[p], s, |_, f| b.lo() > f.hi())).collect();
        rows.into_iter()
            .map(|(f, n)| {
                notes.extend(n);
                f[0]
            })
            .collect()
    };

    for &s in s_grid {
        let at = [("p", p), ("s", s)];
        let lambda = 3.0 - s;
        let log_link = pt(s).pow_f64(-0.5 * p)? * pt(2.0).pow_f64(0.5 * p)? - pt(-0.25 * p * (s - 2.0)).exp();
        let combined = psi2 - pt(s).pow_f64(0.5 * p)? * interpolate(g2, f3, lambda)?;
        if s == 2.0 {
            margins.push(Margin::equality("holder_link", &at, f2 - f2, F_EQUALITY_TOL));
            margins.push(Margin::equality("log_concavity_link", &at, log_link, CLOSED_EQUALITY_TOL));
            margins.push(Margin::equality("psi_conclusion", &at, combined, F_EQUALITY_TOL));
        } else if s == 3.0 {
            margins.push(Margin::equality("holder_link", &at, f3 - f3, F_EQUALITY_TOL));
            margins.push(Margin::positive("log_concavity_link", &at, log_link));
            margins.push(Margin::positive("psi_conclusion", &at, combined));
        } else {
            let k = inner.iter().position(|&x| x == s).expect("interior point");
            margins.push(Margin::positive("holder_link", &at, bounds[k] - fs[k]));
            margins.push(Margin::positive("log_concavity_link", &at, log_link));
            margins.push(Margin::positive("psi_conclusion", &at, combined));
        }
    }
    let grid = format!("{} values of s in [2, 3] at p = {p}", s_grid.len());
    Ok(VerificationReport::new(LemmaId::HolderChain, grid, margins, notes, started))
}

/// Direct certified sweep of `Psi_p(2) - Psi_p(s)` over `p_grid x s_grid`.
/// At `s = 2` the margin vanishes and is checked as an equality.
pub fn verify_psi_master(p_grid: &[f64], s_grid: &[f64]) -> Result<VerificationReport> {
    let started = Instant::now();
    check_p_grid(p_grid)?;
    if s_grid.is_empty() {
        return domain("empty s grid");
    }
    if let Some(s) = s_grid.iter().find(|&&s| !(s >= 2.0) || !s.is_finite()) {
        return domain(format!("s grid must lie in [2, inf), got {s}"));
    }
    let psi2 = p_grid.iter().map(|&p| psi_2_enclosure(p)).collect::<Result<Vec<_>>>()?;
    let rows: Vec<Result<(Vec<Margin>, Vec<String>)>> = s_grid
        .par_iter()
        .map(|&s| {
            let scale = p_grid.iter().map(|&p| pt(s).pow_f64(0.5 * p)).collect::<Result<Vec<_>>>()?;
            let gap = |i: usize, f: Enclosure| psi2[i] - scale[i] * f;
            let (fs, notes) = if s == 2.0 {
                certify_f(p_grid, s, |i, f| gap(i, f).mag() <= 0.1 * F_EQUALITY_TOL)
            } else {
                certify_f(p_grid, s, |i, f| gap(i, f).lo() > 0.0)
            };
            let margins = p_grid
                .iter()
                .zip(&fs)
                .enumerate()
                .map(|(i, (&p, &f))| {
                    let at = [("p", p), ("s", s)];
                    if s == 2.0 {
                        Margin::equality("psi2_minus_psi", &at, gap(i, f), F_EQUALITY_TOL)
                    } else {
                        Margin::positive("psi2_minus_psi", &at, gap(i, f))
                    }
                })
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
    Ok(VerificationReport::new(LemmaId::PsiMaster, grid, margins, notes, started))
}
