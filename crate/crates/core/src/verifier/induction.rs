//! Ingredients of the induction: extended concavity of `Phi_p`, the two-term
//! base case and the main inequality on explicit instances.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constants::{c_p, c_p_enclosure, PhiPair};
use crate::error::{domain, Result};
use crate::interval::Enclosure;
use crate::moments::{pair_series_enclosure, quad_negative_moment, CoefficientVector};
use crate::specfun::gamma;

use super::{LemmaId, Margin, MarginKind, Verdict, VerificationReport};

/// Tolerated negative margin in the concavity sweep.
pub const CONCAVITY_SLACK: f64 = 1e-12;
/// Tolerated negative margin for quadrature-based checks.
pub const QUAD_SLACK: f64 = 1e-7;
const QUAD_TOL: f64 = 1e-8;
const BUCKETS: usize = 20;

fn pt(x: f64) -> Enclosure {
    Enclosure::point(x)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p must lie in (0, 1), got {p}"));
    }
    Ok(())
}

/// `Phi(m) - (Phi(a) + Phi(b))/2` with `m = (a+b)/2`.
fn concavity_gap(phi: &PhiPair, a: f64, b: f64) -> Result<Enclosure> {
    let m = 0.5 * (a + b);
    Ok(phi.cap_enclosure(m)? - (phi.cap_enclosure(a)? + phi.cap_enclosure(b)?) * 0.5)
}

/// Midpoint concavity of `Phi_p` for pairs with mean at most 1.
///
/// Draws `trials` pairs with mean `m ~ U[0, 1]` and `a_- ~ U[0, 2m]`. The
/// report keeps, per mean bucket of width `1/20`, the pair with the least
/// margin, any violating pair, the boundary pairs `(0,2)`, `(1,1)`, `(0,0)`
/// and equal-pair checks.
pub fn verify_extended_concavity(p: f64, trials: usize, seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    check_p(p)?;
    if trials < 1000 {
        return domain(format!("at least 1000 trials are required, got {trials}"));
    }
    let phi = PhiPair::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(f64, f64)> = (0..trials)
        .map(|_| {
            let m: f64 = rng.gen_range(0.0..=1.0);
            let a = rng.gen_range(0.0..=2.0 * m);
            (a, 2.0 * m - a)
        })
        .collect();
    let gaps = pairs.par_iter().map(|&(a, b)| concavity_gap(&phi, a, b)).collect::<Result<Vec<_>>>()?;
    let slack = MarginKind::Slack { slack: CONCAVITY_SLACK };
    let margin = |label: &str, a: f64, b: f64, v: Enclosure| {
        Margin::with_kind(label, &[("p", p), ("a_minus", a), ("a_plus", b)], v, slack)
    };
    let mut worst: Vec<Option<usize>> = vec![None; BUCKETS];
    let mut margins = Vec::new();
    for (i, (&(a, b), g)) in pairs.iter().zip(&gaps).enumerate() {
        let k = ((0.5 * (a + b) * BUCKETS as f64) as usize).min(BUCKETS - 1);
        if worst[k].is_none_or(|j| g.lo() < gaps[j].lo()) {
            worst[k] = Some(i);
        }
        let m = margin("random_pair", a, b, *g);
        if m.verdict() != Verdict::Verified {
            margins.push(m);
        }
    }
    for i in worst.into_iter().flatten() {
        let (a, b) = pairs[i];
        margins.push(margin("random_pair_bucket_worst", a, b, gaps[i]));
    }
    margins.push(margin("boundary_pair", 0.0, 2.0, concavity_gap(&phi, 0.0, 2.0)?));
    for x in [0.0, 0.3, 0.5, 1.0] {
        let v = concavity_gap(&phi, x, x)?;
        margins.push(Margin::equality("equal_pair", &[("p", p), ("a_minus", x), ("a_plus", x)], v, CONCAVITY_SLACK));
    }
    let min = gaps.iter().map(|g| g.lo()).fold(f64::INFINITY, f64::min);
    let notes = vec![format!("{trials} random pairs (seed {seed}); least lower margin {min:.3e}")];
    let grid = format!("{trials} pairs with mean in [0, 1] at p = {p}");
    Ok(VerificationReport::new(LemmaId::ExtConcavity, grid, margins, notes, started))
}

/// `E|xi_1 + z xi_2|^{-p} <= C_p Phi_p(|z|^2)` on `x = |z|^2` in `x_grid`.
pub fn verify_base_case(p: f64, x_grid: &[f64]) -> Result<VerificationReport> {
    let started = Instant::now();
    check_p(p)?;
    if x_grid.is_empty() {
        return domain("empty x grid");
    }
    if let Some(x) = x_grid.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return domain(format!("x grid must lie in [0, 1], got {x}"));
    }
    let phi = PhiPair::new(p)?;
    let cp = c_p_enclosure(p)?;
    let rows = x_grid
        .par_iter()
        .map(|&x| Ok((pair_series_enclosure(p, x)?, phi.cap_enclosure(x)?)))
        .collect::<Result<Vec<(Enclosure, Enclosure)>>>()?;
    let mut margins = Vec::new();
    for (&x, (lhs, cap)) in x_grid.iter().zip(&rows) {
        let at = [("p", p), ("x", x)];
        let gap = cp * *cap - *lhs;
        if x == 1.0 {
            margins.push(Margin::equality("equality_at_one", &at, gap, 1e-8));
        } else {
            margins.push(Margin::positive("cap_bound_minus_moment", &at, gap));
        }
    }
    let mut order: Vec<usize> = (0..x_grid.len()).collect();
    order.sort_by(|&i, &j| x_grid[i].total_cmp(&x_grid[j]));
    for w in order.windows(2) {
        let (i, j) = (w[0], w[1]);
        if x_grid[j] > x_grid[i] {
            let at = [("p", p), ("x", x_grid[i]), ("x_next", x_grid[j])];
            margins.push(Margin::positive("moment_increment", &at, rows[j].0 - rows[i].0));
            margins.push(Margin::positive("cap_decrement", &at, rows[i].1 - rows[j].1));
        }
    }
    if !x_grid.contains(&0.0) {
        let v = cp * phi.cap_enclosure(0.0)? - 1.0;
        margins.push(Margin::positive("cap_bound_minus_moment", &[("p", p), ("x", 0.0)], v));
    }
    let grid = format!("{} values of x in [0, 1] at p = {p}", x_grid.len());
    Ok(VerificationReport::new(LemmaId::BaseCase, grid, margins, Vec::new(), started))
}

/// `count` random unit vectors with `n` uniform in `n_range` and entries
/// drawn from `U(0.05, 1)` before normalisation.
pub fn random_unit_instances(
    count: usize,
    n_range: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Result<Vec<CoefficientVector>> {
    if *n_range.start() < 1 || n_range.is_empty() {
        return domain("instance sizes must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(n_range.clone());
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            CoefficientVector::normalized(&a)
        })
        .collect()
}

fn is_equal_pair(a: &CoefficientVector) -> bool {
    let s = a.as_slice();
    s.len() == 2 && (s[0] - s[1]).abs() <= 1e-12
}

/// `E|sum a_j xi_j|^{-p} <= C_p` and `a_max^p E|sum a_j xi_j|^{-p} <= C_p Phi_p(1/a_max^2 - 1)`
/// for unit instances, by quadrature.
pub fn verify_main_inequality(p: f64, instances: &[CoefficientVector]) -> Result<VerificationReport> {
    let started = Instant::now();
    check_p(p)?;
    for a in instances {
        if a.len() < 2 {
            return domain("instances need at least two nonzero coefficients");
        }
        if (a.norm() - 1.0).abs() > 1e-12 {
            return domain(format!("instance is not unit-normalised: norm {}", a.norm()));
        }
    }
    let cp = c_p(p)?;
    let phi = PhiPair::new(p)?;
    let rows: Vec<Vec<Margin>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let at = [("p", p), ("instance", i as f64), ("n", a.len() as f64)];
            let unknown = Enclosure::new(f64::NEG_INFINITY, f64::INFINITY);
            let (moment, hw) = match quad_negative_moment(a, p, QUAD_TOL) {
                Ok(e) => (e.value, e.half_width),
                Err(_) => return vec![Margin::slack("c_p_minus_moment", &at, unknown, QUAD_SLACK)],
            };
            let m = Enclosure::new(moment - hw, moment + hw);
            let amax = a.max();
            let x = 1.0 / (amax * amax) - 1.0;
            let cap = phi.cap(x.max(0.0)).unwrap_or(f64::NAN);
            let scaled = m * amax.powf(p);
            let strong = pt(cp * cap) - scaled;
            if is_equal_pair(a) {
                vec![
                    Margin::equality("c_p_minus_moment", &at, pt(cp) - m, QUAD_TOL),
                    Margin::equality("cap_form_margin", &at, strong, QUAD_TOL),
                ]
            } else {
                vec![
                    Margin::slack("c_p_minus_moment", &at, pt(cp) - m, QUAD_SLACK),
                    Margin::slack("cap_form_margin", &at, strong, QUAD_SLACK),
                ]
            }
        })
        .collect();
    let margins: Vec<Margin> = rows.into_iter().flatten().collect();
    let mut notes = Vec::new();
    if let Some((i, a)) = instances.iter().enumerate().find(|(_, a)| {
        let s = a.as_slice();
        s.len() >= 8 && s.iter().all(|&x| (x - s[0]).abs() <= 1e-12)
    }) {
        if let Ok(e) = quad_negative_moment(a, p, QUAD_TOL) {
            let g = gamma(1.0 - 0.5 * p)?;
            notes.push(format!(
                "instance {i}: n = {} equal weights, moment {:.10} vs Gaussian value Gamma(1-p/2) = {g:.10}",
                a.len(),
                e.value
            ));
        }
    }
    let grid = format!("{} unit instances at p = {p}", instances.len());
    Ok(VerificationReport::new(LemmaId::MainInequality, grid, margins, notes, started))
}
