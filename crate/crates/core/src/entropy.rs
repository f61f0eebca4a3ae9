//! Rényi entropy of Steinhaus sums and the Gaussian upper bound.
//!
//! The radial density of `S = sum a_j xi_j` is
//! `f(r) = (1/2pi) int_0^inf prod_j J_0(a_j t) J_0(r t) t dt`.
//! For two terms it has the closed form
//! `f(r) = 1 / (pi^2 sqrt(4 a_1^2 a_2^2 - (r^2 - a_1^2 - a_2^2)^2))`
//! on the annulus `|a_1 - a_2| < r < a_1 + a_2`. For three or more terms the
//! integral is evaluated by Gauss-Legendre panels up to a cutoff `T_r` and
//! an asymptotic or envelope tail beyond.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::interval::Enclosure;
use crate::moments::gauss;
use crate::moments::tail::{Expansion, FAST};
use crate::moments::CoefficientVector;
use crate::specfun::{bessel::j0, log_gamma};
use crate::verifier::{LemmaId, Margin, MarginKind, VerificationReport};

/// Tolerated excess of a Steinhaus entropy over the Gaussian value.
pub const GAUSSIAN_SLACK: f64 = 1e-4;
/// Tolerated deviation of the reconstructed mass from one.
pub const MASS_TOL: f64 = 1e-6;
/// Tolerated deviation of the reconstructed second moment from `sum a_j^2`.
pub const SECOND_MOMENT_TOL: f64 = 1e-5;

const ORDER: usize = 8;
const T_CAP: f64 = 40_000.0;
const T_MIN: f64 = 40.0;
const ENVELOPE_T_MAX: f64 = 4_000.0;
const MAX_SINGULAR_TERMS: usize = 10;
const GRADE_LEVELS: usize = 8;
const GRADE_RATIO: f64 = 0.2;

/// Radial quadrature settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Approximate number of radial nodes.
    pub points: usize,
    /// Absolute tolerance for the tail of each density value.
    pub tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { points: 2048, tol: 1e-10 }
    }
}

impl GridSpec {
    fn panels(&self) -> Result<usize> {
        if self.points < 64 || !(self.tol > 0.0) {
            return domain(format!("grid needs at least 64 points and a positive tolerance, got {self:?}"));
        }
        Ok(self.points.div_ceil(ORDER))
    }
}

/// Radial density of a Steinhaus sum on Gauss-Legendre nodes.
///
/// `weights[i]` are plane quadrature weights: `int_{R^2} g(|x|) dx` is
/// approximated by `sum_i weights[i] g(grid[i])`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialDensity {
    pub a: CoefficientVector,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    /// Inner radius of the support annulus.
    pub inner_radius: f64,
    /// `sum a_j`; the density vanishes beyond it.
    pub tail_radius: f64,
    pub mass: f64,
    /// `|mass - 1|`.
    pub mass_error: f64,
    /// Number of slightly negative values clamped to zero.
    pub clamped: usize,
    pub notes: Vec<String>,
}

impl RadialDensity {
    /// `int g(|x|) f(|x|) dx` over the plane.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, g: F) -> f64 {
        self.grid.iter().zip(&self.values).zip(&self.weights).map(|((&r, &f), &w)| w * g(r, f)).sum()
    }

    /// `E|S|^2`.
    pub fn second_moment(&self) -> f64 {
        self.integrate(|r, f| r * r * f)
    }

    /// Area of the support annulus.
    pub fn support_area(&self) -> f64 {
        PI * (self.tail_radius.powi(2) - self.inner_radius.powi(2))
    }

    /// `h_p` of the reconstructed density for `p` in `[0, 1]`.
    pub fn renyi(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        if p == 0.0 {
            return Ok(self.support_area().ln());
        }
        if p == 1.0 {
            return Ok(-self.integrate(|_, f| if f > 0.0 { f * f.ln() } else { 0.0 }));
        }
        Ok(self.integrate(|_, f| f.powf(p)).ln() / (1.0 - p))
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p must lie in [0, 1], got {p}"));
    }
    Ok(())
}

/// Support annulus `[max(0, 2 a_max - sum a), sum a]`.
fn support(a: &[f64]) -> (f64, f64) {
    let sum: f64 = a.iter().sum();
    let max = a.iter().copied().fold(0.0, f64::max);
    let inner = 2.0 * max - sum;
    (if inner > 1e-12 * sum { inner } else { 0.0 }, sum)
}

/// Panel boundaries on `[u, v]`: `panels` uniform panels, with the end
/// panels subdivided geometrically towards `u` and/or `v`.
fn graded(u: f64, v: f64, panels: usize, at_u: bool, at_v: bool) -> Vec<f64> {
    let h = (v - u) / panels as f64;
    let mut e: Vec<f64> = (0..=panels).map(|k| u + k as f64 * h).collect();
    e[panels] = v;
    let geometric = |x: f64, dir: f64| (1..=GRADE_LEVELS).rev().map(move |l| x + dir * h * GRADE_RATIO.powi(l as i32));
    if at_v {
        let tail: Vec<f64> = geometric(v, -1.0).collect();
        e.splice(panels..panels, tail.into_iter().rev());
    }
    if at_u {
        e.splice(1..1, geometric(u, 1.0));
    }
    e
}

/// Nodes and weights of the composite rule on consecutive `edges`.
fn panel_nodes(edges: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss::rule(ORDER);
    let mut nodes = Vec::with_capacity(ORDER * edges.len());
    let mut weights = Vec::with_capacity(ORDER * edges.len());
    for e in edges.windows(2) {
        let (c, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
        for (xi, wi) in x.iter().zip(w) {
            nodes.push(c + h * xi);
            weights.push(h * wi);
        }
    }
    (nodes, weights)
}

/// Radii `|sum +-a_j|` inside `(lo, hi)`, where the density is not smooth.
fn singular_radii(a: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    if a.len() > MAX_SINGULAR_TERMS {
        return Vec::new();
    }
    let n = a.len();
    let mut out: Vec<f64> = (0..1usize << (n - 1))
        .map(|mask| {
            let s: f64 = a[0] + (1..n).map(|j| if mask >> (j - 1) & 1 == 1 { -a[j] } else { a[j] }).sum::<f64>();
            s.abs()
        })
        .filter(|&c| c > lo + 1e-9 && c < hi - 1e-9)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() <= 1e-9);
    out
}

/// Density of `S` on a graded radial grid.
pub fn radial_density(a: &CoefficientVector, spec: GridSpec) -> Result<RadialDensity> {
    let panels = spec.panels()?;
    match a.len() {
        0 | 1 => domain("the density of a single Steinhaus term is singular; n >= 2 is required"),
        2 => Ok(two_term_density(a, panels)),
        _ => hankel_density(a, spec, panels),
    }
}

/// Closed form for two terms, on Gauss-Legendre nodes in the angle
/// `theta` with `r^2 = a_1^2 + a_2^2 + 2 a_1 a_2 cos theta`.
fn two_term_density(a: &CoefficientVector, panels: usize) -> RadialDensity {
    let (a1, a2) = (a.as_slice()[0], a.as_slice()[1]);
    let (theta, wt) = panel_nodes(&graded(0.0, PI, panels, true, true));
    let mut rows: Vec<(f64, f64, f64)> = theta
        .iter()
        .zip(&wt)
        .map(|(&th, &w)| {
            let r = (a1 * a1 + a2 * a2 + 2.0 * a1 * a2 * th.cos()).max(0.0).sqrt();
            let jac = 2.0 * PI * a1 * a2 * th.sin();
            (r, 1.0 / (2.0 * PI * PI * a1 * a2 * th.sin()), w * jac)
        })
        .collect();
    rows.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (inner, outer) = support(a.as_slice());
    finish(a.clone(), rows, inner, outer, 0, Vec::new())
}

fn finish(
    a: CoefficientVector,
    rows: Vec<(f64, f64, f64)>,
    inner_radius: f64,
    tail_radius: f64,
    clamped: usize,
    notes: Vec<String>,
) -> RadialDensity {
    let grid = rows.iter().map(|x| x.0).collect();
    let values = rows.iter().map(|x| x.1).collect();
    let weights = rows.iter().map(|x| x.2).collect();
    let mut d = RadialDensity {
        a,
        grid,
        values,
        weights,
        inner_radius,
        tail_radius,
        mass: 0.0,
        mass_error: 0.0,
        clamped,
        notes,
    };
    d.mass = d.integrate(|_, f| f);
    d.mass_error = (d.mass - 1.0).abs();
    d
}

/// `prod_j sqrt(2 / (pi a_j))`, the envelope constant of the Bessel product.
fn envelope_constant(a: &[f64]) -> f64 {
    a.iter().map(|&x| (2.0 / (PI * x)).sqrt()).product()
}

/// Cutoff beyond which `c t^{1-n/2}` integrates to below `tol`, if small enough.
fn envelope_cutoff(a: &[f64], tol: f64) -> Option<f64> {
    let n = a.len() as f64;
    if n < 5.0 {
        return None;
    }
    let e = 0.5 * n - 2.0;
    let t = (envelope_constant(a) / (e * tol)).powf(1.0 / e);
    (t <= ENVELOPE_T_MAX).then(|| t.max(T_MIN))
}

fn hankel_density(a: &CoefficientVector, spec: GridSpec, panels: usize) -> Result<RadialDensity> {
    let b = a.as_slice();
    let (inner, outer) = support(b);
    let bmin = a.min();
    let envelope = envelope_cutoff(b, 2.0 * PI * spec.tol);
    let r_cut = FAST / T_CAP;
    let mut notes = Vec::new();

    // Radial panels: breakpoints at the support edges and at the radii where
    // the density is not smooth, graded towards each breakpoint.
    let singular_origin = singular_radii(b, -1.0, outer).first().is_some_and(|&c| c < 1e-9);
    let origin = inner < r_cut && envelope.is_none();
    let mut breaks = vec![inner];
    if origin {
        breaks.push(r_cut);
        notes.push(if singular_origin {
            format!("values on ({inner}, {r_cut}) follow a logarithmic fit through f({r_cut}) and f({})", 2.0 * r_cut)
        } else {
            format!("values on ({inner}, {r_cut}) are taken equal to f({r_cut})")
        });
    }
    breaks.extend(singular_radii(b, breaks[breaks.len() - 1], outer));
    breaks.push(outer);
    let span = outer - inner;
    let mut edges = vec![breaks[0]];
    let last = breaks.len() - 2;
    for (i, w) in breaks.windows(2).enumerate() {
        let k = ((panels as f64 * (w[1] - w[0]) / span).ceil() as usize).max(1);
        let at_u = w[0] != r_cut && (i > 0 || inner > 0.0 || singular_origin);
        edges.extend(graded(w[0], w[1], k, at_u, i < last || b.len() == 3).into_iter().skip(1));
    }
    let (radii, rw) = panel_nodes(&edges);

    let cutoff = |r: f64| -> f64 {
        match envelope {
            Some(t) => t,
            None => (FAST / bmin.min(r.max(r_cut))).clamp(T_MIN, T_CAP),
        }
    };
    let h = (1.5 / (2.0 * outer)).min(0.5);
    let t_max = radii.iter().map(|&r| cutoff(r)).fold(T_MIN, f64::max);
    let nt = (t_max / h).ceil() as usize;
    let (x, w) = gauss::rule(ORDER);
    let phi: Vec<(f64, f64)> = (0..nt)
        .into_par_iter()
        .flat_map_iter(|k| {
            let c = (k as f64 + 0.5) * h;
            x.iter().zip(w).map(move |(xi, wi)| {
                let t = c + 0.5 * h * xi;
                (t, 0.5 * h * wi * t * b.iter().map(|&bj| j0(bj * t)).product::<f64>())
            })
        })
        .collect();

    let value_at = |r: f64| -> Result<f64> {
        let k = ((cutoff(r) / h).ceil() as usize).min(nt);
        let head: f64 = phi[..k * ORDER].iter().map(|&(t, v)| v * j0(r * t)).sum();
        let tail = if envelope.is_some() {
            0.0
        } else {
            let mut freqs = b.to_vec();
            freqs.push(r);
            Expansion::new(&freqs, 1.0)?.integrate_from(k as f64 * h)?.0
        };
        Ok((head + tail) / (2.0 * PI))
    };
    // Below r_cut: constant, or `f(r_cut) + c ln(r_cut/r)` when a singular radius sits at 0.
    let near_origin = if origin {
        let f0 = value_at(r_cut)?;
        let c = if singular_origin { ((f0 - value_at(2.0 * r_cut)?) / 2f64.ln()).max(0.0) } else { 0.0 };
        Some((f0, c))
    } else {
        None
    };
    let values = radii
        .par_iter()
        .map(|&r| match near_origin {
            Some((f0, c)) if r < r_cut => Ok(f0 + c * (r_cut / r).ln()),
            _ => value_at(r),
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut clamped = 0;
    let rows = radii
        .iter()
        .zip(&rw)
        .zip(values)
        .map(|((&r, &w), f)| {
            let f = if f < 0.0 {
                clamped += 1;
                0.0
            } else {
                f
            };
            (r, f, 2.0 * PI * r * w)
        })
        .collect();
    if clamped > 0 {
        notes.push(format!("{clamped} negative density values clamped to zero"));
    }
    Ok(finish(a.clone(), rows, inner, outer, clamped, notes))
}

/// `h_p(S)` for `p` in `[0, 1]`. Two terms use the closed form
/// `log(2 pi^2 a_1 a_2) + log(Gamma(1-p/2) / (sqrt(pi) Gamma((3-p)/2))) / (1-p)`.
pub fn renyi_steinhaus(a: &CoefficientVector, p: f64, spec: GridSpec) -> Result<f64> {
    check_p(p)?;
    match a.len() {
        0 | 1 => domain("the density of a single Steinhaus term is singular; n >= 2 is required"),
        2 => {
            let (a1, a2) = (a.as_slice()[0], a.as_slice()[1]);
            if p == 1.0 {
                return Ok((PI * PI * a1 * a2).ln());
            }
            let k = log_gamma(1.0 - 0.5 * p)? - 0.5 * PI.ln() - log_gamma(1.5 - 0.5 * p)?;
            Ok((2.0 * PI * PI * a1 * a2).ln() + k / (1.0 - p))
        }
        _ => radial_density(a, spec)?.renyi(p),
    }
}

/// `h_p(S)` for every `p` in `ps`, building the density once.
pub fn renyi_profile(a: &CoefficientVector, ps: &[f64], spec: GridSpec) -> Result<Vec<f64>> {
    if a.len() <= 2 {
        return ps.iter().map(|&p| renyi_steinhaus(a, p, spec)).collect();
    }
    let d = radial_density(a, spec)?;
    ps.iter().map(|&p| d.renyi(p)).collect()
}

/// `h_p(Z)` for the standard complex Gaussian: `log pi - log p / (1 - p)`,
/// `log(pi e)` at `p = 1` and `+inf` at `p = 0`.
pub fn renyi_gaussian(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(if p == 0.0 {
        f64::INFINITY
    } else if p == 1.0 {
        PI.ln() + 1.0
    } else {
        PI.ln() - p.ln() / (1.0 - p)
    })
}

/// `h_p(Z)` by direct quadrature of `(e^{-r^2}/pi)^p` over the plane, `0 < p < 1`.
pub fn renyi_gaussian_numeric(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p must lie in (0, 1), got {p}"));
    }
    let top = (60.0 / p).sqrt();
    let n = (top / 0.05).ceil() as usize;
    let step = top / n as f64;
    let integral: f64 = (0..n)
        .map(|k| {
            let (lo, hi) = (k as f64 * step, (k + 1) as f64 * step);
            gauss::integrate(16, lo, hi, |r| 2.0 * PI * r * ((-r * r).exp() / PI).powf(p))
        })
        .sum();
    Ok(integral.ln() / (1.0 - p))
}

/// `h_p(Z) - h_p(S)` for each instance and `p`, with mass and second-moment
/// checks of every reconstructed density.
pub fn verify_renyi_upper(a_list: &[CoefficientVector], p_grid: &[f64]) -> Result<VerificationReport> {
    verify_renyi_upper_with(a_list, p_grid, GridSpec::default())
}

pub fn verify_renyi_upper_with(
    a_list: &[CoefficientVector],
    p_grid: &[f64],
    spec: GridSpec,
) -> Result<VerificationReport> {
    let started = Instant::now();
    if a_list.is_empty() || p_grid.is_empty() {
        return domain("empty instance list or p grid");
    }
    if let Some(p) = p_grid.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
        return domain(format!("p grid must lie in (0, 1], got {p}"));
    }
    for a in a_list {
        if a.len() < 2 {
            return domain("instances need at least two nonzero coefficients");
        }
        if (a.norm() - 1.0).abs() > 1e-12 {
            return domain(format!("instance is not unit-normalised: norm {}", a.norm()));
        }
    }
    let slack = MarginKind::Slack { slack: GAUSSIAN_SLACK };
    let unknown = Enclosure::new(f64::NEG_INFINITY, f64::INFINITY);
    let mut margins = Vec::new();
    let mut notes = Vec::new();
    for (i, a) in a_list.iter().enumerate() {
        let n = a.len() as f64;
        let density = radial_density(a, spec);
        for &p in p_grid {
            let at = [("instance", i as f64), ("n", n), ("p", p)];
            let h = match &density {
                Ok(_) if a.len() == 2 => renyi_steinhaus(a, p, spec),
                Ok(d) => d.renyi(p),
                Err(e) => Err(e.clone()),
            };
            let value = match (&density, h) {
                (Ok(d), Ok(h)) => {
                    let err = 10.0 * d.mass_error.max(f64::EPSILON);
                    Enclosure::new(renyi_gaussian(p)? - h - err, renyi_gaussian(p)? - h + err)
                }
                _ => unknown,
            };
            margins.push(Margin::with_kind("gaussian_minus_steinhaus", &at, value, slack));
        }
        let at = [("instance", i as f64), ("n", n)];
        match density {
            Ok(d) => {
                let headroom = |dev: f64, tol: f64| Enclosure::point(tol - dev.abs());
                margins.push(Margin::positive("mass_headroom", &at, headroom(d.mass - 1.0, MASS_TOL)));
                let m2 = d.second_moment() - a.norm().powi(2);
                margins.push(Margin::positive("second_moment_headroom", &at, headroom(m2, SECOND_MOMENT_TOL)));
                notes.extend(d.notes.iter().map(|s| format!("instance {i}: {s}")));
            }
            Err(e) => {
                margins.push(Margin::positive("mass_headroom", &at, unknown));
                notes.push(format!("instance {i}: density failed: {e}"));
            }
        }
    }
    let grid = format!("{} instances x {} values of p", a_list.len(), p_grid.len());
    Ok(VerificationReport::new(LemmaId::RenyiUpper, grid, margins, notes, started))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_closed_form() {
        assert!((renyi_gaussian(1.0).unwrap() - (PI * std::f64::consts::E).ln()).abs() < 1e-15);
        assert!((renyi_gaussian(0.5).unwrap() - (PI.ln() + 2.0 * 2f64.ln())).abs() < 1e-14);
        assert_eq!(renyi_gaussian(0.0).unwrap(), f64::INFINITY);
        assert!((renyi_gaussian(1.0 - 1e-7).unwrap() - renyi_gaussian(1.0).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn gaussian_numeric_matches() {
        for p in [0.1, 0.5, 0.9] {
            let d = renyi_gaussian_numeric(p).unwrap() - renyi_gaussian(p).unwrap();
            assert!(d.abs() < 1e-10, "{p}: {d}");
        }
    }

    #[test]
    fn two_term_closed_form_matches_grid() {
        let a = CoefficientVector::normalized(&[0.8, 0.5]).unwrap();
        let d = radial_density(&a, GridSpec::default()).unwrap();
        assert!(d.mass_error < 1e-12);
        assert!((d.second_moment() - 1.0).abs() < 1e-12);
        for p in [0.0, 0.3, 0.7, 1.0] {
            let exact = renyi_steinhaus(&a, p, GridSpec::default()).unwrap();
            let grid = d.renyi(p).unwrap();
            assert!((exact - grid).abs() < 1e-6, "{p}: {exact} vs {grid}");
        }
    }

    #[test]
    fn graded_edges_cover_interval() {
        let e = graded(1.0, 3.0, 10, true, true);
        assert_eq!(e.len(), 11 + 2 * GRADE_LEVELS);
        assert_eq!(e[0], 1.0);
        assert_eq!(e[e.len() - 1], 3.0);
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn singular_radii_of_three_terms() {
        let s = singular_radii(&[0.6, 0.5, 0.3], 0.0, 1.4);
        assert_eq!(s.len(), 3);
        for want in [0.2, 0.4, 0.8] {
            assert!(s.iter().any(|x| (x - want).abs() < 1e-12));
        }
    }

    #[test]
    fn single_term_rejected() {
        let a = CoefficientVector::new(&[1.0]).unwrap();
        assert!(radial_density(&a, GridSpec::default()).is_err());
        assert!(renyi_steinhaus(&a, 0.5, GridSpec::default()).is_err());
    }
}
