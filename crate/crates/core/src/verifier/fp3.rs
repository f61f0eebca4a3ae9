//! `F_p(3) <= e^{-p/4} G_p(2)` through the four-piece bound and tangent segments.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::log_d_enclosure;
use crate::error::{domain, Result};
use crate::interval::Enclosure;
use crate::specfun::bessel::{j01_enclosure_any, j01_point_enclosure};
use crate::specfun::{digamma_enclosure, log_gamma_enclosure};

use super::upper::g_p_enclosure;
use super::{certify_f, check_p_grid, LemmaId, Margin, VerificationReport};

/// Published lower bounds for `d_-(j)`, `j = 1..5`.
pub const TABLE1_D_MINUS: [f64; 5] = [0.00017, 0.0008, 0.004, 0.02, 0.28];
/// Published lower bounds for `d_+(j)`, `j = 1..5`.
pub const TABLE1_D_PLUS: [f64; 5] = [0.00017, 0.0006, 0.06, 0.003, 0.7];
/// Slack allowed when comparing against the published values.
pub const TABLE1_SLACK: f64 = 1e-6;
const SMALL_P_END: f64 = 0.02;
const SMALL_P_MARGIN: f64 = 1e-5;
const DIFF_STEP: f64 = 1e-5;
/// Cell width for the derivative bound.
const L_MESH: f64 = 1e-3;

/// Which of the two valid forms of the piece bounds to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundForm {
    /// `int t^{p-1}` evaluated exactly on each panel and `15/(64(p+4))` kept.
    #[default]
    Tight,
    /// Left-endpoint weights `(1/m)(t + k/m)^{p-1}` and `15/256`, as displayed.
    Displayed,
}

/// Parameters of the four-piece bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fp3Config {
    /// Split points `t_1 < t_2 < t_3`.
    pub nodes: [f64; 3],
    /// Panels per unit length on `(t_1, t_3)`.
    pub m: usize,
    /// Derivative bound for `|J_0|^3` on `[t_2, t_3]`.
    pub l_bound: f64,
    /// Tangent nodes `u_1 < ... < u_6`.
    pub u: Vec<f64>,
    pub form: BoundForm,
}

impl Default for Fp3Config {
    fn default() -> Self {
        Fp3Config {
            nodes: [1.0, 3.0, 12.0],
            m: 100,
            l_bound: 0.1,
            u: vec![0.02, 0.06, 0.15, 0.3, 0.7, 1.0],
            form: BoundForm::Tight,
        }
    }
}

impl Fp3Config {
    fn validate(&self) -> Result<()> {
        let [t1, t2, t3] = self.nodes;
        if !(0.0 < t1 && t1 < t2 && t2 < t3 && t3 <= 16.0) {
            return domain(format!("nodes must satisfy 0 < t1 < t2 < t3 <= 16, got {:?}", self.nodes));
        }
        if t1 > 1.0 {
            return domain("the polynomial majorant is only justified for t1 <= 1");
        }
        if self.m == 0 {
            return domain("m must be positive");
        }
        for t in [t2 - t1, t3 - t2] {
            let k = t * self.m as f64;
            if (k - k.round()).abs() > 1e-9 {
                return domain("node gaps must be multiples of 1/m");
            }
        }
        if !(self.l_bound >= 0.1) {
            return domain(format!("the derivative bound may only be raised above 0.1, got {}", self.l_bound));
        }
        if self.u.len() < 2 || self.u.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("tangent nodes must be strictly increasing");
        }
        if !(self.u[0] > 0.0) || self.u[self.u.len() - 1] > 1.0 {
            return domain("tangent nodes must lie in (0, 1]");
        }
        Ok(())
    }
}

/// The four bounds `B_1..B_4` and their combination at one `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fp3Breakdown {
    pub p: f64,
    pub b1: Enclosure,
    pub b2: Enclosure,
    pub b3: Enclosure,
    pub b4: Enclosure,
    /// `p (B_1 + B_2 + B_3 + B_4)`.
    pub l: Enclosure,
    /// `e^{-p/4} 2^{p/2} Gamma(1+p/2) D(p)`; infinite at `p = 1`.
    pub r: Option<Enclosure>,
}

/// One tangent segment `[u_j, u_{j+1}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fp3Segment {
    pub j: usize,
    pub u_lo: f64,
    pub u_hi: f64,
    pub d_minus: Enclosure,
    pub d_plus: Enclosure,
    /// Published bounds, when the default nodes are used.
    pub published_d_minus: Option<f64>,
    pub published_d_plus: Option<f64>,
    /// Whether both certified lower ends reach the published values.
    pub dominates: Option<bool>,
}

/// Everything computed for the `F_p(3)` bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fp3Table {
    pub config: Fp3Config,
    pub segments: Vec<Fp3Segment>,
    /// `l_0(u_1) - L(u_1)` with `l_0` the tangent of `R` at `0`.
    pub small_p_margin: Enclosure,
    /// Breakdowns at the tangent nodes.
    pub breakdowns: Vec<Fp3Breakdown>,
}

impl Fp3Table {
    /// Every segment reaches the published values and the small-`p` margin exceeds `1e-5`.
    pub fn dominates_table(&self) -> bool {
        self.segments.iter().all(|s| s.dominates == Some(true)) && self.small_p_margin.lo() > SMALL_P_MARGIN
    }
}

/// Precomputed `|J_0|^3` data for the middle pieces.
struct Pieces {
    cfg: Fp3Config,
    /// `(a, b, max(|J0(a)|^3, |J0(b)|^3))` on `(t_1, t_2)`.
    second: Vec<(f64, f64, Enclosure)>,
    /// `(a, b, |J0((a+b)/2)|^3)` on `(t_2, t_3)`.
    third: Vec<(f64, f64, Enclosure)>,
}

fn pt(x: f64) -> Enclosure {
    Enclosure::point(x)
}

fn cube_abs_j0(t: f64) -> Enclosure {
    j01_point_enclosure(t).0.abs().powi(3)
}

fn panels(lo: f64, hi: f64, m: usize) -> Vec<(f64, f64)> {
    let k = ((hi - lo) * m as f64).round() as usize;
    (0..k).map(|i| (lo + i as f64 / m as f64, if i + 1 == k { hi } else { lo + (i + 1) as f64 / m as f64 })).collect()
}

impl Pieces {
    fn new(cfg: &Fp3Config) -> Self {
        let [t1, t2, t3] = cfg.nodes;
        let second =
            panels(t1, t2, cfg.m).into_iter().map(|(a, b)| (a, b, cube_abs_j0(a).max_with(&cube_abs_j0(b)))).collect();
        let third = panels(t2, t3, cfg.m).into_iter().map(|(a, b)| (a, b, cube_abs_j0(0.5 * (a + b)))).collect();
        Pieces { cfg: cfg.clone(), second, third }
    }

    /// `int_a^b t^{p-1} dt` times `p`, or its left-endpoint majorant.
    fn weight(&self, p: f64, a: f64, b: f64) -> Result<Enclosure> {
        Ok(match self.cfg.form {
            BoundForm::Tight => pt(b).pow_f64(p)? - pt(a).pow_f64(p)?,
            BoundForm::Displayed => pt(a).pow_f64(p - 1.0)? * (pt(p) * (b - a)),
        })
    }

    /// `(p B_1, p B_2, p B_3, p B_4)`.
    fn scaled_bounds(&self, p: f64) -> Result<[Enclosure; 4]> {
        let [t1, t2, t3] = self.cfg.nodes;
        let pe = pt(p);
        // int_0^{t1} (1 - 3t^2/4 + 15t^4/64) t^{p-1} dt, times p.
        let fourth = match self.cfg.form {
            BoundForm::Tight => pe * (15.0 / 64.0) * pt(t1).pow_f64(p + 4.0)? / (pe + 4.0),
            BoundForm::Displayed => pe * (15.0 / 256.0),
        };
        let b1 = pt(t1).pow_f64(p)? - pe * 0.75 * pt(t1).pow_f64(p + 2.0)? / (pe + 2.0) + fourth;
        let mut b2 = pt(0.0);
        for &(a, b, j) in &self.second {
            b2 += j * self.weight(p, a, b)?;
        }
        let mut b3 = pt(0.0);
        for &(a, b, j) in &self.third {
            b3 += j * self.weight(p, a, b)?;
        }
        let m2 = 2.0 * self.cfg.m as f64;
        b3 += match self.cfg.form {
            BoundForm::Tight => (pt(t3).pow_f64(p)? - pt(t2).pow_f64(p)?) * (self.cfg.l_bound / m2),
            BoundForm::Displayed => pt(t2).pow_f64(p - 1.0)? * pe * (self.cfg.l_bound * (t3 - t2) / m2),
        };
        let c = (pt(2.0) / Enclosure::pi()).pow_f64(1.5)?;
        let b4 = pe * c * pt(t3).pow_f64(p - 1.5)? / (pt(1.5) - p);
        Ok([b1, b2, b3, b4])
    }

    fn l_of(&self, p: f64) -> Result<Enclosure> {
        if p == 0.0 {
            return Ok(pt(1.0));
        }
        Ok(self.scaled_bounds(p)?.into_iter().sum())
    }

    fn breakdown(&self, p: f64) -> Result<Fp3Breakdown> {
        let s = self.scaled_bounds(p)?;
        let b = s.map(|x| x / pt(p));
        Ok(Fp3Breakdown {
            p,
            b1: b[0],
            b2: b[1],
            b3: b[2],
            b4: b[3],
            l: s.into_iter().sum(),
            r: if p < 1.0 { Some(r_of(p)?) } else { None },
        })
    }
}

/// `R(p) = e^{-p/4} 2^{p/2} Gamma(1+p/2) D(p)`, with `R(0) = 1`.
pub(crate) fn r_of(p: f64) -> Result<Enclosure> {
    if p == 0.0 {
        return Ok(pt(1.0));
    }
    let e =
        pt(-0.25 * p) + Enclosure::ln2() * (0.5 * p) + log_gamma_enclosure(pt(1.0 + 0.5 * p))? + log_d_enclosure(p)?;
    Ok(e.exp())
}

/// `R'(p) = R(p) (-1/4 + ln 2 + psi(1+p/2)/2 - psi(1-p) + 3 psi(1-p/2)/2)`.
pub(crate) fn r_prime(p: f64) -> Result<Enclosure> {
    if !(0.0..1.0).contains(&p) {
        return domain(format!("R'(p) requires 0 <= p < 1, got {p}"));
    }
    let log_slope = pt(-0.25) + Enclosure::ln2() + digamma_enclosure(pt(1.0 + 0.5 * p))? * 0.5
        - digamma_enclosure(pt(1.0) - p)?
        + digamma_enclosure(pt(1.0) - 0.5 * p)? * 1.5;
    Ok(r_of(p)? * log_slope)
}

/// Certified supremum of `3 J_0^2 |J_1|` on `[a, b]` over cells of width `mesh`,
/// with the cell holding the largest upper bound.
pub fn l_bound_sup(a: f64, b: f64, mesh: f64) -> Result<(Enclosure, (f64, f64))> {
    if !(0.0 <= a && a < b && b <= 16.0) || !(mesh > 0.0) {
        return domain(format!("invalid range [{a}, {b}] or mesh {mesh}"));
    }
    let n = ((b - a) / mesh).ceil() as usize;
    let cells: Vec<(f64, f64, Enclosure, f64)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let lo = a + k as f64 * mesh;
            let hi = if k + 1 == n { b } else { a + (k + 1) as f64 * mesh };
            let (j0, j1) = j01_enclosure_any(Enclosure::new(lo, hi));
            let up = (j0.sqr() * j1.abs() * 3.0).hi();
            let (m0, m1) = j01_point_enclosure(0.5 * (lo + hi));
            let at_mid = (m0.sqr() * m1.abs() * 3.0).lo();
            (lo, hi, Enclosure::new(at_mid.min(up), up), at_mid)
        })
        .collect();
    let lower = cells.iter().map(|c| c.3).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi, top, _) =
        cells.iter().copied().max_by(|x, y| x.2.hi().total_cmp(&y.2.hi())).expect("at least one cell");
    Ok((Enclosure::new(lower.min(top.hi()), top.hi()), (lo, hi)))
}

/// `sup_{[3, 12]} |d/dt |J_0(t)|^3| < 0.1`.
pub fn verify_l_bound() -> Result<VerificationReport> {
    let started = Instant::now();
    let (a, b, mesh) = (3.0, 12.0, L_MESH);
    let (sup, (lo, hi)) = l_bound_sup(a, b, mesh)?;
    let (j0, j1) = j01_point_enclosure(3.0);
    let spot = j0.sqr() * j1.abs() * 3.0;
    let margins = vec![
        Margin::positive("bound_minus_sup", &[("t_lo", a), ("t_hi", b)], pt(0.1) - sup),
        Margin::positive("bound_minus_value", &[("t", 3.0)], pt(0.1) - spot),
        Margin::positive("argmax_cell_interior", &[("t_lo", lo), ("t_hi", hi)], pt((lo - a).min(b - hi))),
    ];
    let notes = vec![format!(
        "sup of 3 J0^2 |J1| on [{a}, {b}] lies in [{:.6}, {:.6}], attained in [{lo:.2}, {hi:.2}]",
        sup.lo(),
        sup.hi()
    )];
    let grid = format!("cells of width {mesh} on [{a}, {b}]");
    Ok(VerificationReport::new(LemmaId::LBound, grid, margins, notes, started))
}

/// [`verify_fp3_table_with`] under the default configuration.
pub fn verify_fp3_table(p_grid: &[f64]) -> Result<(VerificationReport, Fp3Table)> {
    verify_fp3_table_with(p_grid, &Fp3Config::default())
}

/// Certifies `R(p) >= L(p)` on `(0, 1)` via the small-`p` tangent and the
/// tangent segments, checks the ingredients (monotonicity of `|J_0|` on
/// `(t_1, t_2)`, the derivative bound, `R'` against differences, convexity),
/// and compares `F_p(3)` directly on `p_grid`.
pub fn verify_fp3_table_with(p_grid: &[f64], cfg: &Fp3Config) -> Result<(VerificationReport, Fp3Table)> {
    let started = Instant::now();
    check_p_grid(p_grid)?;
    cfg.validate()?;
    let pieces = Pieces::new(cfg);
    let mut margins = Vec::new();
    let mut notes = Vec::new();
    let [t1, t2, t3] = cfg.nodes;

    // |J0| on (t1, t2) falls to its first zero and then rises: J1 > 0 and one sign change of J0.
    let j1_min = l_min_j1(t1, t2, 1e-3);
    margins.push(Margin::positive("j1_min", &[("t_lo", t1), ("t_hi", t2)], j1_min));
    if t1 < 2.40 && t2 > 2.41 {
        margins.push(Margin::positive("j0_before_zero", &[("t", 2.40)], j01_point_enclosure(2.40).0));
        margins.push(Margin::positive("j0_after_zero_negated", &[("t", 2.41)], -j01_point_enclosure(2.41).0));
    } else {
        notes.push("nodes do not straddle the first zero of J0; only J1 > 0 is checked".into());
    }

    let (sup, _) = l_bound_sup(t2, t3, L_MESH)?;
    margins.push(Margin::positive("l_bound_minus_sup", &[("t_lo", t2), ("t_hi", t3)], pt(cfg.l_bound) - sup));

    // R' against central differences at the tangent nodes.
    for &u in &cfg.u[..cfg.u.len() - 1] {
        let h = DIFF_STEP;
        let fd = (r_of(u + h)?.mid() - r_of(u - h)?.mid()) / (2.0 * h);
        let err = (r_prime(u)?.mid() - fd).abs();
        margins.push(Margin::positive("r_prime_vs_difference", &[("p", u)], pt(1e-7) - err));
    }

    // Small p: l_0 - L is concave and vanishes at 0.
    let slope0 = r_prime(0.0)?;
    let u1 = cfg.u[0];
    let tangent_gap = |p: f64| -> Result<Enclosure> { Ok(pt(1.0) + slope0 * p - pieces.l_of(p)?) };
    let small_p_margin = tangent_gap(u1)?;
    margins.push(Margin::positive("small_p_endpoint_over_1e-5", &[("p", u1)], small_p_margin - SMALL_P_MARGIN));
    for k in 1..=20 {
        let p = u1 * k as f64 / 20.0;
        margins.push(Margin::positive("small_p_tangent_minus_l", &[("p", p)], tangent_gap(p)?));
    }
    if (u1 - SMALL_P_END).abs() > 1e-15 {
        notes.push(format!("small-p region ends at u_1 = {u1}"));
    }

    // Tangent segments.
    let use_published = *cfg == Fp3Config { form: cfg.form, ..Fp3Config::default() };
    let mut segments = Vec::new();
    for j in 0..cfg.u.len() - 1 {
        let (a, b) = (cfg.u[j], cfg.u[j + 1]);
        let ra = r_of(a)?;
        let d_minus = ra - pieces.l_of(a)?;
        let d_plus = ra + r_prime(a)? * (b - a) - pieces.l_of(b)?;
        let at = [("j", (j + 1) as f64), ("u_lo", a), ("u_hi", b)];
        margins.push(Margin::positive("d_minus", &at, d_minus));
        margins.push(Margin::positive("d_plus", &at, d_plus));
        let (pm, pp) =
            if use_published && j < 5 { (Some(TABLE1_D_MINUS[j]), Some(TABLE1_D_PLUS[j])) } else { (None, None) };
        let dominates = pm.zip(pp).map(|(m, p)| d_minus.lo() >= m - TABLE1_SLACK && d_plus.lo() >= p - TABLE1_SLACK);
        if dominates == Some(false) {
            notes.push(format!(
                "segment {}: certified d- = {:.6}, d+ = {:.6} do not reach the published {} / {}",
                j + 1,
                d_minus.lo(),
                d_plus.lo(),
                pm.unwrap(),
                pp.unwrap()
            ));
        }
        segments.push(Fp3Segment {
            j: j + 1,
            u_lo: a,
            u_hi: b,
            d_minus,
            d_plus,
            published_d_minus: pm,
            published_d_plus: pp,
            dominates,
        });
    }

    // Convexity of L and R through second differences, and R >= L on the grid.
    let step = 0.01;
    let conv: Vec<Result<Vec<Margin>>> = (1..99)
        .into_par_iter()
        .map(|k| {
            let p = k as f64 * step;
            let at = [("p", p)];
            let l = |q: f64| pieces.l_of(q);
            let dl = l(p - step)? + l(p + step)? - l(p)? * 2.0;
            let dr = r_of(p - step)? + r_of(p + step)? - r_of(p)? * 2.0;
            Ok(vec![Margin::positive("l_second_difference", &at, dl), Margin::positive("r_second_difference", &at, dr)])
        })
        .collect();
    for c in conv {
        margins.extend(c?);
    }
    let direct: Vec<Result<Margin>> = p_grid
        .par_iter()
        .map(|&p| Ok(Margin::positive("r_minus_l", &[("p", p)], r_of(p)? - pieces.l_of(p)?)))
        .collect();
    for d in direct {
        margins.push(d?);
    }

    // F_p(3) against e^{-p/4} G_p(2) directly.
    let targets =
        p_grid.iter().map(|&p| Ok(pt(-0.25 * p).exp() * g_p_enclosure(p, 2.0)?)).collect::<Result<Vec<_>>>()?;
    let (f3, f_notes) = certify_f(p_grid, 3.0, |i, f| targets[i].lo() > f.hi());
    notes.extend(f_notes);
    for ((&p, t), f) in p_grid.iter().zip(&targets).zip(&f3) {
        margins.push(Margin::positive("direct_bound_minus_f3", &[("p", p)], *t - *f));
    }

    let breakdowns = cfg.u.iter().map(|&u| pieces.breakdown(u)).collect::<Result<Vec<_>>>()?;
    let table = Fp3Table { config: cfg.clone(), segments, small_p_margin, breakdowns };
    let grid = format!(
        "tangent nodes {:?}; pieces at t = {t1}, {t2}, {t3} with m = {}; {} p values",
        cfg.u,
        cfg.m,
        p_grid.len()
    );
    Ok((VerificationReport::new(LemmaId::Fp3Table, grid, margins, notes, started), table))
}

/// Enclosure of `min J_1` on `[a, b]` over cells of width `mesh`.
fn l_min_j1(a: f64, b: f64, mesh: f64) -> Enclosure {
    let n = ((b - a) / mesh).ceil() as usize;
    let (mut lo, mut hi) = (f64::INFINITY, f64::INFINITY);
    for k in 0..n {
        let x = a + k as f64 * mesh;
        let y = if k + 1 == n { b } else { a + (k + 1) as f64 * mesh };
        let j1 = j01_enclosure_any(Enclosure::new(x, y)).1;
        lo = lo.min(j1.lo());
        hi = hi.min(j1.hi());
    }
    Enclosure::new(lo, hi)
}
