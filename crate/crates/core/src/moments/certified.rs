//! Certified enclosures of `F_p(s) = int_0^inf |J_0(t)|^s t^{p-1} dt`.
//!
//! `[0, T]` is covered by Taylor cells: on each cell `|J_0|^s` is expanded to
//! order `N` at the midpoint with a Lagrange remainder enclosed over the whole
//! cell, multiplied by the expansion of `t^{p-1}`, and integrated exactly.
//! Cells where the remainder is too wide are bisected. `[T, inf)` uses the
//! Hankel form `J_0(t) = sqrt(2/(pi t)) [rho cos(psi) + e(t)]` with
//! `|e(t)| <= c2/t^2 + c3/t^3`, the period mean of `|cos|^s`, and an
//! integration-by-parts bound on the oscillating remainder.

use crate::error::{convergence, domain, Result};
use crate::interval::Enclosure;
use crate::series;
use crate::specfun::{j0_taylor_coeffs, log_gamma_enclosure};

const ORDER: usize = 12;
const J0_ORDER: usize = 20;
const FIRST_CELL: f64 = 0.25;
const GEOMETRIC_RATIO: f64 = 1.25;
const UNIFORM_WIDTH: f64 = 0.5;
const MIN_WIDTH: f64 = 1e-10;
/// Relative width below which bisection cannot help.
const ROUNDING_FLOOR: f64 = 1e-12;
const DEFAULT_TAIL_START: f64 = 400.0;
const MAX_TAIL_START: f64 = 409_600.0;

/// Knobs of one certified evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FpConfig {
    /// Start of the analytic tail.
    pub tail_start: f64,
    /// Target enclosure width per unit length of `[0, tail_start]`.
    pub density: f64,
}

impl FpConfig {
    /// Splits `tol` between quadrature and tail for a given tail start.
    pub fn for_tol(tol: f64, tail_start: f64) -> Self {
        FpConfig { tail_start, density: tol / (4.0 * tail_start) }
    }

    /// Doubles the tail start and halves the density target.
    pub fn escalate(&self) -> Self {
        FpConfig { tail_start: 2.0 * self.tail_start, density: 0.25 * self.density }
    }
}

fn check_args(p: f64, s: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("F_p(s) requires 0 < p < 1, got {p}"));
    }
    if !(s > 2.0 * p) || !s.is_finite() {
        return domain(format!("F_p(s) converges only for s > 2p, got p = {p}, s = {s}"));
    }
    Ok(())
}

/// Certified `F_p(s)` with width at most `tol`.
pub fn f_p_integral(p: f64, s: f64, tol: f64) -> Result<Enclosure> {
    Ok(f_p_integral_batch(&[p], s, tol)?[0])
}

/// Certified `Psi_p(s) = s^{p/2} F_p(s)`; the width bound `tol` applies to `F_p(s)`.
pub fn psi_func(p: f64, s: f64, tol: f64) -> Result<Enclosure> {
    let f = f_p_integral(p, s, tol)?;
    Ok(Enclosure::point(s).pow_f64(0.5 * p)? * f)
}

/// `F_p(s)` for several `p` sharing one cell partition, each of width at most `tol`.
pub fn f_p_integral_batch(ps: &[f64], s: f64, tol: f64) -> Result<Vec<Enclosure>> {
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    for &p in ps {
        check_args(p, s)?;
    }
    if ps.is_empty() {
        return Ok(Vec::new());
    }
    let p_max = ps.iter().copied().fold(f64::MIN, f64::max);
    let mut t = DEFAULT_TAIL_START;
    while tail_width(p_max, s, t)? > 0.5 * tol {
        t *= 2.0;
        if t > MAX_TAIL_START {
            return convergence(format!("tail of F_p(s) at p = {p_max}, s = {s} needs a cut beyond {MAX_TAIL_START}"));
        }
    }
    let cfg = FpConfig::for_tol(tol, t);
    let out = f_p_integral_with(ps, s, cfg)?;
    for (p, e) in ps.iter().zip(&out) {
        if e.width() > tol {
            return convergence(format!("F_p(s) at p = {p}, s = {s}: width {:e} exceeds {tol:e}", e.width()));
        }
    }
    Ok(out)
}

/// `F_p(s)` for several `p` under an explicit configuration, with no width check.
pub fn f_p_integral_with(ps: &[f64], s: f64, cfg: FpConfig) -> Result<Vec<Enclosure>> {
    for &p in ps {
        check_args(p, s)?;
    }
    if ps.is_empty() {
        return Ok(Vec::new());
    }
    let weights: Vec<Weight> = ps.iter().map(|&p| Weight::new(p)).collect();
    let probes = probe_indices(ps);
    let mut acc: Vec<Enclosure> = vec![Enclosure::point(0.0); ps.len()];

    // First cell [0, c0], halved while its remainder is too wide.
    let mut c0 = FIRST_CELL;
    let first = loop {
        let cell = FirstCell::new(s, c0)?;
        let worst = probes.iter().map(|&i| cell.integrate(&weights[i]).width()).fold(0.0, f64::max);
        if worst <= 0.5 * cfg.density * cfg.tail_start * 0.25 || c0 < 1.0 / 64.0 {
            break cell;
        }
        c0 *= 0.5;
    };
    for (a, w) in acc.iter_mut().zip(&weights) {
        *a += first.integrate(w);
    }

    // Geometric cells, then uniform cells up to the tail start.
    let mut a = first.c0;
    let mut stack: Vec<(f64, f64)> = Vec::new();
    let t_end = cfg.tail_start;
    while a < t_end {
        let width = ((GEOMETRIC_RATIO - 1.0) * a).min(UNIFORM_WIDTH);
        let b = (a + width).min(t_end);
        stack.push((a, b));
        while let Some((lo, hi)) = stack.pop() {
            let cell = Cell::new(s, lo, hi);
            let budget = cfg.density * (hi - lo);
            let accept = probes.iter().all(|&i| {
                let v = cell.integrate(&weights[i]);
                v.width() <= budget.max(ROUNDING_FLOOR * v.mag())
            });
            if accept || hi - lo <= MIN_WIDTH {
                for (acc_p, w) in acc.iter_mut().zip(&weights) {
                    *acc_p += cell.integrate(w);
                }
            } else {
                let mid = 0.5 * (lo + hi);
                stack.push((mid, hi));
                stack.push((lo, mid));
            }
        }
        a = b;
    }

    let mut out = Vec::with_capacity(ps.len());
    for (&p, quad) in ps.iter().zip(acc) {
        let total = quad + fp_tail(p, s, t_end)?;
        out.push(total.tighten(&Enclosure::new(0.0, f64::INFINITY)));
    }
    Ok(out)
}

fn probe_indices(ps: &[f64]) -> Vec<usize> {
    let (mut lo, mut hi) = (0, 0);
    for (i, &p) in ps.iter().enumerate() {
        if p < ps[lo] {
            lo = i;
        }
        if p > ps[hi] {
            hi = i;
        }
    }
    if lo == hi {
        vec![lo]
    } else {
        vec![lo, hi]
    }
}

/// Per-`p` data: `binom(p-1, i)` for `i <= ORDER`.
struct Weight {
    p: f64,
    binom: Vec<Enclosure>,
}

impl Weight {
    fn new(p: f64) -> Self {
        let pm1 = Enclosure::point(p) - 1.0;
        let mut binom = Vec::with_capacity(ORDER + 1);
        let mut c = Enclosure::point(1.0);
        binom.push(c);
        for i in 0..ORDER {
            c = c * (pm1 - i as f64) / Enclosure::point((i + 1) as f64);
            binom.push(c);
        }
        Weight { p, binom }
    }
}

/// Series of `|J_0|^s` at points (`a`) and over a cell (`c`), or `None` when
/// `J_0` may vanish on the cell and `s` is not an even integer.
fn abs_pow_series(a: &[Enclosure], c: &[Enclosure], s: f64) -> Result<Option<(Vec<Enclosure>, Vec<Enclosure>)>> {
    if let Some(e) = series::even_exponent(s) {
        return Ok(Some((series::powi(a, e, ORDER), series::powi(c, e, ORDER + 1))));
    }
    let sign = if c[0].is_positive() {
        1.0
    } else if c[0].is_negative() {
        -1.0
    } else {
        return Ok(None);
    };
    let flip = |v: &[Enclosure]| -> Vec<Enclosure> { v.iter().map(|&x| x * sign).collect() };
    let g_mid = series::pow_real(&flip(a), s, ORDER)?;
    let g_cell = series::pow_real(&flip(c), s, ORDER + 1)?;
    Ok(Some((g_mid, g_cell)))
}

struct FirstCell {
    c0: f64,
    g: Vec<Enclosure>,
    g_rem: Enclosure,
}

impl FirstCell {
    fn new(s: f64, c0: f64) -> Result<Self> {
        let a = j0_taylor_coeffs(0.0, J0_ORDER);
        let c = series::shifted(&a, c0, 1.0, ORDER + 1);
        let (g, g_cell) = match series::even_exponent(s) {
            Some(e) => (series::powi(&a, e, ORDER), series::powi(&c, e, ORDER + 1)),
            None => (series::pow_real(&a, s, ORDER)?, series::pow_real(&c, s, ORDER + 1)?),
        };
        Ok(FirstCell { c0, g, g_rem: g_cell[ORDER] })
    }

    /// `sum_k g_k c0^{k+p}/(k+p) + G_N c0^{N+p}/(N+p)`.
    fn integrate(&self, w: &Weight) -> Enclosure {
        let c0 = Enclosure::point(self.c0);
        let c0p = c0.pow_f64(w.p).expect("positive base");
        let pe = Enclosure::point(w.p);
        let mut sum = Enclosure::point(0.0);
        let mut ck = Enclosure::point(1.0);
        for (k, gk) in self.g.iter().enumerate() {
            if k % 2 == 0 {
                sum += *gk * ck / (pe + k as f64);
            }
            ck *= c0;
        }
        sum += self.g_rem * ck / (pe + ORDER as f64);
        sum * c0p
    }
}

enum Cell {
    Taylor {
        a: f64,
        b: f64,
        m: f64,
        /// `Q_i = sum_{k even >= i} ints_k g_{k-i}(m) m^{-i}`.
        q: Vec<Enclosure>,
        /// `R_i = G_{N-i}(cell) cell^{-i}`.
        r: Vec<Enclosure>,
        int_n: Enclosure,
    },
    Crude {
        a: f64,
        b: f64,
        g: Enclosure,
    },
}

impl Cell {
    fn new(s: f64, a: f64, b: f64) -> Self {
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let coef = j0_taylor_coeffs(m, J0_ORDER);
        let cell = series::shifted(&coef, h, 1.0, ORDER + 1);
        let crude = |c0: Enclosure| Cell::Crude {
            a,
            b,
            g: Enclosure::new(c0.mig(), c0.mag()).pow_f64(s).expect("non-negative base"),
        };
        let (g_mid, g_cell) = match abs_pow_series(&coef, &cell, s) {
            Ok(Some(v)) => v,
            _ => return crude(cell[0]),
        };
        let he = Enclosure::point(h);
        let mut ints = Vec::with_capacity(ORDER + 1);
        let mut hp = he;
        for k in 0..=ORDER {
            ints.push(hp * 2.0 / Enclosure::point((k + 1) as f64));
            hp *= he;
        }
        let inv_m = Enclosure::point(1.0) / Enclosure::point(m);
        let mut q = Vec::with_capacity(ORDER);
        let mut mp = Enclosure::point(1.0);
        for i in 0..ORDER {
            let mut acc = Enclosure::point(0.0);
            let mut k = i + (i % 2);
            while k < ORDER {
                acc += ints[k] * g_mid[k - i];
                k += 2;
            }
            q.push(acc * mp);
            mp *= inv_m;
        }
        let inv_cell = Enclosure::point(1.0) / Enclosure::new(a, b);
        let mut r = Vec::with_capacity(ORDER + 1);
        let mut cp = Enclosure::point(1.0);
        for i in 0..=ORDER {
            r.push(g_cell[ORDER - i] * cp);
            cp *= inv_cell;
        }
        Cell::Taylor { a, b, m, q, r, int_n: ints[ORDER] }
    }

    fn integrate(&self, w: &Weight) -> Enclosure {
        let pm1 = w.p - 1.0;
        match self {
            Cell::Taylor { a, b, m, q, r, int_n } => {
                let mut main = Enclosure::point(0.0);
                for (qi, bi) in q.iter().zip(&w.binom) {
                    main += *qi * *bi;
                }
                let mut rem = Enclosure::point(0.0);
                for (ri, bi) in r.iter().zip(&w.binom) {
                    rem += *ri * *bi;
                }
                let at_m = Enclosure::point(*m).pow_f64(pm1).expect("positive");
                let over = Enclosure::new(*a, *b).pow_f64(pm1).expect("positive");
                main * at_m + rem * over * *int_n
            }
            Cell::Crude { a, b, g } => {
                let span = Enclosure::point(*b) - Enclosure::point(*a);
                let w_range = Enclosure::new(*a, *b).pow_f64(pm1).expect("positive");
                *g * w_range * span
            }
        }
    }
}

const C2: f64 = 9.0 / 128.0;
const C3: f64 = 75.0 / 1024.0;

/// Mean of `|cos u|^s` over a period: `Gamma((s+1)/2) / (sqrt(pi) Gamma(s/2+1))`.
pub(crate) fn cos_power_mean(s: f64) -> Enclosure {
    let half = Enclosure::point(s) * 0.5;
    let lg = log_gamma_enclosure(half + 0.5).expect("positive") - log_gamma_enclosure(half + 1.0).expect("positive");
    let sqrt_pi = Enclosure::pi().sqrt().expect("positive");
    lg.exp() / sqrt_pi
}

/// Enclosure of `int_T^inf |J_0(t)|^s t^{p-1} dt`.
pub(crate) fn fp_tail(p: f64, s: f64, t: f64) -> Result<Enclosure> {
    check_args(p, s)?;
    if t < 20.0 {
        return domain(format!("tail bound needs T >= 20, got {t}"));
    }
    let pe = Enclosure::point(p);
    let se = Enclosure::point(s);
    let te = Enclosure::point(t);
    let beta = se * 0.5 - pe;
    let two_over_pi = (Enclosure::point(2.0) / Enclosure::pi()).pow_f64(0.5 * s)?;
    let rho = (Enclosure::point(1.0) + Enclosure::point(1.0) / (te.sqr() * 64.0)).sqrt()?;
    let rho_s = rho.pow_f64(s)?;
    let ms = cos_power_mean(s);

    let t_beta = te.pow(-beta)?;
    let main_lo = ms * two_over_pi * t_beta / beta;
    let main = Enclosure::new(main_lo.lo(), (main_lo * rho_s).hi());

    let u_star = ms.pow_f64(1.0 / s)?.tighten(&Enclosure::new(0.0, 1.0)).acos()?;
    let osc_range = u_star * (Enclosure::point(1.0) - ms) * 2.0;
    let w_t = two_over_pi * rho_s * te.pow(pe - 1.0 - se * 0.5)?;
    let osc = osc_range * w_t;

    let err = Enclosure::point(C2) / te.sqr() + Enclosure::point(C3) / te.powi(3);
    let eta = if s >= 1.0 {
        let lead = se * (rho + err).pow_f64(s - 1.0)? * two_over_pi;
        let b2 = beta + 2.0;
        let b3 = beta + 3.0;
        lead * (Enclosure::point(C2) * te.pow(-b2)? / b2 + Enclosure::point(C3) * te.pow(-b3)? / b3)
    } else {
        let c = (Enclosure::point(C2) + Enclosure::point(C3) / te).pow_f64(s)?;
        let b = beta + se * 2.0;
        two_over_pi * c * te.pow(-b)? / b
    };
    let spread = (osc + eta).hi();
    Ok(main + Enclosure::symmetric(spread))
}

fn tail_width(p: f64, s: f64, t: f64) -> Result<f64> {
    Ok(fp_tail(p, s, t)?.width())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::psi_2;

    #[test]
    fn f_at_two_matches_closed_form() {
        for &p in &[0.2, 0.5, 0.8] {
            let f = f_p_integral(p, 2.0, 1e-6).unwrap();
            let want = 2f64.powf(-0.5 * p) * psi_2(p).unwrap();
            assert!(f.contains(want), "p = {p}: {f:?} vs {want}");
            assert!(f.width() <= 1e-6);
        }
    }

    #[test]
    fn f_decreasing_in_s() {
        let f2 = f_p_integral(0.5, 2.0, 1e-6).unwrap();
        let f3 = f_p_integral(0.5, 3.0, 1e-6).unwrap();
        assert!(f3.hi() < f2.lo());
    }

    #[test]
    fn tail_shrinks_and_stays_consistent() {
        let p = 0.5;
        let s = 3.0;
        let near = fp_tail(p, s, 400.0).unwrap();
        let far = fp_tail(p, s, 800.0).unwrap();
        assert!(far.width() < near.width());
        let a = f_p_integral_with(&[p], s, FpConfig::for_tol(1e-6, 400.0)).unwrap()[0];
        let b = f_p_integral_with(&[p], s, FpConfig::for_tol(1e-6, 800.0)).unwrap()[0];
        assert!(a.intersect(&b).is_some());
    }

    #[test]
    fn cos_mean_known_values() {
        assert!(cos_power_mean(2.0).contains(0.5));
        assert!(cos_power_mean(4.0).contains(0.375));
        assert!(cos_power_mean(1.0).contains(2.0 / std::f64::consts::PI));
    }

    #[test]
    fn domain_checks() {
        assert!(f_p_integral(0.5, 1.0, 1e-6).is_err());
        assert!(f_p_integral(0.0, 2.0, 1e-6).is_err());
        assert!(f_p_integral(0.5, 2.0, 0.0).is_err());
    }
}
