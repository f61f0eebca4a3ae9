//! Bessel functions of the first kind of orders 0 and 1.
//!
//! Point values use the power series near the origin, Miller's backward
//! recurrence on the middle range and the Hankel asymptotic expansion beyond
//! `t = 20`. Certified values use a double-double power series up to `t = 20`
//! and the Hankel expansion with its first-neglected-term remainder bound
//! beyond that. Interval arguments are handled with the mean-value form,
//! using that every derivative of `J_0` and `J_1` is bounded by one.

use serde::{Deserialize, Serialize};

use super::dd::{Dd, DD_OP_REL};
use crate::error::{domain, range, Error, Result};
use crate::interval::Enclosure;

/// Switch point between the series and the Hankel expansion.
pub const HANKEL_SWITCH: f64 = 20.0;

/// Upper bound for `|J_1|` on the real line.
pub const J1_MAX: f64 = 0.581_865_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BesselOrder {
    J0,
    J1,
}

impl TryFrom<i64> for BesselOrder {
    type Error = Error;
    fn try_from(n: i64) -> Result<Self> {
        match n {
            0 => Ok(BesselOrder::J0),
            1 => Ok(BesselOrder::J1),
            _ => domain(format!("only Bessel orders 0 and 1 are supported, got {n}")),
        }
    }
}

/// `J_order(t)` with absolute error below `1e-13` on `[0, 50]`.
/// Negative arguments use `J0(-t) = J0(t)` and `J1(-t) = -J1(t)`.
pub fn bessel_j(order: BesselOrder, t: f64) -> f64 {
    match order {
        BesselOrder::J0 => j0(t),
        BesselOrder::J1 => j1(t),
    }
}

pub fn j0(t: f64) -> f64 {
    let x = t.abs();
    if x < 2.0 {
        series_point(x).0
    } else if x <= HANKEL_SWITCH {
        miller(x).0
    } else {
        hankel_point(x).0
    }
}

pub fn j1(t: f64) -> f64 {
    let x = t.abs();
    let v = if x < 2.0 {
        series_point(x).1
    } else if x <= HANKEL_SWITCH {
        miller(x).1
    } else {
        hankel_point(x).1
    };
    if t < 0.0 {
        -v
    } else {
        v
    }
}

/// Both orders at once.
pub fn j01(t: f64) -> (f64, f64) {
    let x = t.abs();
    let (a, b) = if x < 2.0 {
        series_point(x)
    } else if x <= HANKEL_SWITCH {
        miller(x)
    } else {
        hankel_point(x)
    };
    (a, if t < 0.0 { -b } else { b })
}

fn series_point(x: f64) -> (f64, f64) {
    let q = -0.25 * x * x;
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut s0 = 1.0;
    let mut s1 = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        s0 += t0;
        s1 += t1;
        if t0.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    (s0, 0.5 * x * s1)
}

fn miller(x: f64) -> (f64, f64) {
    let start = (x + 20.0 + 9.0 * x.sqrt()) as usize;
    let n = start + (start & 1);
    let two_over_x = 2.0 / x;
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut norm = 0.0;
    let mut out0 = 0.0;
    let mut out1 = 0.0;
    let mut k = n;
    while k > 0 {
        // j holds J_k (unnormalised), jp1 holds J_{k+1}.
        let jm1 = (k as f64) * two_over_x * j - jp1;
        jp1 = j;
        j = jm1;
        k -= 1;
        if k % 2 == 0 && k > 0 {
            norm += 2.0 * j;
        }
        if k == 1 {
            out1 = j;
        }
        if k == 0 {
            out0 = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            out1 *= 1e-250;
        }
    }
    norm += out0;
    (out0 / norm, out1 / norm)
}

/// Hankel coefficients `a_k(nu) / x^k` up to the smallest term.
fn hankel_point(x: f64) -> (f64, f64) {
    let chi0 = x - std::f64::consts::FRAC_PI_4;
    let chi1 = x - 3.0 * std::f64::consts::FRAC_PI_4;
    let scale = (2.0 / (std::f64::consts::PI * x)).sqrt();
    let mut out = [0.0; 2];
    for (i, &mu) in [0.0f64, 4.0].iter().enumerate() {
        let mut p = 0.0;
        let mut q = 0.0;
        let mut term = 1.0;
        let mut prev = f64::INFINITY;
        for k in 0..60 {
            if k > 0 {
                let odd = (2 * k - 1) as f64;
                term *= (mu - odd * odd) / (8.0 * k as f64 * x);
            }
            if term.abs() > prev || term.abs() < 1e-18 {
                break;
            }
            prev = term.abs();
            match k % 4 {
                0 => p += term,
                1 => q += term,
                2 => p -= term,
                _ => q -= term,
            }
        }
        let chi = if i == 0 { chi0 } else { chi1 };
        out[i] = scale * (p * chi.cos() - q * chi.sin());
    }
    (out[0], out[1])
}

/// Certified `(J_0(x), J_1(x))` at an exact point `x >= 0`.
pub fn j01_point_enclosure(x: f64) -> (Enclosure, Enclosure) {
    assert!(x >= 0.0 && x.is_finite(), "point enclosure needs a finite x >= 0");
    if x <= HANKEL_SWITCH {
        series_enclosure(x)
    } else {
        hankel_enclosure(x)
    }
}

fn series_enclosure(x: f64) -> (Enclosure, Enclosure) {
    if x == 0.0 {
        return (Enclosure::point(1.0), Enclosure::point(0.0));
    }
    // q = x^2 / 4 exactly in double-double.
    let mq = Dd::prod(x, x).div_f64(-4.0);
    let qf = 0.25 * x * x;
    let mut t0 = Dd::from_f64(1.0);
    let mut t1 = Dd::from_f64(1.0);
    let mut s0 = t0;
    let mut s1 = t1;
    let mut abs0 = 1.0;
    let mut abs1 = 1.0;
    let mut err0 = 0.0;
    let mut err1 = 0.0;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        t0 = t0.mul(mq).div_f64(kf * kf);
        t1 = t1.mul(mq).div_f64(kf * (kf + 1.0));
        s0 = s0.add(t0);
        s1 = s1.add(t1);
        let a0 = t0.abs_f64();
        let a1 = t1.abs_f64();
        abs0 += a0;
        abs1 += a1;
        // Accumulated relative error of term k: 2k operations.
        err0 += 2.0 * kf * DD_OP_REL * a0;
        err1 += 2.0 * kf * DD_OP_REL * a1;
        let ratio = qf / ((kf + 1.0) * (kf + 1.0));
        if ratio < 0.5 && a0 < 1e-26 && a1 < 1e-26 {
            // Alternating tail bounded geometrically by the next term.
            let tail0 = a0 * ratio / (1.0 - ratio);
            let tail1 = a1 * ratio / (1.0 - ratio);
            let sum_err = (k as f64 + 1.0) * DD_OP_REL * abs0;
            let e0 = 2.0 * (err0 + tail0 + sum_err);
            let sum_err1 = (k as f64 + 1.0) * DD_OP_REL * abs1;
            let e1 = 2.0 * (err1 + tail1 + sum_err1);
            let v0 = Enclosure::around(s0.hi + s0.lo).inflate(e0);
            let v1 = Enclosure::around(s1.hi + s1.lo).inflate(e1) * (0.5 * x);
            return (v0, v1);
        }
        k += 1;
    }
}

/// `a_k(nu) / x^k` as enclosures for `k = 0..=kmax`.
fn hankel_terms(mu: f64, x: f64, kmax: usize) -> Vec<Enclosure> {
    let mut out = Vec::with_capacity(kmax + 1);
    let mut term = Enclosure::point(1.0);
    out.push(term);
    let xe = Enclosure::point(x);
    for k in 1..=kmax {
        let odd = (2 * k - 1) as f64;
        term = term * Enclosure::point(mu - odd * odd) / (xe * (8.0 * k as f64));
        out.push(term);
    }
    out
}

fn hankel_enclosure(x: f64) -> (Enclosure, Enclosure) {
    let pi = Enclosure::pi();
    let xe = Enclosure::point(x);
    let scale = (Enclosure::point(2.0) / (pi * xe)).sqrt().expect("positive");
    let mut out = [Enclosure::point(0.0); 2];
    for (i, &mu) in [0.0f64, 4.0].iter().enumerate() {
        // Number of retained terms: stop while terms still decrease.
        let mut m = 2usize;
        let probe = hankel_terms(mu, x, 64);
        while m + 3 < probe.len() && probe[m].mag() > 1e-19 && probe[m + 2].mag() < probe[m].mag() {
            m += 2;
        }
        let terms = &probe[..=m + 1];
        let mut p = Enclosure::point(0.0);
        let mut q = Enclosure::point(0.0);
        for (k, t) in terms.iter().enumerate().take(m) {
            match k % 4 {
                0 => p += *t,
                1 => q += *t,
                2 => p -= *t,
                _ => q -= *t,
            }
        }
        p += Enclosure::symmetric(terms[m].mag());
        q += Enclosure::symmetric(terms[m + 1].mag());
        let phase = if i == 0 { 0.25 } else { 0.75 };
        let chi = xe - pi * phase;
        out[i] = scale * (p * chi.cos() - q * chi.sin());
    }
    let bound0 = Enclosure::new(-1.0, 1.0);
    let bound1 = Enclosure::new(-J1_MAX, J1_MAX);
    (out[0].tighten(&bound0), out[1].tighten(&bound1))
}

/// Certified enclosure of `J_0` over `t`, for any `t` with `t.lo() >= 0`.
pub(crate) fn j0_enclosure_any(t: Enclosure) -> Enclosure {
    j01_enclosure_any(t).0
}

/// Certified `(J_0, J_1)` over an interval argument with `t.lo() >= 0`.
pub(crate) fn j01_enclosure_any(t: Enclosure) -> (Enclosure, Enclosure) {
    if t.is_point() {
        return j01_point_enclosure(t.lo());
    }
    let m = t.mid();
    let r = t.rad();
    let (a, b) = j01_point_enclosure(m);
    let u = Enclosure::symmetric(r);
    let second = Enclosure::symmetric(0.5 * r * r).inflate(0.0);
    // J0' = -J1 and J1' = J0 - J1/t; both second derivatives are bounded by 1.
    let j0 = a - b * u + second;
    let d1 = if m > 0.0 { a - b / Enclosure::point(m) } else { Enclosure::point(0.5) };
    let j1 = b + d1 * u + second;
    (j0.tighten(&Enclosure::new(-1.0, 1.0)), j1.tighten(&Enclosure::new(-J1_MAX, J1_MAX)))
}

/// Certified enclosure of `J_0` over `t ⊆ [0, 16]`.
pub fn bessel_j0_enclosure(t: Enclosure) -> Result<Enclosure> {
    if t.lo() < 0.0 || t.hi() > 16.0 {
        return range(format!("J0 enclosure supports t within [0, 16], got {t:?}"));
    }
    Ok(j0_enclosure_any(t))
}

/// Certified enclosure of `J_1` over `t ⊆ [0, 16]`.
pub fn bessel_j1_enclosure(t: Enclosure) -> Result<Enclosure> {
    if t.lo() < 0.0 || t.hi() > 16.0 {
        return range(format!("J1 enclosure supports t within [0, 16], got {t:?}"));
    }
    Ok(j01_enclosure_any(t).1)
}

/// Taylor coefficients `a_k = J_0^{(k)}(m) / k!` for `k = 0..=kmax`.
///
/// At `m = 0` these are the exact series coefficients; otherwise they follow
/// from the Bessel equation:
/// `m (k+1)(k+2) a_{k+2} = -[(k+1)^2 a_{k+1} + m a_k + a_{k-1}]`.
pub fn j0_taylor_coeffs(m: f64, kmax: usize) -> Vec<Enclosure> {
    let mut a = vec![Enclosure::point(0.0); kmax + 1];
    if m == 0.0 {
        let mut c = 1.0f64;
        for i in 0..=kmax / 2 {
            if i > 0 {
                c /= -4.0 * (i * i) as f64;
            }
            a[2 * i] = Enclosure::around(c);
        }
        a[0] = Enclosure::point(1.0);
        return a;
    }
    let (v0, v1) = j01_point_enclosure(m);
    a[0] = v0;
    if kmax >= 1 {
        a[1] = -v1;
    }
    let me = Enclosure::point(m);
    for k in 0..kmax.saturating_sub(1) {
        let kf = k as f64;
        let prev = if k == 0 { Enclosure::point(0.0) } else { a[k - 1] };
        let num = a[k + 1] * ((kf + 1.0) * (kf + 1.0)) + me * a[k] + prev;
        let den = me * ((kf + 1.0) * (kf + 2.0));
        let mut next = -(num / den);
        // |J0^{(j)}| <= 1 gives |a_j| <= 1/j!.
        let cap = 1.0 / factorial(k + 2);
        next = next.tighten(&Enclosure::new(-cap, cap));
        a[k + 2] = next;
    }
    a
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
