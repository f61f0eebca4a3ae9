//! Truncated Taylor series with enclosure coefficients.

use crate::error::{domain, Result};
use crate::interval::Enclosure;

/// First `n` coefficients of the product of two series.
pub(crate) fn mul(a: &[Enclosure], b: &[Enclosure], n: usize) -> Vec<Enclosure> {
    (0..n)
        .map(|k| {
            let mut acc = Enclosure::point(0.0);
            for j in 0..=k {
                if j < a.len() && k - j < b.len() {
                    acc += a[j] * b[k - j];
                }
            }
            acc
        })
        .collect()
}

/// First `n` coefficients of `u^e` for a non-negative integer `e`.
pub(crate) fn powi(u: &[Enclosure], e: u32, n: usize) -> Vec<Enclosure> {
    let mut result = vec![Enclosure::point(0.0); n];
    result[0] = Enclosure::point(1.0);
    let mut base: Vec<Enclosure> = u.iter().take(n).copied().collect();
    base.resize(n, Enclosure::point(0.0));
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base, n);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base, n);
        }
    }
    result
}

/// First `n` coefficients of `u^s` for real `s`, with `u_0 > 0`.
///
/// Uses `k u_0 v_k = sum_{j=1}^{k} (s j - (k - j)) u_j v_{k-j}`.
pub(crate) fn pow_real(u: &[Enclosure], s: f64, n: usize) -> Result<Vec<Enclosure>> {
    let u0 = u[0];
    if !u0.is_positive() {
        return domain(format!("series power needs a positive constant term, got {u0:?}"));
    }
    let mut v = Vec::with_capacity(n);
    v.push(u0.pow_f64(s)?);
    for k in 1..n {
        let mut acc = Enclosure::point(0.0);
        for j in 1..=k.min(u.len() - 1) {
            let c = s * j as f64 - (k - j) as f64;
            acc += u[j] * v[k - j] * c;
        }
        v.push(acc.try_div(u0 * k as f64)?);
    }
    Ok(v)
}

/// `|s|^e` as a series when `e` is a non-negative even integer, else `None`.
pub(crate) fn even_exponent(s: f64) -> Option<u32> {
    if (0.0..=1e6).contains(&s) && s.fract() == 0.0 && (s as u64) % 2 == 0 {
        Some(s as u32)
    } else {
        None
    }
}

/// Enclosures of the Taylor coefficients of `f` at every point of `m + U`,
/// given point coefficients `a_0..a_K` at `m`, `U` contained in `[-r, r]`,
/// and a bound `d` on `|f^{(K+1)}|` over the cell.
pub(crate) fn shifted(a: &[Enclosure], r: f64, d: f64, n: usize) -> Vec<Enclosure> {
    let kmax = a.len() - 1;
    let r = Enclosure::point(r);
    (0..n)
        .map(|k| {
            // sum_{i>=1} |binom(k+i, k) a_{k+i}| r^i
            let mut spread = Enclosure::point(0.0);
            let mut rp = Enclosure::point(1.0);
            let mut binom = 1.0f64;
            for i in 1..=kmax - k {
                rp *= r;
                binom = binom * (k + i) as f64 / i as f64;
                spread += Enclosure::point(binom) * Enclosure::point(a[k + i].mag()) * rp;
            }
            let rem_order = (kmax + 1 - k) as i32;
            let rem = r.powi(rem_order) * d / Enclosure::point(factorial(kmax + 1 - k) * factorial(k));
            let bound = (spread + rem).hi();
            a[k] + Enclosure::symmetric(bound)
        })
        .collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
