//! Asymptotic evaluation of `int_X^inf prod_j J_0(b_j t) t^g dt`.
//!
//! Each factor is replaced by its Hankel expansion
//! `J_0(x) ~ sqrt(2/(pi x)) Re[e^{i(x - pi/4)} sum_k i^k a_k x^{-k}]`,
//! the product is expanded into frequencies `sum_j +-b_j` (equal
//! frequencies merged), and each `e^{i w t} t^e` piece is integrated
//! numerically up to `120/|w|` and by parts beyond.

use num_complex::Complex64 as C;

use crate::error::{convergence, domain, Result};

use super::gauss;

/// Number of Hankel terms kept per factor.
pub(crate) const HANKEL_TERMS: usize = 12;
/// Smallest argument `b X` at which the expansion is used.
pub(crate) const FAST: f64 = 25.0;
const MAX_TERMS: usize = 1 << 16;
const IBP_START: f64 = 120.0;
const IBP_MAX: usize = 200;

fn hankel_coeffs() -> [f64; HANKEL_TERMS + 1] {
    let mut a = [0.0; HANKEL_TERMS + 1];
    a[0] = 1.0;
    for k in 1..=HANKEL_TERMS {
        let odd = (2 * k - 1) as f64;
        a[k] = -a[k - 1] * odd * odd / (8.0 * k as f64);
    }
    a
}

/// `t^g prod_j J_0(b_j t) ~ t^gamma Re sum_w e^{i w t} Q_w(1/t)`.
#[derive(Clone, Debug)]
pub(crate) struct Expansion {
    gamma: f64,
    terms: Vec<(f64, Vec<C>)>,
    b: Vec<f64>,
    envelope: f64,
}

impl Expansion {
    pub(crate) fn new(b: &[f64], g: f64) -> Result<Self> {
        if b.iter().any(|&x| !(x > 0.0)) {
            return domain("Bessel frequencies must be positive");
        }
        let a = hankel_coeffs();
        let scale: f64 = 1.0 + b.iter().sum::<f64>();
        let mut terms = vec![(0.0, vec![C::new(1.0, 0.0)])];
        let mut envelope = 1.0;
        for &bj in b {
            let amp = 0.5 * (2.0 / (std::f64::consts::PI * bj)).sqrt();
            envelope *= 2.0 * amp;
            let mut series = Vec::with_capacity(HANKEL_TERMS);
            let mut ik = C::new(1.0, 0.0);
            for (k, ak) in a.iter().take(HANKEL_TERMS).enumerate() {
                series.push(ik * (ak / bj.powi(k as i32)));
                ik *= C::i();
            }
            let phase = C::from_polar(amp, -std::f64::consts::FRAC_PI_4);
            let plus: Vec<C> = series.iter().map(|c| c * phase).collect();
            let minus: Vec<C> = plus.iter().map(|c| c.conj()).collect();
            let mut next = Vec::with_capacity(2 * terms.len());
            for (w, q) in &terms {
                next.push((w + bj, poly_mul(q, &plus)));
                next.push((w - bj, poly_mul(q, &minus)));
            }
            next.sort_by(|x, y| x.0.total_cmp(&y.0));
            terms = Vec::with_capacity(next.len());
            for (w, q) in next {
                match terms.last_mut() {
                    Some((lw, lq)) if (w - *lw).abs() <= 1e-12 * scale => {
                        for (x, y) in lq.iter_mut().zip(&q) {
                            *x += y;
                        }
                    }
                    _ => terms.push((w, q)),
                }
            }
            if terms.len() > MAX_TERMS {
                return convergence("too many distinct frequencies in the Bessel product");
            }
        }
        for t in terms.iter_mut() {
            if t.0.abs() <= 1e-12 * scale {
                t.0 = 0.0;
            }
        }
        Ok(Expansion { gamma: g - 0.5 * b.len() as f64, terms, b: b.to_vec(), envelope })
    }

    /// Value of the expansion at `t`.
    #[cfg(test)]
    pub(crate) fn eval(&self, t: f64) -> f64 {
        let u = 1.0 / t;
        let s: f64 = self.terms.iter().map(|(w, q)| (C::from_polar(1.0, w * t) * horner(q, u)).re).sum();
        s * t.powf(self.gamma)
    }

    /// Value and error estimate of `int_x^inf`.
    pub(crate) fn integrate_from(&self, x: f64) -> Result<(f64, f64)> {
        if let Some(&bmin) = self.b.iter().min_by(|a, b| a.total_cmp(b)) {
            if bmin * x < FAST {
                return domain(format!("asymptotic tail needs b x >= {FAST}, got {}", bmin * x));
            }
        }
        let mut value = 0.0;
        let mut err = 0.0;
        for (w, q) in &self.terms {
            let (v, e) = osc_integral(self.gamma, *w, q, x)?;
            value += v.re;
            err += e;
        }
        // First omitted Hankel term of each factor.
        let a = hankel_coeffs();
        let rel: f64 = self.b.iter().map(|&bj| a[HANKEL_TERMS].abs() / (bj * x).powi(HANKEL_TERMS as i32)).sum();
        let g1 = self.gamma + 1.0;
        let env = self.envelope * x.powf(g1) * if g1 < 0.0 { 1.0 / (-g1).max(1.0 / x) } else { x };
        err += rel * env + 1e-15 * value.abs();
        Ok((value, err))
    }
}

fn poly_mul(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().max(b.len()).min(HANKEL_TERMS);
    let mut out = vec![C::new(0.0, 0.0); n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < n {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn horner(q: &[C], u: f64) -> C {
    q.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * u + c)
}

/// `int_x^inf e^{i w t} sum_k q_k t^{g-k} dt` and an error estimate.
pub(crate) fn osc_integral(g: f64, w: f64, q: &[C], x: f64) -> Result<(C, f64)> {
    if w == 0.0 {
        let mut s = C::new(0.0, 0.0);
        for (k, qk) in q.iter().enumerate() {
            if *qk == C::new(0.0, 0.0) {
                continue;
            }
            let e = g - k as f64 + 1.0;
            if e >= 0.0 {
                return convergence(format!("non-oscillating tail term t^{} is not integrable", e - 1.0));
            }
            s += qk * (-x.powf(e) / e);
        }
        return Ok((s, 1e-15 * s.norm()));
    }
    let f = |t: f64| C::from_polar(t.powf(g), w * t) * horner(q, 1.0 / t);
    let x1 = x.max(IBP_START / w.abs());
    let (mut total, mut err) = (C::new(0.0, 0.0), 0.0);
    let mut t = x;
    while t < x1 {
        let h = (0.25 * t).min(1.0 / w.abs());
        let b = (t + h).min(x1);
        let hi = integrate_c(8, t, b, f);
        let lo = integrate_c(6, t, b, f);
        total += hi;
        err += (hi - lo).norm();
        t = b;
    }
    // By parts: int_X^inf P e^{iwt} = e^{iwX} sum_j (-1)^{j+1} P^{(j)}(X) / (iw)^{j+1}.
    let mut c: Vec<C> = q.iter().enumerate().map(|(k, qk)| qk * x1.powf(g - k as f64)).collect();
    let iw = C::new(0.0, w);
    let mut denom = iw;
    let mut sum = C::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for j in 0..IBP_MAX {
        let deriv: C = c.iter().sum();
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        let term = deriv / denom * sign;
        let m = term.norm();
        if m > prev {
            break;
        }
        sum += term;
        last = m;
        if m <= 1e-17 * sum.norm() {
            break;
        }
        prev = m;
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= (g - k as f64 - j as f64) / x1;
        }
        denom *= iw;
    }
    total += C::from_polar(1.0, w * x1) * sum;
    Ok((total, err + last))
}

fn integrate_c<F: Fn(f64) -> C>(n: usize, a: f64, b: f64, f: F) -> C {
    let (x, w) = gauss::rule(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = C::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        s += f(c + h * xi) * *wi;
    }
    s * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel::j0;

    #[test]
    fn expansion_tracks_product() {
        let b = [1.0, 0.6, 0.35];
        let e = Expansion::new(&b, -0.5).unwrap();
        for &t in &[80.0, 150.0, 400.0] {
            let exact: f64 = b.iter().map(|&bj| j0(bj * t)).product::<f64>() * t.powf(-0.5);
            let approx = e.eval(t);
            assert!((exact - approx).abs() < 1e-13 * t.powf(-2.0), "{t}: {exact} vs {approx}");
        }
    }

    #[test]
    fn equal_weights_merge() {
        let e = Expansion::new(&[0.25; 16], 0.0).unwrap();
        assert_eq!(e.terms.len(), 17);
        assert!(e.terms.iter().any(|t| t.0 == 0.0));
    }

    #[test]
    fn power_exponential_integral() {
        // int_X^inf e^{it} t^{-2} dt = E_2-type value, checked against a long quadrature.
        let (v, err) = osc_integral(-2.0, 1.0, &[C::new(1.0, 0.0)], 10.0).unwrap();
        let mut want = C::new(0.0, 0.0);
        let mut t = 10.0;
        while t < 4.0e4 {
            want += integrate_c(16, t, t + 0.5, |s| C::from_polar(s.powi(-2), s));
            t += 0.5;
        }
        // Remainder beyond 4e4 by one integration by parts.
        want += C::from_polar(1.0, t) * C::new(0.0, 1.0) / (t * t);
        assert!((v - want).norm() < 1e-11, "{v} vs {want}");
        assert!(err < 1e-12);
    }

    #[test]
    fn zero_frequency_closed_form() {
        let (v, _) = osc_integral(-1.5, 0.0, &[C::new(2.0, 0.0)], 4.0).unwrap();
        assert!((v.re - 2.0).abs() < 1e-15);
        assert!(osc_integral(-0.5, 0.0, &[C::new(1.0, 0.0)], 4.0).is_err());
    }
}
