//! `E|xi_1 + sqrt(x) xi_2|^{-p} = sum_k binom(-p/2, k)^2 x^k` for `0 <= x <= 1`.

use crate::error::{convergence, range, Result};
use crate::interval::Enclosure;
use crate::specfun::gamma_enclosure;

use super::{check_p, MomentEstimate, MomentMethod};

/// Above this `x` the series is summed in `1 - x` after the connection formula.
const SWITCH: f64 = 0.9;
const MAX_TERMS: usize = 5000;

/// Point value of the pair series with an error below `tol`.
pub fn pair_series_moment(p: f64, x: f64, tol: f64) -> Result<f64> {
    Ok(pair_series_estimate(p, x, tol)?.value)
}

/// The pair series as a [`MomentEstimate`] whose half-width is rigorous.
pub fn pair_series_estimate(p: f64, x: f64, tol: f64) -> Result<MomentEstimate> {
    if !(tol > 0.0) {
        return range(format!("tolerance must be positive, got {tol}"));
    }
    let (e, terms) = enclose(p, x)?;
    if e.rad() > tol {
        return convergence(format!(
            "pair series at p = {p}, x = {x} reaches half-width {:.3e}, above {tol:.3e}",
            e.rad()
        ));
    }
    Ok(MomentEstimate {
        value: e.mid(),
        half_width: e.rad(),
        method: MomentMethod::PairSeries,
        meta: terms as u64,
        warning: None,
    })
}

/// Certified enclosure of the pair series.
pub fn pair_series_enclosure(p: f64, x: f64) -> Result<Enclosure> {
    Ok(enclose(p, x)?.0)
}

fn enclose(p: f64, x: f64) -> Result<(Enclosure, usize)> {
    check_p(p)?;
    if !(0.0..=1.0).contains(&x) {
        return range(format!("pair series needs 0 <= x <= 1, got {x}; rescale by homogeneity"));
    }
    let half = Enclosure::point(p) * 0.5;
    if x == 1.0 {
        // Gauss summation.
        let one = Enclosure::point(1.0);
        let g = gamma_enclosure(one - Enclosure::point(p))?;
        let h = gamma_enclosure(one - half)?;
        return Ok((g / h.sqr(), 0));
    }
    if x <= SWITCH {
        let xe = Enclosure::point(x);
        return hyp_sum(half, half, Enclosure::point(1.0), xe, x);
    }
    // Connection to 1 - x.
    let y = 1.0 - x;
    let one = Enclosure::point(1.0);
    let ye = one - Enclosure::point(x);
    let pe = Enclosure::point(p);
    let (f1, n1) = hyp_sum(half, half, pe, ye, y)?;
    let (f2, n2) = hyp_sum(one - half, one - half, Enclosure::point(2.0) - pe, ye, y)?;
    let gp = gamma_enclosure(pe)?;
    let gh = gamma_enclosure(half)?;
    let g1 = gamma_enclosure(one - pe)?;
    let g1h = gamma_enclosure(one - half)?;
    let a = g1 / g1h.sqr();
    // Gamma(p - 1) = Gamma(p) / (p - 1).
    let b = gp / (pe - one) / gh.sqr();
    let yp = ye.pow_f64(1.0 - p)?;
    Ok((a * f1 + b * yp * f2, n1 + n2))
}

/// `2F1(a, b; c; z)` when the term ratio is at most `zf < 1` for every `k`.
fn hyp_sum(a: Enclosure, b: Enclosure, c: Enclosure, z: Enclosure, zf: f64) -> Result<(Enclosure, usize)> {
    let mut term = Enclosure::point(1.0);
    let mut sum = Enclosure::point(0.0);
    for k in 0..MAX_TERMS {
        // Remaining sum is at most term / (1 - zf).
        let rest = term.hi() / (1.0 - zf);
        if rest <= 1e-17 * sum.lo().abs() || rest == 0.0 {
            let tail = Enclosure::new(0.0, rest) * (1.0 + 4.0 * f64::EPSILON);
            return Ok((sum + tail, k));
        }
        sum += term;
        let kf = k as f64;
        term = term * (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
    }
    convergence(format!("hypergeometric series did not converge at z = {zf}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::c_p;

    // mpmath: hyp2f1(p/2, p/2, 1, x) at 30 digits.
    const REF: &[(f64, f64, f64)] = &[
        (0.3, 0.5, 1.013_817_465_800_519_4),
        (0.9, 0.81, 1.342_960_606_257_326_6),
        (0.4, 0.999, 1.096_014_276_970_021),
    ];

    #[test]
    fn matches_reference_values() {
        for &(p, x, want) in REF {
            let e = pair_series_enclosure(p, x).unwrap();
            assert!(e.contains(want) || (e.mid() - want).abs() < 2e-15, "{p} {x}: {e:?}");
            assert!(e.width() < 1e-11, "{e:?}");
        }
    }

    #[test]
    fn endpoints() {
        assert_eq!(pair_series_moment(0.5, 0.0, 1e-12).unwrap(), 1.0);
        for p in [0.1, 0.5, 0.9] {
            let at1 = pair_series_moment(p, 1.0, 1e-10).unwrap();
            let want = c_p(p).unwrap() * 2f64.powf(-p / 2.0);
            assert!((at1 - want).abs() < 1e-12, "{p}: {at1} vs {want}");
        }
    }

    #[test]
    fn branches_agree_at_switch() {
        for p in [0.05, 0.5, 0.95] {
            let below = enclose(p, SWITCH).unwrap().0;
            let above = enclose(p, SWITCH + 1e-15).unwrap().0;
            assert!((below.mid() - above.mid()).abs() < 1e-12, "{below:?} {above:?}");
        }
    }

    #[test]
    fn domain_checks() {
        assert!(pair_series_moment(0.5, 1.1, 1e-9).is_err());
        assert!(pair_series_moment(0.5, -0.1, 1e-9).is_err());
        assert!(pair_series_moment(1.0, 0.5, 1e-9).is_err());
        assert!(pair_series_moment(0.5, 0.5, 0.0).is_err());
    }
}
