//! Closed-form sharp constants and comparison functions.
//!
//! Point versions use the Lanczos gamma; the `*_enclosure` versions use the
//! certified Stirling route and are what the verifier consumes.

use serde::{Deserialize, Serialize};

use crate::error::{convergence, domain, Result};
use crate::interval::Enclosure;
use crate::specfun::{gamma, log_gamma, log_gamma_enclosure};

const LN2: f64 = std::f64::consts::LN_2;
const EULER: f64 = 0.577_215_664_901_532_9;
const ZETA2: f64 = 1.644_934_066_848_226_4;
const ZETA3: f64 = 1.202_056_903_159_594_3;
const ZETA4: f64 = 1.082_323_233_711_138_2;

fn check_open_unit(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        domain(format!("{name} requires 0 < p < 1, got {p}"))
    }
}

fn lg(x: f64) -> f64 {
    log_gamma(x).expect("positive argument")
}

/// `C_p = 2^{p/2} Gamma(1-p) / Gamma(1-p/2)^2`.
pub fn c_p(p: f64) -> Result<f64> {
    check_open_unit("c_p", p)?;
    Ok((0.5 * p * LN2 + lg(1.0 - p) - 2.0 * lg(1.0 - 0.5 * p)).exp())
}

/// `kappa_p = 2^{1-p} Gamma(1-p/2) / Gamma(p/2)`.
pub fn kappa_p(p: f64) -> Result<f64> {
    check_open_unit("kappa_p", p)?;
    Ok(2f64.powf(1.0 - p) * gamma(1.0 - 0.5 * p)? / gamma(0.5 * p)?)
}

/// `Psi_p(2) = 2^{3p/2-1} Gamma(1-p) Gamma(p/2) Gamma(1-p/2)^{-3}`.
pub fn psi_2(p: f64) -> Result<f64> {
    check_open_unit("psi_2", p)?;
    Ok(((1.5 * p - 1.0) * LN2 + lg(1.0 - p) + lg(0.5 * p) - 3.0 * lg(1.0 - 0.5 * p)).exp())
}

/// `D(p) = 2^{p/2} Gamma(1-p) / Gamma(1-p/2)^3`, with `D(0) = 1`.
pub fn d_func(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return domain(format!("d_func requires 0 <= p < 1, got {p}"));
    }
    if p == 0.0 {
        return Ok(1.0);
    }
    Ok((0.5 * p * LN2 + lg(1.0 - p) - 3.0 * lg(1.0 - 0.5 * p)).exp())
}

fn lge(x: Enclosure) -> Enclosure {
    log_gamma_enclosure(x).expect("positive argument")
}

fn one_minus(p: f64, scale: f64) -> Enclosure {
    Enclosure::point(1.0) - Enclosure::point(p) * scale
}

pub fn c_p_enclosure(p: f64) -> Result<Enclosure> {
    check_open_unit("c_p", p)?;
    let e = Enclosure::ln2() * (0.5 * p) + lge(one_minus(p, 1.0)) - lge(one_minus(p, 0.5)) * 2.0;
    Ok(e.exp())
}

pub fn kappa_p_enclosure(p: f64) -> Result<Enclosure> {
    check_open_unit("kappa_p", p)?;
    let e = Enclosure::ln2() * one_minus(p, 1.0) + lge(one_minus(p, 0.5)) - lge(Enclosure::point(p) * 0.5);
    Ok(e.exp())
}

pub fn psi_2_enclosure(p: f64) -> Result<Enclosure> {
    check_open_unit("psi_2", p)?;
    let e =
        Enclosure::ln2() * (Enclosure::point(p) * 1.5 - 1.0) + lge(one_minus(p, 1.0)) + lge(Enclosure::point(p) * 0.5)
            - lge(one_minus(p, 0.5)) * 3.0;
    Ok(e.exp())
}

/// Certified `ln D(p)`.
pub fn log_d_enclosure(p: f64) -> Result<Enclosure> {
    if !(0.0..1.0).contains(&p) {
        return domain(format!("d_func requires 0 <= p < 1, got {p}"));
    }
    if p == 0.0 {
        return Ok(Enclosure::point(0.0));
    }
    Ok(Enclosure::ln2() * (0.5 * p) + lge(one_minus(p, 1.0)) - lge(one_minus(p, 0.5)) * 3.0)
}

pub fn d_func_enclosure(p: f64) -> Result<Enclosure> {
    Ok(log_d_enclosure(p)?.exp())
}

/// The comparison function `phi_p(x) = (1+x)^{-p/2}` and its concave
/// modification `Phi_p`, which follows the tangent-reflected branch
/// `2 phi_p(1) - phi_p(2-x)` on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiPair {
    pub p: f64,
}

impl PhiPair {
    pub fn new(p: f64) -> Result<Self> {
        check_open_unit("PhiPair", p)?;
        Ok(PhiPair { p })
    }

    pub fn phi(&self, x: f64) -> Result<f64> {
        phi_small(self.p, x)
    }

    pub fn cap(&self, x: f64) -> Result<f64> {
        phi_cap(self.p, x)
    }

    pub fn phi_enclosure(&self, x: f64) -> Result<Enclosure> {
        if !(x >= 0.0) {
            return domain(format!("phi requires x >= 0, got {x}"));
        }
        (Enclosure::point(1.0) + x).pow_f64(-0.5 * self.p)
    }

    pub fn cap_enclosure(&self, x: f64) -> Result<Enclosure> {
        if !(x >= 0.0) {
            return domain(format!("Phi requires x >= 0, got {x}"));
        }
        if x >= 1.0 {
            return self.phi_enclosure(x);
        }
        let at_one = Enclosure::point(2.0).pow_f64(-0.5 * self.p)?;
        let refl = (Enclosure::point(3.0) - x).pow_f64(-0.5 * self.p)?;
        Ok(at_one * 2.0 - refl)
    }
}

/// `phi_p(x) = (1+x)^{-p/2}`.
pub fn phi_small(p: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("phi requires x >= 0, got {x}"));
    }
    Ok((1.0 + x).powf(-0.5 * p))
}

/// `Phi_p(x)`: `phi_p(x)` for `x >= 1`, else `2 phi_p(1) - phi_p(2-x)`.
pub fn phi_cap(p: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("Phi requires x >= 0, got {x}"));
    }
    if x >= 1.0 {
        Ok((1.0 + x).powf(-0.5 * p))
    } else {
        Ok(2.0 * 2f64.powf(-0.5 * p) - (3.0 - x).powf(-0.5 * p))
    }
}

/// `||Z||_p = Gamma(p/2+1)^{1/p}` for the standard complex Gaussian,
/// with the geometric-mean limit `exp(-gamma/2)` at `p = 0`.
pub fn gaussian_norm(p: f64) -> Result<f64> {
    if !(p > -2.0) {
        return domain(format!("Gaussian norm requires p > -2, got {p}"));
    }
    if p.abs() < 1e-4 {
        // ln Gamma(1+p/2)/p as a series in p
        let l = -EULER / 2.0 + ZETA2 * p / 8.0 - ZETA3 * p * p / 24.0 + ZETA4 * p.powi(3) / 64.0;
        return Ok(l.exp());
    }
    Ok((lg(0.5 * p + 1.0) / p).exp())
}

/// `||(xi_1 + xi_2)/sqrt 2||_p = (2^{-p/2} Gamma(1+p) / Gamma(1+p/2)^2)^{1/p}`,
/// with the limit `2^{-1/2}` at `p = 0`.
pub fn pair_norm(p: f64) -> Result<f64> {
    if !(p > -1.0) {
        return domain(format!("pair norm requires p > -1, got {p}"));
    }
    if p.abs() < 1e-4 {
        let l = -0.5 * LN2 + ZETA2 * p / 4.0 - ZETA3 * p * p / 4.0 + 7.0 * ZETA4 * p.powi(3) / 32.0;
        return Ok(l.exp());
    }
    Ok(((-0.5 * p * LN2 + lg(1.0 + p) - 2.0 * lg(1.0 + 0.5 * p)) / p).exp())
}

/// Where a value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Stated in the source.
    Paper,
    /// Computed here from stated results.
    Derived,
    /// Extended beyond the stated range by monotonicity of norms.
    Extrapolated,
}

/// Which expression realises `A_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ARegime {
    PairNorm,
    GaussianNorm,
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhinchinConstants {
    pub p: f64,
    pub a_p: f64,
    pub b_p: f64,
    pub a_regime: ARegime,
    pub a_provenance: Provenance,
    pub b_provenance: Provenance,
}

/// Sharp constants in `A_p ||S||_2 <= ||S||_p <= B_p ||S||_2` for `p > -1`.
pub fn khinchin_constants(p: f64) -> Result<KhinchinConstants> {
    if !(p > -1.0) || !p.is_finite() {
        return domain(format!("khinchin_constants requires p > -1, got {p}"));
    }
    let pstar = pstar_cached();
    let (a_p, a_regime) = if p >= 2.0 {
        (1.0, ARegime::One)
    } else if p >= pstar {
        (gaussian_norm(p)?, ARegime::GaussianNorm)
    } else {
        (pair_norm(p)?, ARegime::PairNorm)
    };
    let (b_p, b_provenance) = if p > 2.0 {
        (gaussian_norm(p)?, Provenance::Paper)
    } else if p >= 0.0 {
        (1.0, Provenance::Paper)
    } else {
        (1.0, Provenance::Extrapolated)
    };
    Ok(KhinchinConstants { p, a_p, b_p, a_regime, a_provenance: Provenance::Paper, b_provenance })
}

fn pstar_cached() -> f64 {
    use std::sync::OnceLock;
    static PSTAR: OnceLock<f64> = OnceLock::new();
    *PSTAR.get_or_init(|| find_pstar(1e-14).expect("bracket is valid"))
}

/// Root of `pair_norm(p) - gaussian_norm(p)` in `(0, 2)` by bisection.
/// The bracket is `[0.01, 1]`; the other root at `p = 2` is excluded.
pub fn find_pstar(tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return domain(format!("find_pstar requires tol > 0, got {tol}"));
    }
    let f = |p: f64| pair_norm(p).unwrap() - gaussian_norm(p).unwrap();
    let (mut a, mut b) = (0.01, 1.0);
    let (fa, fb) = (f(a), f(b));
    if fa.signum() == fb.signum() {
        return convergence(format!("no sign change on [{a}, {b}]: {fa}, {fb}"));
    }
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if f(m).signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath, 40 digits: (p, C_p, kappa_p, Psi_p(2), D(p)).
    const REF: &[(f64, f64, f64, f64, f64)] = &[
        (0.1, 1.039_870_315_025_195_5, 0.098_857_294_020_701_54, 10.518_903_287_069_925, 1.008_160_328_496_098_4),
        (0.3, 1.163_751_793_398_649, 0.290_539_530_834_249_75, 4.005_485_209_042_205, 1.046_084_319_929_756_2),
        (0.5, 1.403_669_438_476_515_4, 0.477_988_797_486_125, 2.936_615_765_597_019, 1.145_462_956_113_414_9),
        (0.7, 1.988_330_082_992_539_4, 0.669_593_220_165_936_4, 2.969_459_700_472_77, 1.435_829_806_216_685_7),
        (0.9, 4.975_705_505_782_264, 0.880_080_823_086_943_3, 5.653_691_542_021_833, 3.078_788_928_577_453),
    ];

    #[test]
    fn closed_forms_match_reference() {
        for &(p, c, k, s, d) in REF {
            assert!((c_p(p).unwrap() / c - 1.0).abs() < 1e-13, "C_{p}");
            assert!((kappa_p(p).unwrap() / k - 1.0).abs() < 1e-13, "kappa_{p}");
            assert!((psi_2(p).unwrap() / s - 1.0).abs() < 1e-13, "Psi_{p}(2)");
            assert!((d_func(p).unwrap() / d - 1.0).abs() < 1e-13, "D({p})");
            assert!(c_p_enclosure(p).unwrap().contains(c));
            assert!(kappa_p_enclosure(p).unwrap().contains(k));
            assert!(psi_2_enclosure(p).unwrap().contains(s));
            assert!(d_func_enclosure(p).unwrap().contains(d));
            assert!(c_p_enclosure(p).unwrap().width() < 1e-12 * c);
        }
    }

    #[test]
    fn half_substitutions() {
        let g = |x: f64| gamma(x).unwrap();
        let c = 2f64.powf(0.25) * g(0.5) / g(0.75).powi(2);
        assert!((c_p(0.5).unwrap() - c).abs() < 1e-13);
        let k = 2f64.sqrt() * g(0.75) / g(0.25);
        assert!((kappa_p(0.5).unwrap() - k).abs() < 1e-13);
        let s = 2f64.powf(-0.25) * g(0.5) * g(0.25) / g(0.75).powi(3);
        assert!((psi_2(0.5).unwrap() - s).abs() < 1e-12);
    }

    #[test]
    fn limits_and_domains() {
        assert!((c_p(1e-9).unwrap() - 1.0).abs() < 1e-8);
        assert!((kappa_p(1.0 - 1e-9).unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(d_func(0.0).unwrap(), 1.0);
        assert!(c_p(0.0).is_err() && c_p(1.0).is_err() && kappa_p(-0.1).is_err());
        assert!(d_func(1.0).is_err() && d_func(-0.1).is_err() && psi_2(1.5).is_err());
    }

    #[test]
    fn identity_c_equals_kappa_times_psi2() {
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let lhs = kappa_p(p).unwrap() * psi_2(p).unwrap();
            assert!((lhs / c_p(p).unwrap() - 1.0).abs() < 1e-12, "p = {p}");
            assert!(c_p(p).unwrap() >= 1.0);
        }
    }

    #[test]
    fn log_d_slope_at_zero() {
        let h = 1e-6;
        let slope = (d_func(h).unwrap().ln() - d_func(0.0).unwrap().ln()) / h;
        assert!((slope - 0.057_965_757_829_206_22).abs() < 1e-5);
    }

    #[test]
    fn d_log_convex_and_increasing() {
        let mut prev = 0.0;
        for i in 1..999 {
            let p = i as f64 * 1e-3;
            let l = |q: f64| d_func(q).unwrap().ln();
            let second = l(p + 1e-3) - 2.0 * l(p) + l(p - 1e-3);
            assert!(second >= -1e-9, "p = {p}");
            let d = d_func(p).unwrap();
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn phi_properties() {
        for &p in &[0.1, 0.5, 0.9] {
            let ph = PhiPair::new(p).unwrap();
            assert!((ph.cap(1.0).unwrap() - 2f64.powf(-p / 2.0)).abs() < 1e-15);
            let at0 = 2f64.powf(1.0 - p / 2.0) - 3f64.powf(-p / 2.0);
            assert!((ph.cap(0.0).unwrap() - at0).abs() < 1e-15);
            for i in 0..=1000 {
                let x = i as f64 / 1000.0;
                assert!(ph.cap(x).unwrap() <= ph.phi(x).unwrap() + 1e-15);
                if i > 0 && i < 1000 {
                    let h = 1e-3;
                    let second = ph.cap(x + h).unwrap() - 2.0 * ph.cap(x).unwrap() + ph.cap(x - h).unwrap();
                    assert!(second <= 1e-9);
                }
            }
            let h = 1e-7;
            let left = (ph.cap(1.0).unwrap() - ph.cap(1.0 - h).unwrap()) / h;
            let right = (ph.cap(1.0 + h).unwrap() - ph.cap(1.0).unwrap()) / h;
            assert!((left - right).abs() < 1e-6);
            assert!(ph.cap_enclosure(0.3).unwrap().contains(ph.cap(0.3).unwrap()));
        }
        assert!(phi_cap(0.5, -0.1).is_err() && phi_small(0.5, -1.0).is_err());
    }

    #[test]
    fn pstar_and_curves() {
        let ps = find_pstar(1e-12).unwrap();
        assert!((ps - 0.475_617_008_932_072_6).abs() < 1e-10);
        assert!(ps > 0.47 && ps < 0.49);
        assert!(pair_norm(0.1).unwrap() < gaussian_norm(0.1).unwrap());
        assert!(pair_norm(1.0).unwrap() > gaussian_norm(1.0).unwrap());
        let b4 = khinchin_constants(4.0).unwrap().b_p;
        assert!((b4 - 2f64.powf(0.25)).abs() < 1e-14);
        assert_eq!(khinchin_constants(3.0).unwrap().a_p, 1.0);
        assert_eq!(khinchin_constants(-0.5).unwrap().b_provenance, Provenance::Extrapolated);
        assert!(khinchin_constants(-1.0).is_err());
        for i in 0..400 {
            let p = -0.99 + i as f64 * 0.01;
            let k = khinchin_constants(p).unwrap();
            assert!(k.a_p <= 1.0 + 1e-15 && k.b_p >= 1.0 - 1e-15, "p = {p}");
        }
        for &j in &[ps, 2.0] {
            let l = khinchin_constants(j - 1e-10).unwrap();
            let r = khinchin_constants(j + 1e-10).unwrap();
            assert!((l.a_p - r.a_p).abs() < 1e-8 && (l.b_p - r.b_p).abs() < 1e-8);
        }
        let z0 = gaussian_norm(0.0).unwrap();
        assert!((z0 - (-EULER / 2.0).exp()).abs() < 1e-15);
        assert!((gaussian_norm(2e-4).unwrap() - gaussian_norm(0.99e-4).unwrap()).abs() < 1e-4);
        assert!((pair_norm(0.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((pair_norm(1.5e-4).unwrap() - pair_norm(0.5e-4).unwrap()).abs() < 1e-4);
    }
}
