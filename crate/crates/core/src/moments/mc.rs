//! Direct simulation of `|sum a_j e^{i theta_j}|^{-p}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};

use super::{check_p, CoefficientVector, MomentEstimate, MomentMethod, VarianceWarning};

/// Number of independent blocks for the median-of-means estimator.
pub const BLOCKS: u64 = 16;
/// Sample kurtosis above which a [`VarianceWarning`] is attached.
pub const KURTOSIS_LIMIT: f64 = 20.0;
const MIN_SAMPLES: u64 = 1000;
/// For two terms the integrand has finite variance only for `p < 1/2`.
const PAIR_P_LIMIT: f64 = 0.45;

#[derive(Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        let n1 = self.n;
        self.n += 1.0;
        let n = self.n;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let t1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += t1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += t1;
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        let d2 = d * d;
        let mean = a.mean + d * b.n / n;
        let m2 = a.m2 + b.m2 + d2 * a.n * b.n / n;
        let m3 = a.m3 + b.m3 + d * d2 * a.n * b.n * (a.n - b.n) / (n * n) + 3.0 * d * (a.n * b.m2 - b.n * a.m2) / n;
        let m4 = a.m4
            + b.m4
            + d2 * d2 * a.n * b.n * (a.n * a.n - a.n * b.n + b.n * b.n) / (n * n * n)
            + 6.0 * d2 * (a.n * a.n * b.m2 + b.n * b.n * a.m2) / (n * n)
            + 4.0 * d * (a.n * b.m3 - b.n * a.m3) / n;
        Moments { n, mean, m2, m3, m4 }
    }
}

/// Monte Carlo estimate of `E|sum a_j xi_j|^{-p}`.
///
/// Samples are split into [`BLOCKS`] blocks, each drawn from its own ChaCha8
/// stream, so the result depends only on `(a, p, samples, seed)`. The value
/// is the median of the block means and `half_width` is three standard
/// errors of that median.
pub fn mc_negative_moment(a: &CoefficientVector, p: f64, samples: u64, seed: u64) -> Result<MomentEstimate> {
    check_p(p)?;
    if samples < MIN_SAMPLES {
        return domain(format!("Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}"));
    }
    let w = a.as_slice();
    if w.len() == 1 {
        return Ok(MomentEstimate {
            value: w[0].powf(-p),
            half_width: 0.0,
            method: MomentMethod::ExactSingle,
            meta: samples,
            warning: None,
        });
    }
    if w.len() == 2 && p > PAIR_P_LIMIT {
        return domain(format!(
            "two-term Monte Carlo has infinite variance near p = 1/2; refusing p = {p} > {PAIR_P_LIMIT}"
        ));
    }
    let blocks: Vec<Moments> = (0..BLOCKS)
        .into_par_iter()
        .map(|b| {
            let count = samples / BLOCKS + u64::from(b < samples % BLOCKS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let mut m = Moments::default();
            for _ in 0..count {
                let (mut re, mut im) = (0.0f64, 0.0f64);
                for &aj in w {
                    let theta = std::f64::consts::TAU * rng.gen::<f64>();
                    let (s, c) = theta.sin_cos();
                    re += aj * c;
                    im += aj * s;
                }
                m.push((re * re + im * im).powf(-0.5 * p));
            }
            m
        })
        .collect();
    let mut means: Vec<f64> = blocks.iter().map(|m| m.mean).collect();
    means.sort_by(f64::total_cmp);
    let mid = means.len() / 2;
    let value = 0.5 * (means[mid - 1] + means[mid]);
    let total = blocks.into_iter().fold(Moments::default(), Moments::merge);
    let var = total.m2 / (total.n - 1.0);
    let se = (std::f64::consts::FRAC_PI_2 * var / total.n).sqrt();
    let kurtosis = total.n * total.m4 / (total.m2 * total.m2);
    let warning = (kurtosis > KURTOSIS_LIMIT).then_some(VarianceWarning { kurtosis });
    Ok(MomentEstimate { value, half_width: 3.0 * se, method: MomentMethod::MonteCarlo, meta: samples, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::c_p;

    #[test]
    fn single_term_is_exact() {
        let a = CoefficientVector::new(&[1.0]).unwrap();
        let e = mc_negative_moment(&a, 0.7, 1000, 1).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.method, MomentMethod::ExactSingle);
    }

    #[test]
    fn equal_pair_matches_c_p() {
        let a = CoefficientVector::equal(2).unwrap();
        let e = mc_negative_moment(&a, 0.3, 200_000, 7).unwrap();
        let want = c_p(0.3).unwrap();
        assert!((e.value - want).abs() <= e.half_width, "{e:?} vs {want}");
        assert!(e.half_width < 5e-3);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = CoefficientVector::unit(&[0.6, 0.8]).unwrap();
        let x = mc_negative_moment(&a, 0.3, 5000, 42).unwrap();
        let y = mc_negative_moment(&a, 0.3, 5000, 42).unwrap();
        let z = mc_negative_moment(&a, 0.3, 5000, 43).unwrap();
        assert_eq!(x, y);
        assert_ne!(x.value, z.value);
    }

    #[test]
    fn guards() {
        let a = CoefficientVector::equal(2).unwrap();
        assert!(mc_negative_moment(&a, 0.5, 10_000, 1).is_err());
        assert!(mc_negative_moment(&a, 0.3, 999, 1).is_err());
        assert!(mc_negative_moment(&a, 0.0, 10_000, 1).is_err());
        let b = CoefficientVector::equal(3).unwrap();
        assert!(mc_negative_moment(&b, 0.9, 10_000, 1).is_ok());
    }

    #[test]
    fn streaming_moments_merge() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 + 0.5 * i as f64).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let (mut l, mut r) = (Moments::default(), Moments::default());
        xs[..30].iter().for_each(|&x| l.push(x));
        xs[30..].iter().for_each(|&x| r.push(x));
        let m = Moments::merge(l, r);
        for (u, v) in [(m.mean, whole.mean), (m.m2, whole.m2), (m.m3, whole.m3), (m.m4, whole.m4)] {
            assert!((u - v).abs() <= 1e-9 * v.abs().max(1.0), "{u} vs {v}");
        }
    }
}
