//! Negative moments of Steinhaus sums and the `F_p`, `Psi_p` integrals.
//!
//! Three independent evaluators of `E|a_1 xi_1 + ... + a_n xi_n|^{-p}`:
//! Monte Carlo ([`mc_negative_moment`]), the Bessel-product integral
//! ([`quad_negative_moment`]) and, for two terms, the hypergeometric series
//! ([`pair_series_moment`]).

pub mod certified;
pub mod gauss;
mod mc;
mod pair;
mod quad;
pub(crate) mod tail;

pub use certified::{f_p_integral, f_p_integral_batch, f_p_integral_with, psi_func, FpConfig};
pub use mc::{mc_negative_moment, BLOCKS, KURTOSIS_LIMIT};
pub use pair::{pair_series_enclosure, pair_series_estimate, pair_series_moment};
pub use quad::{quad_negative_moment, quad_negative_moment_with, QuadConfig};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Moduli `a_j = |z_j|` of a Steinhaus sum, all strictly positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    a: Vec<f64>,
    unit: bool,
}

impl CoefficientVector {
    /// Takes moduli of the entries and drops zeros.
    pub fn new(a: &[f64]) -> Result<Self> {
        if let Some(bad) = a.iter().find(|x| !x.is_finite()) {
            return domain(format!("coefficients must be finite, got {bad}"));
        }
        let a: Vec<f64> = a.iter().map(|x| x.abs()).filter(|&x| x > 0.0).collect();
        if a.is_empty() {
            return domain("coefficient vector has no nonzero entry");
        }
        Ok(CoefficientVector { a, unit: false })
    }

    /// Like [`CoefficientVector::new`], then rescaled to unit Euclidean norm.
    pub fn normalized(a: &[f64]) -> Result<Self> {
        let v = Self::new(a)?;
        let norm = v.norm();
        Ok(CoefficientVector { a: v.a.iter().map(|x| x / norm).collect(), unit: true })
    }

    /// Like [`CoefficientVector::new`], asserting `sum a_j^2 = 1` within `1e-12`.
    pub fn unit(a: &[f64]) -> Result<Self> {
        let v = Self::new(a)?;
        let sq: f64 = v.a.iter().map(|x| x * x).sum();
        if (sq - 1.0).abs() > 1e-12 {
            return domain(format!("expected a unit vector, sum of squares is {sq}"));
        }
        Ok(CoefficientVector { unit: true, ..v })
    }

    /// `n` equal entries `1/sqrt(n)`.
    pub fn equal(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("equal weights need n >= 1");
        }
        let w = 1.0 / (n as f64).sqrt();
        Ok(CoefficientVector { a: vec![w; n], unit: true })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Whether the unit-norm flag is set.
    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn norm(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.a.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.a.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.a.iter().copied().fold(0.0, f64::max)
    }

    /// Every entry multiplied by `lambda > 0`; clears the unit flag.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("scale must be positive, got {lambda}"));
        }
        Ok(CoefficientVector { a: self.a.iter().map(|x| x * lambda).collect(), unit: false })
    }
}

/// How a [`MomentEstimate`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    MonteCarlo,
    BesselQuadrature,
    PairSeries,
    ExactSingle,
}

/// Heavy-tail diagnostic attached to Monte Carlo estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceWarning {
    /// Sample kurtosis `m_4 / m_2^2` of the integrand.
    pub kurtosis: f64,
}

/// A moment value with an uncertainty whose meaning depends on `method`.
///
/// For Monte Carlo `half_width` is three standard errors; for quadrature it
/// is the estimated discretisation plus tail error; for the pair series it
/// is a rigorous bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub half_width: f64,
    pub method: MomentMethod,
    /// Sample count, panel count or number of series terms.
    pub meta: u64,
    pub warning: Option<VarianceWarning>,
}

impl MomentEstimate {
    /// Whether two estimates overlap once both half-widths are added.
    pub fn agrees_with(&self, other: &MomentEstimate) -> bool {
        (self.value - other.value).abs() <= self.half_width + other.half_width
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("negative moments need 0 < p < 1, got {p}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_vector_construction() {
        let v = CoefficientVector::new(&[0.0, -0.6, 0.8, 0.0]).unwrap();
        assert_eq!(v.as_slice(), &[0.6, 0.8]);
        assert!(!v.is_unit());
        assert!(CoefficientVector::unit(&[0.6, 0.8]).unwrap().is_unit());
        assert!(CoefficientVector::unit(&[0.6, 0.81]).is_err());
        assert!(CoefficientVector::new(&[0.0]).is_err());
        assert!(CoefficientVector::new(&[f64::NAN, 1.0]).is_err());
        let n = CoefficientVector::normalized(&[1.0, 1.0]).unwrap();
        assert!((n.as_slice()[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 4e-16);
        assert!((CoefficientVector::equal(16).unwrap().norm() - 1.0).abs() < 1e-15);
    }
}
