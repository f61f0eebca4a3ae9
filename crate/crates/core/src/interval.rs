//! Closed real intervals with outward rounding.
//!
//! Every operation returns an interval that contains the exact image of its
//! inputs. Directed rounding is emulated: after each floating-point operation
//! the endpoints are pushed outward by one ulp (two for library transcendental
//! functions, which are assumed accurate to within one ulp).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[inline]
fn dn(x: f64) -> f64 {
    x.next_down()
}

#[inline]
fn up(x: f64) -> f64 {
    x.next_up()
}

#[inline]
fn dn2(x: f64) -> f64 {
    x.next_down().next_down()
}

#[inline]
fn up2(x: f64) -> f64 {
    x.next_up().next_up()
}

/// A certified enclosure `[lo, hi]` of a real number.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnclosure")]
pub struct Enclosure {
    lo: f64,
    hi: f64,
}

#[derive(Deserialize)]
struct RawEnclosure {
    lo: f64,
    hi: f64,
}

impl TryFrom<RawEnclosure> for Enclosure {
    type Error = Error;
    fn try_from(r: RawEnclosure) -> Result<Self> {
        Enclosure::try_new(r.lo, r.hi)
    }
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Arithmetic operations exposed through [`enclose_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    PowReal,
    Exp,
    Log,
    Sqrt,
}

/// Applies `op` to `args`. Binary operations take two arguments; `PowReal`
/// takes a base and an exponent enclosure; the rest take one.
pub fn enclose_arith(op: ArithOp, args: &[Enclosure]) -> Result<Enclosure> {
    let arity = match op {
        ArithOp::Add | ArithOp::Sub | ArithOp::Mul | ArithOp::Div | ArithOp::PowReal => 2,
        _ => 1,
    };
    if args.len() != arity {
        return domain(format!("{op:?} expects {arity} arguments, got {}", args.len()));
    }
    match op {
        ArithOp::Add => Ok(args[0] + args[1]),
        ArithOp::Sub => Ok(args[0] - args[1]),
        ArithOp::Mul => Ok(args[0] * args[1]),
        ArithOp::Div => args[0].try_div(args[1]),
        ArithOp::PowReal => {
            let e = args[1];
            if e.is_point() {
                args[0].pow_f64(e.lo)
            } else {
                args[0].pow(e)
            }
        }
        ArithOp::Exp => Ok(args[0].exp()),
        ArithOp::Log => args[0].ln(),
        ArithOp::Sqrt => args[0].sqrt(),
    }
}

impl Enclosure {
    /// Panics unless `lo <= hi` (NaN endpoints are rejected).
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid enclosure [{lo}, {hi}]");
        Enclosure { lo, hi }
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Self> {
        if lo <= hi {
            Ok(Enclosure { lo, hi })
        } else {
            domain(format!("invalid enclosure [{lo}, {hi}]"))
        }
    }

    pub const fn point(x: f64) -> Self {
        Enclosure { lo: x, hi: x }
    }

    /// Smallest enclosure containing a correctly rounded constant.
    pub fn around(x: f64) -> Self {
        Enclosure { lo: dn(x), hi: up(x) }
    }

    /// `[-r, r]`.
    pub fn symmetric(r: f64) -> Self {
        let r = r.abs();
        Enclosure { lo: -r, hi: r }
    }

    pub fn pi() -> Self {
        Enclosure::around(std::f64::consts::PI)
    }

    pub fn ln2() -> Self {
        Enclosure::around(std::f64::consts::LN_2)
    }

    pub fn euler_gamma() -> Self {
        Enclosure::around(0.577_215_664_901_532_9)
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    /// Upper bound on the distance from [`Self::mid`] to either endpoint.
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        up((m - self.lo).max(self.hi - m))
    }

    pub fn width(&self) -> f64 {
        up(self.hi - self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(&self, other: &Enclosure) -> Option<Enclosure> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Enclosure { lo, hi })
    }

    /// Intersection, falling back to `self` when the two are disjoint.
    pub(crate) fn tighten(&self, other: &Enclosure) -> Enclosure {
        self.intersect(other).unwrap_or(*self)
    }

    pub fn abs(&self) -> Enclosure {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Enclosure { lo: 0.0, hi: self.mag() }
        }
    }

    pub fn sqr(&self) -> Enclosure {
        let a = self.mig();
        let b = self.mag();
        Enclosure { lo: dn(a * a).max(0.0), hi: up(b * b) }
    }

    pub fn try_recip(&self) -> Result<Enclosure> {
        if self.contains_zero() {
            return domain(format!("division by an enclosure containing zero: {self:?}"));
        }
        Ok(Enclosure { lo: dn(1.0 / self.hi), hi: up(1.0 / self.lo) })
    }

    pub fn try_div(&self, rhs: Enclosure) -> Result<Enclosure> {
        if rhs.contains_zero() {
            return domain(format!("division by an enclosure containing zero: {rhs:?}"));
        }
        let q = [self.lo / rhs.lo, self.lo / rhs.hi, self.hi / rhs.lo, self.hi / rhs.hi];
        Ok(round_out(q))
    }

    pub fn sqrt(&self) -> Result<Enclosure> {
        if self.lo < 0.0 {
            return domain(format!("sqrt of an enclosure with negative part: {self:?}"));
        }
        Ok(Enclosure { lo: dn(self.lo.sqrt()).max(0.0), hi: up(self.hi.sqrt()) })
    }

    pub fn exp(&self) -> Enclosure {
        Enclosure { lo: dn2(self.lo.exp()).max(0.0), hi: up2(self.hi.exp()) }
    }

    pub fn ln(&self) -> Result<Enclosure> {
        if self.lo <= 0.0 {
            return domain(format!("log of a non-positive enclosure: {self:?}"));
        }
        Ok(Enclosure { lo: dn2(self.lo.ln()), hi: up2(self.hi.ln()) })
    }

    /// Integer power.
    pub fn powi(&self, n: i32) -> Enclosure {
        if n == 0 {
            return Enclosure::point(1.0);
        }
        if n < 0 {
            let pos = self.powi(-n);
            return Enclosure::point(1.0)
                .try_div(pos)
                .unwrap_or(Enclosure { lo: f64::NEG_INFINITY, hi: f64::INFINITY });
        }
        if n % 2 == 0 {
            let base = Enclosure { lo: self.mig(), hi: self.mag() };
            pow_pos_int(base, n as u32)
        } else {
            let a = pow_point_int(self.lo, n as u32);
            let b = pow_point_int(self.hi, n as u32);
            Enclosure { lo: a.lo, hi: b.hi }
        }
    }

    /// Real power with an exact exponent. Integer exponents accept any base;
    /// otherwise the base must be positive (or non-negative when `e > 0`).
    pub fn pow_f64(&self, e: f64) -> Result<Enclosure> {
        if e.fract() == 0.0 && e.abs() < 1024.0 {
            return Ok(self.powi(e as i32));
        }
        if self.lo < 0.0 || (self.lo == 0.0 && e < 0.0) {
            return domain(format!("non-integer power {e} of {self:?}"));
        }
        let a = self.lo.powf(e);
        let b = self.hi.powf(e);
        Ok(if e >= 0.0 {
            Enclosure { lo: dn2(a).max(0.0), hi: up2(b) }
        } else {
            Enclosure { lo: dn2(b).max(0.0), hi: up2(a) }
        })
    }

    /// `self^e = exp(e ln self)` for a positive base.
    pub fn pow(&self, e: Enclosure) -> Result<Enclosure> {
        if e.is_point() {
            return self.pow_f64(e.lo);
        }
        Ok((e * self.ln()?).exp())
    }

    pub fn cos(&self) -> Enclosure {
        trig_range(*self, 0.0)
    }

    pub fn sin(&self) -> Enclosure {
        // sin x = cos(x - pi/2): the extremes of sin sit at pi/2 + k pi.
        trig_range(*self, std::f64::consts::FRAC_PI_2)
    }

    pub fn atan(&self) -> Enclosure {
        Enclosure { lo: dn2(self.lo.atan()), hi: up2(self.hi.atan()) }
    }

    pub fn acos(&self) -> Result<Enclosure> {
        if self.lo < -1.0 || self.hi > 1.0 {
            return domain(format!("acos outside [-1, 1]: {self:?}"));
        }
        Ok(Enclosure { lo: dn2(self.hi.acos()).max(0.0), hi: up2(self.lo.acos()) })
    }

    pub fn max_with(&self, other: &Enclosure) -> Enclosure {
        Enclosure { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn min_with(&self, other: &Enclosure) -> Enclosure {
        Enclosure { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }

    /// Widen symmetrically by `r >= 0`.
    pub fn inflate(&self, r: f64) -> Enclosure {
        Enclosure { lo: dn(self.lo - r), hi: up(self.hi + r) }
    }
}

fn round_out(v: [f64; 4]) -> Enclosure {
    let mut lo = v[0];
    let mut hi = v[0];
    let mut nan = v[0].is_nan();
    for &x in &v[1..] {
        nan |= x.is_nan();
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if nan {
        return Enclosure { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    }
    Enclosure { lo: dn(lo), hi: up(hi) }
}

fn pow_pos_int(base: Enclosure, n: u32) -> Enclosure {
    let mut result = Enclosure::point(1.0);
    let mut b = base;
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result *= b;
        }
        k >>= 1;
        if k > 0 {
            b = b * b;
        }
    }
    Enclosure { lo: result.lo.max(0.0), hi: result.hi }
}

fn pow_point_int(x: f64, n: u32) -> Enclosure {
    let r = pow_pos_int(Enclosure::point(x.abs()), n);
    if x < 0.0 {
        -r
    } else {
        r
    }
}

/// Range of `cos(x - shift)` over `x`. Extremes lie at `shift + k pi`.
fn trig_range(x: Enclosure, shift: f64) -> Enclosure {
    let full = Enclosure { lo: -1.0, hi: 1.0 };
    if !(x.lo.is_finite() && x.hi.is_finite()) || x.hi - x.lo >= 6.0 {
        return full;
    }
    let f = |t: f64| if shift == 0.0 { t.cos() } else { t.sin() };
    let a = f(x.lo);
    let b = f(x.hi);
    let mut lo = dn2(a.min(b));
    let mut hi = up2(a.max(b));
    // Conservative search for interior extremes.
    let slop = 8.0 * f64::EPSILON * x.lo.abs().max(x.hi.abs()).max(1.0);
    let pi = std::f64::consts::PI;
    let k_lo = ((x.lo - slop - shift) / pi).ceil() as i64 - 1;
    let k_hi = ((x.hi + slop - shift) / pi).floor() as i64 + 1;
    for k in k_lo..=k_hi {
        let c = shift + k as f64 * pi;
        if c >= x.lo - slop && c <= x.hi + slop {
            if k.rem_euclid(2) == 0 {
                hi = 1.0;
            } else {
                lo = -1.0;
            }
        }
    }
    Enclosure { lo: lo.max(-1.0), hi: hi.min(1.0) }
}

impl Add for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn add(self, rhs: Enclosure) -> Enclosure {
        Enclosure { lo: dn(self.lo + rhs.lo), hi: up(self.hi + rhs.hi) }
    }
}

impl Add<f64> for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn add(self, rhs: f64) -> Enclosure {
        self + Enclosure::point(rhs)
    }
}

impl Add<Enclosure> for f64 {
    type Output = Enclosure;
    #[inline]
    fn add(self, rhs: Enclosure) -> Enclosure {
        Enclosure::point(self) + rhs
    }
}

impl Sub for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn sub(self, rhs: Enclosure) -> Enclosure {
        Enclosure { lo: dn(self.lo - rhs.hi), hi: up(self.hi - rhs.lo) }
    }
}

impl Sub<f64> for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn sub(self, rhs: f64) -> Enclosure {
        self - Enclosure::point(rhs)
    }
}

impl Sub<Enclosure> for f64 {
    type Output = Enclosure;
    #[inline]
    fn sub(self, rhs: Enclosure) -> Enclosure {
        Enclosure::point(self) - rhs
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn mul(self, rhs: Enclosure) -> Enclosure {
        if self.lo >= 0.0 && rhs.lo >= 0.0 {
            return Enclosure { lo: dn(self.lo * rhs.lo).max(0.0), hi: up(self.hi * rhs.hi) };
        }
        round_out([self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi])
    }
}

impl Mul<f64> for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn mul(self, rhs: f64) -> Enclosure {
        let a = self.lo * rhs;
        let b = self.hi * rhs;
        if a.is_nan() || b.is_nan() {
            return Enclosure { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
        }
        if rhs == 0.0 {
            return Enclosure::point(0.0);
        }
        Enclosure { lo: dn(a.min(b)), hi: up(a.max(b)) }
    }
}

impl Mul<Enclosure> for f64 {
    type Output = Enclosure;
    #[inline]
    fn mul(self, rhs: Enclosure) -> Enclosure {
        rhs * self
    }
}

impl Div for Enclosure {
    type Output = Enclosure;
    /// Panics if the divisor contains zero; use [`Enclosure::try_div`] for a
    /// fallible version.
    fn div(self, rhs: Enclosure) -> Enclosure {
        self.try_div(rhs).expect("divisor enclosure contains zero")
    }
}

impl Div<f64> for Enclosure {
    type Output = Enclosure;
    fn div(self, rhs: f64) -> Enclosure {
        self / Enclosure::point(rhs)
    }
}

impl Neg for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn neg(self) -> Enclosure {
        Enclosure { lo: -self.hi, hi: -self.lo }
    }
}

impl AddAssign for Enclosure {
    fn add_assign(&mut self, rhs: Enclosure) {
        *self = *self + rhs;
    }
}

impl SubAssign for Enclosure {
    fn sub_assign(&mut self, rhs: Enclosure) {
        *self = *self - rhs;
    }
}

impl MulAssign for Enclosure {
    fn mul_assign(&mut self, rhs: Enclosure) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for Enclosure {
    fn sum<I: Iterator<Item = Enclosure>>(iter: I) -> Enclosure {
        iter.fold(Enclosure::point(0.0), |a, b| a + b)
    }
}

impl From<f64> for Enclosure {
    fn from(x: f64) -> Self {
        Enclosure::point(x)
    }
}
