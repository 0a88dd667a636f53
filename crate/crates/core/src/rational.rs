//! Exact rationals and rational intervals.
//!
//! Every certified statement in the crate bottoms out in comparisons between
//! values of this module. Nothing here touches floating point except the
//! explicit, exact conversions `from_f64_exact` and the lossy `to_f64` used for
//! reporting.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision fraction, always kept in canonical form
/// (positive denominator, coprime parts).
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-bits` as an exact rational.
pub fn pow2_neg(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits)
}

pub fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil(x: &Rational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Exact value of a finite double.
pub fn from_f64_exact(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn to_f64(x: &Rational) -> f64 {
    // `Ratio::to_f64` handles numerators and denominators far beyond f64 range.
    x.to_f64().unwrap_or(f64::NAN)
}

/// Canonical text form: `p/q`, or `p` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p/q`, a plain integer, a finite decimal such as `2.5`, or a power
/// of two written `2^-40`. All forms are converted exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some(exp) = s.strip_prefix("2^") {
        let e: i32 = exp.parse().map_err(|_| bad())?;
        if e.unsigned_abs() > 4096 {
            return Err(bad());
        }
        let p = BigInt::one() << e.unsigned_abs();
        return Ok(if e < 0 {
            Rational::new(BigInt::one(), p)
        } else {
            Rational::from_integer(p)
        });
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let w: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().map_err(|_| bad())?
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rational::new(w * &scale + f, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Serde adapter writing rationals in the `p/q` text form.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Result of flooring a shifted enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FloorShift {
    /// `floor(x + shift)` is the same integer for every member of the interval.
    Resolved(BigInt),
    /// The interval straddles an integer; `lower` is the floor at `lo` and is
    /// always a safe lower value.
    Unresolved { lower: BigInt, upper: BigInt },
}

impl FloorShift {
    pub fn resolved(&self) -> Option<&BigInt> {
        match self {
            FloorShift::Resolved(n) => Some(n),
            FloorShift::Unresolved { .. } => None,
        }
    }

    pub fn safe_lower(&self) -> &BigInt {
        match self {
            FloorShift::Resolved(n) => n,
            FloorShift::Unresolved { lower, .. } => lower,
        }
    }
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatInterval {
    lo: Rational,
    hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvertedInterval {
                lo: format_rational(&lo),
                hi: format_rational(&hi),
            });
        }
        Ok(Self { lo, hi })
    }

    /// Builds an interval from two endpoints in either order.
    pub fn hull_of(a: Rational, b: Rational) -> Self {
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn point(x: Rational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Every member is `> 0`.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Every member is `< 0`.
    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Every member of `self` is strictly below every member of `other`.
    pub fn certainly_lt(&self, other: &RatInterval) -> bool {
        self.hi < other.lo
    }

    pub fn hull(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn scale(&self, k: &Rational) -> RatInterval {
        RatInterval::hull_of(&self.lo * k, &self.hi * k)
    }

    pub fn add_scalar(&self, k: &Rational) -> RatInterval {
        RatInterval {
            lo: &self.lo + k,
            hi: &self.hi + k,
        }
    }

    pub fn recip(&self) -> Result<RatInterval> {
        if self.contains_zero() {
            return Err(Error::IntervalContainsZero(self.to_string()));
        }
        Ok(RatInterval::hull_of(self.lo.recip(), self.hi.recip()))
    }

    pub fn checked_div(&self, rhs: &RatInterval) -> Result<RatInterval> {
        Ok(self * &rhs.recip()?)
    }

    /// Square of every member; tighter than `self * self` when the interval
    /// straddles zero.
    pub fn square(&self) -> RatInterval {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.contains_zero() {
            RatInterval {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        } else {
            RatInterval::hull_of(a, b)
        }
    }

    /// Widens the endpoints outward onto the dyadic grid `2^-bits`, which
    /// bounds the size of numerators and denominators in long computations.
    pub fn round_outward(&self, bits: u32) -> RatInterval {
        let scale = Rational::from_integer(BigInt::one() << bits);
        let lo = Rational::new(floor(&(&self.lo * &scale)), BigInt::one() << bits);
        let hi = Rational::new(ceil(&(&self.hi * &scale)), BigInt::one() << bits);
        RatInterval { lo, hi }
    }

    /// `floor(x + shift)` if it is constant over the interval.
    pub fn floor_shift(&self, shift: &Rational) -> FloorShift {
        let lower = floor(&(&self.lo + shift));
        let upper = floor(&(&self.hi + shift));
        if lower == upper {
            FloorShift::Resolved(lower)
        } else {
            FloorShift::Unresolved { lower, upper }
        }
    }

    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }
}

/// Free-function form of [`RatInterval::floor_shift`].
pub fn rat_floor_shift(x: &RatInterval, shift: &Rational) -> FloorShift {
    x.floor_shift(shift)
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

impl Add for &RatInterval {
    type Output = RatInterval;

    fn add(self, rhs: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;

    fn sub(self, rhs: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;

    fn mul(self, rhs: &RatInterval) -> RatInterval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        RatInterval { lo, hi }
    }
}

impl Neg for &RatInterval {
    type Output = RatInterval;

    fn neg(self) -> RatInterval {
        RatInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatInterval {
            type Output = RatInterval;
            fn $m(self, rhs: RatInterval) -> RatInterval {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        -&self
    }
}

/// Exact integer square root bracket: `s` with `s^2 <= n < (s+1)^2`.
pub fn isqrt(n: &BigInt) -> BigInt {
    debug_assert!(n.sign() != Sign::Minus);
    let s = n.sqrt();
    debug_assert!(&(&s * &s) <= n && n < &((&s + 1u32) * (&s + 1u32)));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_shift_examples() {
        let x = RatInterval::new(rat(1, 3), rat(2, 5)).unwrap();
        assert_eq!(x.floor_shift(&rat(3, 4)), FloorShift::Resolved(BigInt::from(1)));

        let x = RatInterval::point(rat(1, 4));
        assert_eq!(rat_floor_shift(&x, &rat(3, 4)), FloorShift::Resolved(BigInt::from(1)));

        let x = RatInterval::new(rat(6, 25), rat(13, 50)).unwrap();
        let r = x.floor_shift(&rat(3, 4));
        assert!(r.resolved().is_none());
        assert_eq!(*r.safe_lower(), BigInt::from(0));
    }

    #[test]
    fn interval_examples() {
        let a = RatInterval::new(int(1), int(2)).unwrap();
        let b = RatInterval::new(int(3), int(4)).unwrap();
        assert_eq!(&a + &b, RatInterval::new(int(4), int(6)).unwrap());

        let u = RatInterval::new(int(-1), int(1)).unwrap();
        assert_eq!(&u * &u, u);

        let err = a.checked_div(&u).unwrap_err();
        assert!(err.to_string().starts_with("interval-contains-zero"));
    }

    #[test]
    fn inverted_interval_rejected() {
        assert!(RatInterval::new(int(2), int(1)).is_err());
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(floor(&rat(-7, 2)), BigInt::from(-4));
        assert_eq!(ceil(&rat(-7, 2)), BigInt::from(-3));
        assert_eq!(floor(&rat(7, 2)), BigInt::from(3));
        assert_eq!(ceil(&rat(7, 2)), BigInt::from(4));
        assert_eq!(ceil(&int(5)), BigInt::from(5));
    }

    #[test]
    fn text_format() {
        assert_eq!(format_rational(&rat(10, 4)), "5/2");
        assert_eq!(format_rational(&rat(-8, 2)), "-4");
        assert_eq!(parse_rational("374/39").unwrap(), rat(374, 39));
        assert_eq!(parse_rational("2.5").unwrap(), rat(5, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("2^-3").unwrap(), rat(1, 8));
        assert_eq!(parse_rational(" 9 ").unwrap(), int(9));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn round_outward_contains_original() {
        let x = RatInterval::new(rat(1, 3), rat(2, 3)).unwrap();
        let r = x.round_outward(10);
        assert!(r.lo() <= x.lo() && r.hi() >= x.hi());
        assert!(r.width() <= x.width() + rat(2, 1024));
    }

    #[test]
    fn square_straddling_zero() {
        let x = RatInterval::new(int(-2), int(1)).unwrap();
        assert_eq!(x.square(), RatInterval::new(int(0), int(4)).unwrap());
    }
}
