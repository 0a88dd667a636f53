//! Certified rational enclosures of pi, square roots, arctangent and arccosine.
//!
//! Every routine reduces to alternating series whose truncation error is
//! bounded by the first omitted term, plus integer square roots that are
//! checked exactly. Endpoints are rounded outward onto a dyadic grid so that
//! numerator and denominator sizes stay proportional to the requested
//! precision.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, isqrt, pow2_neg, rat, RatInterval, Rational};

/// Number of times callers halve the width after an unresolved floor before
/// giving up.
pub const MAX_REFINEMENTS: u32 = 20;

/// Requested upper bound on the width `hi - lo` of an enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precision {
    max_width: Rational,
}

impl Precision {
    pub fn new(max_width: Rational) -> Result<Self> {
        if !max_width.is_positive() {
            return Err(Error::NonPositivePrecision(max_width));
        }
        Ok(Self { max_width })
    }

    /// Width `2^-bits`.
    pub fn from_bits(bits: u32) -> Self {
        Self {
            max_width: pow2_neg(bits),
        }
    }

    pub fn max_width(&self) -> &Rational {
        &self.max_width
    }

    pub fn halved(&self) -> Self {
        Self {
            max_width: &self.max_width / int(2),
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        debug_assert!(factor.is_positive());
        Self {
            max_width: &self.max_width * factor,
        }
    }

    /// Smallest `k >= 0` with `2^-k <= max_width`.
    pub fn bits(&self) -> u32 {
        let mut k = 0u32;
        let mut w = Rational::one();
        while w > self.max_width {
            w /= int(2);
            k += 1;
        }
        k
    }

    fn admits(&self, x: &RatInterval) -> bool {
        x.width() <= self.max_width
    }
}

impl Default for Precision {
    /// `2^-40`, the command-line default.
    fn default() -> Self {
        Self::from_bits(40)
    }
}

/// Runs `f` with increasing internal precision until the enclosure meets the
/// requested width.
fn refine(p: &Precision, mut f: impl FnMut(u32) -> RatInterval) -> RatInterval {
    let base = p.bits();
    let mut extra = 3;
    loop {
        let x = f(base + extra);
        if p.admits(&x) {
            return x;
        }
        extra += 4;
        assert!(extra < 4096, "enclosure failed to converge");
    }
}

/// Alternating arctan series for `|x| <= 1/2` in fixed point with `w`
/// fractional bits. The powers `p_n ~ x^(2n+1) 2^w` are truncated, so each
/// lies less than `n + 1` units below the truth and each term `p_n / (2n+1)`
/// less than 2 units below. The series is cut once a term is below
/// `2^-(bits+1)`; the tail then lies within one term of the partial sum.
fn arctan_series(x: &Rational, bits: u32) -> RatInterval {
    debug_assert!(x.abs() <= rat(1, 2));
    if x.is_zero() {
        return RatInterval::zero();
    }
    let w = bits + 24;
    let unit = BigInt::one() << w;
    let cutoff = BigInt::one() << (w - bits - 1);
    let ax = x.abs();
    let x2 = &ax * &ax;
    let (x2n, x2d) = (x2.numer().clone(), x2.denom().clone());
    let mut power = (ax.numer() * &unit) / ax.denom();
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    let bound = loop {
        let term = &power / BigInt::from(2 * n + 1);
        let upper = &term + 2u32;
        if upper <= cutoff {
            break upper;
        }
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power = power * &x2n / &x2d;
        n += 1;
    };
    // n terms summed, each under 2 units off, plus the tail bound
    let slack = bound + BigInt::from(2 * n);
    let lo = Rational::new(&sum - &slack, unit.clone());
    let hi = Rational::new(&sum + &slack, unit);
    let r = RatInterval::new(lo, hi).expect("ordered");
    if x.is_negative() {
        -&r
    } else {
        r
    }
}

/// Rounds `x` down (`up = false`) or up onto the grid `2^-bits`.
fn dyadic(x: &Rational, bits: u32, up: bool) -> Rational {
    let r = RatInterval::point(x.clone()).round_outward(bits);
    if up {
        r.hi().clone()
    } else {
        r.lo().clone()
    }
}

/// Enclosure of `arctan(x)` with width close to `2^-bits` for any rational.
fn arctan_point(x: &Rational, bits: u32) -> RatInterval {
    if x.is_negative() {
        return -&arctan_point(&-x, bits);
    }
    if x <= &rat(1, 2) {
        return arctan_series(x, bits + 1);
    }
    if x <= &int(2) {
        // arctan x = pi/4 + arctan((x - 1)/(x + 1)), |(x-1)/(x+1)| <= 1/3
        let reduced = (x - int(1)) / (x + int(1));
        let quarter_pi = pi_bits(bits + 3).scale(&rat(1, 4));
        return &quarter_pi + &arctan_series(&reduced, bits + 1);
    }
    // arctan x = pi/2 - arctan(1/x), 1/x < 1/2
    let half_pi = pi_bits(bits + 2).scale(&rat(1, 2));
    &half_pi - &arctan_series(&x.recip(), bits + 1)
}

/// Enclosure of `arctan` over an interval, using monotonicity.
fn arctan_interval(x: &RatInterval, bits: u32) -> RatInterval {
    let lo = dyadic(x.lo(), bits + 2, false);
    let hi = dyadic(x.hi(), bits + 2, true);
    let lo = arctan_point(&lo, bits + 2);
    let hi = arctan_point(&hi, bits + 2);
    RatInterval::new(lo.lo().clone(), hi.hi().clone())
        .expect("arctan is increasing")
        .round_outward(bits + 2)
}

const PI_CACHE_BITS: u32 = 320;

fn machin_pi(bits: u32) -> RatInterval {
    // pi = 16 arctan(1/5) - 4 arctan(1/239)
    let a = arctan_series(&rat(1, 5), bits + 6).scale(&int(16));
    let b = arctan_series(&rat(1, 239), bits + 4).scale(&int(4));
    (&a - &b).round_outward(bits + 2)
}

fn pi_bits(bits: u32) -> RatInterval {
    static CACHE: OnceLock<RatInterval> = OnceLock::new();
    if bits + 4 <= PI_CACHE_BITS {
        CACHE
            .get_or_init(|| machin_pi(PI_CACHE_BITS))
            .round_outward(bits + 2)
    } else {
        machin_pi(bits)
    }
}

/// Enclosure of pi with width at most `p.max_width`.
pub fn enclose_pi(p: &Precision) -> RatInterval {
    refine(p, pi_bits)
}

/// `Some(sqrt r)` when `r` is the square of a rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = isqrt(r.numer());
    let d = isqrt(r.denom());
    (&(&n * &n) == r.numer() && &(&d * &d) == r.denom()).then(|| Rational::new(n, d))
}

fn sqrt_bits(r: &Rational, bits: u32) -> RatInterval {
    if let Some(s) = exact_sqrt(r) {
        return RatInterval::point(s);
    }
    // s^2 <= floor(r 4^k) <= r 4^k < floor(r 4^k) + 1 <= (s+1)^2
    let scale = BigInt::one() << (2 * bits);
    let scaled = (r.numer() * scale) / r.denom();
    let s = isqrt(&scaled);
    let den = BigInt::one() << bits;
    RatInterval::new(
        Rational::new(s.clone(), den.clone()),
        Rational::new(s + 1u32, den),
    )
    .expect("ordered")
}

/// Enclosure of `sqrt(r)`; degenerate when `r` is a rational square.
pub fn enclose_sqrt(r: &Rational, p: &Precision) -> Result<RatInterval> {
    if r.is_negative() {
        return Err(Error::NegativeRadicand(r.clone()));
    }
    Ok(refine(p, |bits| sqrt_bits(r, bits)))
}

/// Enclosure of `arctan(x)` for any rational `x`.
pub fn enclose_arctan(x: &Rational, p: &Precision) -> RatInterval {
    refine(p, |bits| arctan_point(x, bits).round_outward(bits + 1))
}

fn arccos_bits(r: &Rational, bits: u32) -> RatInterval {
    let half = rat(1, 2);
    if r.is_zero() {
        return pi_bits(bits + 1).scale(&half);
    }
    if r.is_negative() && r < &-&half {
        // arccos r = pi - arccos(-r)
        return (&pi_bits(bits + 2) - &arccos_bits(&-r, bits + 2)).round_outward(bits + 1);
    }
    let s = sqrt_bits(&(int(1) - r * r), bits + 4);
    if r > &half {
        // arccos r = arctan(sqrt(1 - r^2) / r)
        arctan_interval(&s.scale(&r.recip()), bits + 1)
    } else {
        // arccos r = pi/2 - arctan(r / sqrt(1 - r^2)), |r| <= 1/2
        let t = RatInterval::point(r.clone())
            .checked_div(&s)
            .expect("1 - r^2 >= 3/4");
        let half_pi = pi_bits(bits + 3).scale(&half);
        (&half_pi - &arctan_interval(&t, bits + 2)).round_outward(bits + 1)
    }
}

/// Enclosure of `arccos(r)` for `-1 <= r <= 1`.
pub fn enclose_arccos(r: &Rational, p: &Precision) -> Result<RatInterval> {
    if r.abs() > int(1) {
        return Err(Error::ArccosDomain(r.clone()));
    }
    if r.is_one() {
        return Ok(RatInterval::zero());
    }
    if r == &int(-1) {
        return Ok(enclose_pi(p));
    }
    Ok(refine(p, |bits| arccos_bits(r, bits)))
}
