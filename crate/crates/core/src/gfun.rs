//! The zero-count profile `G_lambda(z) = (sqrt(lambda^2 - z^2) - z arccos(z/lambda)) / pi`
//! on `[0, lambda]`, zero beyond, together with the auxiliary functions used
//! by the large-lambda threshold argument.

use std::f64::consts::PI;

use num_traits::{Signed, Zero};

use crate::enclosures::{enclose_arccos, enclose_pi, enclose_sqrt, Precision};
use crate::error::{Error, Result};
use crate::rational::{int, rat, RatInterval, Rational};

/// Fast floating-point `G_lambda(z)`.
pub fn g_eval_float(lambda: f64, z: f64) -> f64 {
    if z >= lambda {
        return 0.0;
    }
    let z = z.max(0.0);
    let root = ((lambda - z) * (lambda + z)).sqrt();
    let v = (root - z * (z / lambda).acos()) / PI;
    v.max(0.0)
}

/// Certified enclosure of `G_lambda(z)` for rational arguments.
pub fn g_eval_certified(lambda: &Rational, z: &Rational, p: &Precision) -> Result<RatInterval> {
    if !lambda.is_positive() {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if z.is_negative() {
        return Err(Error::Domain(format!("z must be nonnegative, got {z}")));
    }
    if z >= lambda {
        return Ok(RatInterval::zero());
    }
    // Each ingredient gets a share of the budget; numerator magnitudes are
    // bounded by lambda.
    let inner = budget_for(p, lambda);
    let pi = enclose_pi(&inner);
    let root = enclose_sqrt(&(lambda * lambda - z * z), &inner)?;
    let numer = if z.is_zero() {
        root
    } else {
        let angle = enclose_arccos(&(z / lambda), &inner)?;
        &root - &angle.scale(z)
    };
    let g = numer.checked_div(&pi)?;
    // G >= 0 on [0, lambda]
    let lo = g.lo().clone().max(Rational::zero());
    let hi = g.hi().clone().max(Rational::zero());
    Ok(RatInterval::new(lo, hi)?.round_outward(p.bits() + 4))
}

/// Tightened precision for intermediate enclosures whose errors get
/// multiplied by factors up to `scale`.
fn budget_for(p: &Precision, scale: &Rational) -> Precision {
    let factor = int(8) * (scale.clone() + int(1));
    p.scaled(&factor.recip())
}

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Quadrature tolerance used by the integral checks.
pub const QUADRATURE_TOL: f64 = 1e-9;

/// `int_a^b G_lambda(z) dz`, with panels shrinking geometrically toward
/// `z = lambda` where the derivative of `G` has a square-root singularity.
pub fn g_integral(lambda: f64, a: f64, b: f64) -> f64 {
    let b = b.min(lambda);
    if b <= a {
        return 0.0;
    }
    let f = |z: f64| g_eval_float(lambda, z);
    let tol = QUADRATURE_TOL * 1e-3;
    let mut total = 0.0;
    let mut left = a;
    let mut gap = lambda - a;
    while left < b {
        gap *= 0.5;
        let right = if gap < 1e-12 * lambda.max(1.0) { b } else { (lambda - gap).min(b) };
        if right > left {
            total += adaptive_simpson(&f, left, right, tol);
            left = right;
        }
    }
    total
}

/// Quadrature of `int_0^lambda G_lambda`, which equals `lambda^2 / 8`.
pub fn g_integral_check(lambda: f64) -> f64 {
    g_integral(lambda, 0.0, lambda)
}

/// Unique `z` in `[0, lambda]` with `G_lambda(z) = 1/4`, by bisection.
pub fn g_inverse_quarter(lambda: f64) -> Result<f64> {
    g_inverse(lambda, 0.25)
}

/// Unique `z` in `[0, lambda]` with `G_lambda(z) = level`, by bisection to
/// `1e-12`.
pub fn g_inverse(lambda: f64, level: f64) -> Result<f64> {
    // G_lambda(0) = lambda / pi
    if !(lambda > 0.0) || lambda / PI < level - 1e-15 {
        return Err(Error::LevelAboveMax(lambda));
    }
    let (mut lo, mut hi) = (0.0f64, lambda);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g_eval_float(lambda, mid) >= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `M_0 = floor(G_lambda^{-1}(1/4) - shift) + 1` for the shifted profile
/// `z -> G_lambda(z + shift)`.
pub fn m0_shifted(lambda: f64, shift: f64) -> Result<i64> {
    Ok((g_inverse_quarter(lambda)? - shift).floor() as i64 + 1)
}

/// `chi(gamma) = arccos(gamma) - 3 sqrt(1 - gamma^2) / (gamma + 2)`.
pub fn chi(gamma: f64) -> f64 {
    gamma.acos() - 3.0 * (1.0 - gamma * gamma).max(0.0).sqrt() / (gamma + 2.0)
}

/// `rho(gamma) = int_{gamma lambda}^lambda G_lambda - (2/5) lambda (1 - gamma) G_lambda(gamma lambda)`.
pub fn rho(lambda: f64, gamma: f64) -> f64 {
    let beta = gamma * lambda;
    g_integral(lambda, beta, lambda) - 0.4 * lambda * (1.0 - gamma) * g_eval_float(lambda, beta)
}

/// Checks `int_beta^lambda G_lambda <= (2/5)(lambda - beta) G_lambda(beta)` up
/// to the quadrature tolerance.
pub fn g_tail_integral_check(lambda: f64, beta: f64) -> bool {
    assert!((0.0..=lambda).contains(&beta), "need 0 <= beta <= lambda");
    let lhs = g_integral(lambda, beta, lambda);
    let rhs = 0.4 * (lambda - beta) * g_eval_float(lambda, beta);
    lhs <= rhs + QUADRATURE_TOL
}

/// Floating `q1(c) = pi / (4 (sqrt(1 - c^2) - c arccos c))`.
pub fn q1_float(c: f64) -> f64 {
    PI / (4.0 * ((1.0 - c * c).sqrt() - c * c.acos()))
}

/// Floating `q2(c) = 5 / (2 (7c - 2 - 10/pi))`.
pub fn q2_float(c: f64) -> f64 {
    5.0 / (2.0 * (7.0 * c - 2.0 - 10.0 / PI))
}

/// Certified enclosure of `q1(c)` for `c` in `(0, 1)`.
pub fn q1(c: &Rational, p: &Precision) -> Result<RatInterval> {
    if !c.is_positive() || c >= &int(1) {
        return Err(Error::Domain(format!("q1 needs c in (0, 1), got {c}")));
    }
    let mut inner = p.scaled(&rat(1, 64));
    for _ in 0..crate::enclosures::MAX_REFINEMENTS {
        let pi = enclose_pi(&inner);
        let root = enclose_sqrt(&(int(1) - c * c), &inner)?;
        let angle = enclose_arccos(c, &inner)?;
        let denom = (&root - &angle.scale(c)).scale(&int(4));
        if denom.is_positive() {
            let q = pi.checked_div(&denom)?;
            if q.width() <= *p.max_width() {
                return Ok(q);
            }
        }
        inner = inner.scaled(&rat(1, 256));
    }
    Err(Error::RefinementCap(format!("q1({c})")))
}

/// `p pi / (a pi - b)` with rational `p`, `a`, `b`, normalised to coprime
/// integers with `p > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiRatio {
    pub numer_pi: Rational,
    pub denom_pi: Rational,
    pub denom_const: Rational,
}

impl PiRatio {
    pub fn new(numer_pi: Rational, denom_pi: Rational, denom_const: Rational) -> Self {
        use num_integer::Integer;
        let lcm = numer_pi
            .denom()
            .lcm(denom_pi.denom())
            .lcm(denom_const.denom());
        let scale = Rational::from_integer(lcm);
        let (mut p, mut a, mut b) = (
            (&numer_pi * &scale).to_integer(),
            (&denom_pi * &scale).to_integer(),
            (&denom_const * &scale).to_integer(),
        );
        let g = p.gcd(&a).gcd(&b);
        if !g.is_zero() {
            p /= &g;
            a /= &g;
            b /= &g;
        }
        if p.is_negative() {
            p = -p;
            a = -a;
            b = -b;
        }
        Self {
            numer_pi: Rational::from_integer(p),
            denom_pi: Rational::from_integer(a),
            denom_const: Rational::from_integer(b),
        }
    }

    pub fn enclose(&self, p: &Precision) -> Result<RatInterval> {
        let mut inner = p.scaled(&rat(1, 64));
        for _ in 0..crate::enclosures::MAX_REFINEMENTS {
            let pi = enclose_pi(&inner);
            let num = pi.scale(&self.numer_pi);
            let den = pi.scale(&self.denom_pi).add_scalar(&-&self.denom_const);
            if !den.contains_zero() {
                let q = num.checked_div(&den)?;
                if q.width() <= *p.max_width() {
                    return Ok(q);
                }
            }
            inner = inner.scaled(&rat(1, 256));
        }
        Err(Error::RefinementCap(format!("{self}")))
    }
}

impl std::fmt::Display for PiRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}pi/({}pi - {})", self.numer_pi, self.denom_pi, self.denom_const)
    }
}

/// `q2(c)` in closed form: `5 / (2 (7c - 2 - 10/pi)) = 5 pi / ((14c - 4) pi - 20)`.
pub fn q2_symbolic(c: &Rational) -> PiRatio {
    PiRatio::new(int(5), int(14) * c - int(4), int(20))
}

/// Smallest `c` where `q2` is finite and positive: `(2 pi + 10) / (7 pi)`.
pub fn q2_pole_float() -> f64 {
    (2.0 * PI + 10.0) / (7.0 * PI)
}

/// Certified enclosure of `q2(c)`; requires `7c - 2 - 10/pi > 0` provably.
pub fn q2(c: &Rational, p: &Precision) -> Result<RatInterval> {
    let sym = q2_symbolic(c);
    let q = sym.enclose(p)?;
    if !q.is_positive() {
        return Err(Error::Domain(format!(
            "q2 needs c > (2 pi + 10)/(7 pi), got {c}"
        )));
    }
    Ok(q)
}

/// Root of `q1(c) = q2(c)` bracketed by float bisection, returned as
/// `(c_star, q_star)`.
pub fn threshold_root() -> (f64, f64) {
    let f = |c: f64| q1_float(c) - q2_float(c);
    let (mut lo, mut hi) = (q2_pole_float() + 1e-9, 1.0 - 1e-9);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    (c, q1_float(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::to_f64;

    #[test]
    fn float_examples() {
        assert!((g_eval_float(4.0, 0.0) - 4.0 / PI).abs() < 1e-15);
        assert_eq!(g_eval_float(5.0, 5.0), 0.0);
        assert_eq!(g_eval_float(5.0, 7.0), 0.0);
        // mpmath: 0.38773783883256304109866...
        assert!((g_eval_float(5.0, 3.0) - 0.387_737_838_832_563_04).abs() < 1e-14);
    }

    #[test]
    fn certified_examples() {
        let p = Precision::default();
        let l = rat(5, 2);
        assert_eq!(g_eval_certified(&l, &l, &p).unwrap(), RatInterval::zero());

        // mpmath: G_{5/2}(1/2) = 0.56174390965816357...
        let g = g_eval_certified(&l, &rat(1, 2), &p).unwrap();
        let (lo, hi) = g.to_f64_bounds();
        assert!(lo <= 0.561_743_909_658_163_6 && 0.561_743_909_658_163_5 <= hi);
        assert_eq!(g.floor_shift(&rat(3, 4)).resolved().unwrap(), &1.into());

        // mpmath: G_{5/2}(2) = 0.0677992998774191040...
        let g = g_eval_certified(&l, &int(2), &p).unwrap();
        let (lo, hi) = g.to_f64_bounds();
        assert!(lo <= 0.067_799_299_877_419_2 && 0.067_799_299_877_419_0 <= hi);
        assert_eq!(g.floor_shift(&rat(3, 4)).resolved().unwrap(), &0.into());
        assert!(g.width() <= rat(1, 1 << 30));
    }

    #[test]
    fn certified_at_zero_is_lambda_over_pi() {
        let p = Precision::from_bits(50);
        let g = g_eval_certified(&int(4), &int(0), &p).unwrap();
        let (lo, hi) = g.to_f64_bounds();
        assert!(lo <= 4.0 / PI + 1e-15 && hi >= 4.0 / PI - 1e-15);
    }

    #[test]
    fn certified_domain_errors() {
        let p = Precision::default();
        assert!(g_eval_certified(&int(0), &int(0), &p).is_err());
        assert!(g_eval_certified(&int(1), &int(-1), &p).is_err());
    }

    #[test]
    fn integral_identity() {
        assert!((g_integral_check(1.0) - 0.125).abs() <= 1e-9);
        assert!((g_integral_check(4.0) - 2.0).abs() <= 1e-9);
        assert!(g_integral_check(1e-6).abs() <= 1e-12);
    }

    #[test]
    fn inverse_quarter() {
        assert!(g_inverse_quarter(0.5).is_err());
        let z = g_inverse_quarter(PI / 4.0).unwrap();
        assert!(z.abs() < 1e-9);
        let z = g_inverse_quarter(9.0).unwrap();
        assert!((g_eval_float(9.0, z) - 0.25).abs() <= 1e-10);
        // mpmath: 7.171205092857968077...
        assert!((z - 7.171_205_092_857_968).abs() < 1e-10);
    }

    #[test]
    fn inverse_quarter_at_q1_threshold() {
        let c = 0.783;
        let lambda = q1_float(c);
        let z = g_inverse_quarter(lambda).unwrap();
        assert!(z / lambda >= c - 1e-10);
    }

    #[test]
    fn tail_examples() {
        assert!(g_tail_integral_check(3.0, 3.0));
        // LHS 2, RHS 1.6 * 4 / pi ~ 2.037
        assert!(g_tail_integral_check(4.0, 0.0));
        for lambda in [1.0, 5.0, 10.0] {
            for i in 1..=9 {
                let beta = f64::from(i) / 10.0 * lambda;
                assert!(g_tail_integral_check(lambda, beta), "{lambda} {beta}");
            }
        }
    }

    #[test]
    fn chi_endpoints() {
        assert_eq!(chi(1.0), 0.0);
        assert!((chi(0.0) - (PI / 2.0 - 1.5)).abs() < 1e-15);
    }

    #[test]
    fn q_values() {
        let p = Precision::from_bits(40);
        let c = rat(783, 1000);
        let a = q1(&c, &p).unwrap();
        let b = q2(&c, &p).unwrap();
        // mpmath: q1 = 8.14926788378789962836..., q2 = 8.39204581568166325378...
        let (a_lo, a_hi) = a.to_f64_bounds();
        let (b_lo, b_hi) = b.to_f64_bounds();
        assert!(a_lo <= 8.149_267_883_787_9 && a_hi >= 8.149_267_883_787_8);
        assert!(b_lo <= 8.392_045_815_681_67 && b_hi >= 8.392_045_815_681_66);
        assert!(a.certainly_lt(&b));
        assert!(a.lo() > &int(3));
    }

    #[test]
    fn q2_closed_form() {
        let sym = q2_symbolic(&rat(783, 1000));
        assert_eq!(sym, PiRatio::new(int(2500), int(3481), int(10000)));
        assert_eq!(sym.numer_pi, int(2500));
        assert_eq!(sym.denom_pi, int(3481));
        assert_eq!(sym.denom_const, int(10000));
    }

    #[test]
    fn q1_blows_up_near_one() {
        let p = Precision::from_bits(20);
        let q = q1(&rat(9999, 10000), &p).unwrap();
        assert!(to_f64(q.lo()) > 1000.0);
        assert!(q1(&int(1), &p).is_err());
    }

    #[test]
    fn q2_rejects_pole_side() {
        assert!(q2(&rat(7, 10), &Precision::from_bits(20)).is_err());
    }

    #[test]
    fn threshold_root_matches_reported_values() {
        let (c, q) = threshold_root();
        assert!((0.7835..=0.7845).contains(&c));
        assert!((q - 8.2047).abs() <= 1e-3);
        // mpmath: c* = 0.78397158969235553..., q* = 8.20473058093236164...
        assert!((c - 0.783_971_589_692_355_5).abs() < 1e-9);
    }
}
