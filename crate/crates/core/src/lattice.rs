//! Shifted lattice-point counts under the profile `G_lambda` and exact
//! verifiers for the counting inequalities on convex profiles.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::enclosures::{Precision, MAX_REFINEMENTS};
use crate::error::{Error, Result};
use crate::gfun::{g_eval_certified, g_eval_float, g_integral};
use crate::rational::{ceil, floor, format_rational, from_f64_exact, int, rat, to_f64, FloorShift, Rational};

/// Fractional parts closer than this to an integer are re-evaluated with
/// certified enclosures.
pub const NEAR_INTEGER_GUARD: f64 = 1e-9;

/// Aharonov-Bohm flux normalised to `[0, 1/2]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flux(Rational);

impl Flux {
    pub fn new(alpha: Rational) -> Result<Self> {
        if alpha.is_negative() || alpha > rat(1, 2) {
            return Err(Error::FluxOutOfRange(alpha));
        }
        Ok(Self(alpha))
    }

    pub fn zero() -> Self {
        Self(Rational::zero())
    }

    pub fn half() -> Self {
        Self(rat(1, 2))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// `1 - alpha`, the shift of the second eigenvalue sequence.
    pub fn complement(&self) -> Rational {
        int(1) - &self.0
    }

    pub fn as_f64(&self) -> f64 {
        to_f64(&self.0)
    }
}

impl fmt::Display for Flux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// `floor(G_lambda(z) + shift)` from certified enclosures, halving the width
/// until the floor resolves or the refinement cap is hit.
pub fn certified_floor(
    lambda: &Rational,
    z: &Rational,
    shift: &Rational,
    p: &Precision,
) -> Result<FloorShift> {
    let mut p = p.clone();
    let mut last = None;
    for _ in 0..=MAX_REFINEMENTS {
        let g = g_eval_certified(lambda, z, &p)?;
        let f = g.floor_shift(shift);
        if f.resolved().is_some() {
            return Ok(f);
        }
        last = Some(f);
        p = p.halved();
    }
    Ok(last.expect("at least one attempt"))
}

/// Direction to take when a guarded floor stays unresolved.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Side {
    Upper,
    Lower,
}

/// `floor(G_lambda(z) + shift)` in floating point, falling back to certified
/// evaluation when the value sits within the guard of an integer.
pub(crate) fn guarded_floor(lambda: f64, z: &Rational, shift: &Rational, side: Side) -> i64 {
    let zf = to_f64(z);
    if zf >= lambda {
        return floor(shift).to_i64().expect("small shift");
    }
    let v = g_eval_float(lambda, zf) + to_f64(shift);
    let nearest = v.round();
    if (v - nearest).abs() > NEAR_INTEGER_GUARD {
        return v.floor() as i64;
    }
    let lambda_q = from_f64_exact(lambda).expect("finite lambda");
    match certified_floor(&lambda_q, z, shift, &Precision::default()) {
        Ok(FloorShift::Resolved(n)) => n.to_i64().expect("small count"),
        Ok(FloorShift::Unresolved { lower, upper }) => {
            log::warn!("unresolved floor at lambda={lambda}, z={z}");
            match side {
                Side::Upper => upper.to_i64().expect("small count"),
                Side::Lower => lower.to_i64().expect("small count"),
            }
        }
        Err(e) => panic!("certified floor failed: {e}"),
    }
}

/// Upper lattice count `P^D_alpha(lambda)`:
/// `sum_{m=0}^{ceil(lambda)-1} floor(G(m+alpha)+1/4) + floor(G(m+1-alpha)+1/4)`.
pub fn p_dirichlet(lambda: f64, alpha: &Flux) -> i64 {
    assert!(lambda > 0.0, "lambda must be positive");
    let quarter = rat(1, 4);
    let a = alpha.value();
    let b = alpha.complement();
    let terms = lambda.ceil() as i64;
    (0..terms)
        .map(|m| {
            guarded_floor(lambda, &(int(m) + a), &quarter, Side::Upper)
                + guarded_floor(lambda, &(int(m) + &b), &quarter, Side::Upper)
        })
        .sum()
}

/// Lower lattice count `P^N_alpha(lambda)`:
/// `sum_{m=0}^{floor(lambda-alpha)} floor(G(m+alpha)+3/4) + sum_{m=0}^{floor(lambda-1+alpha)} floor(G(m+1-alpha)+3/4)`.
/// Sums with a negative upper index are empty.
pub fn p_neumann(lambda: f64, alpha: &Flux) -> i64 {
    assert!(lambda > 0.0, "lambda must be positive");
    let three_q = rat(3, 4);
    let lambda_q = from_f64_exact(lambda).expect("finite lambda");
    let a = alpha.value();
    let b = alpha.complement();
    let first_top = floor(&(&lambda_q - a)).to_i64().expect("moderate lambda");
    let second_top = floor(&(&lambda_q - &b)).to_i64().expect("moderate lambda");
    let first: i64 = (0..=first_top)
        .map(|m| guarded_floor(lambda, &(int(m) + a), &three_q, Side::Lower))
        .sum();
    let second: i64 = (0..=second_top)
        .map(|m| guarded_floor(lambda, &(int(m) + &b), &three_q, Side::Lower))
        .sum();
    first + second
}

/// Certified value of `Q(lambda)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QCount {
    pub value: i64,
    /// `false` when some floor stayed unresolved after the refinement cap and
    /// its safe lower value was used; `value` is then only a lower bound.
    pub exact: bool,
}

/// `Q(lambda) = sum_{m=0}^{ceil(lambda)-1} floor(G(m+1/2)+3/4) + floor(G(m+1)+3/4)`,
/// evaluated with certified enclosures. `Q` takes no flux argument.
pub fn q_count(lambda: &Rational) -> Result<QCount> {
    q_count_with(lambda, &Precision::default())
}

pub fn q_count_with(lambda: &Rational, p: &Precision) -> Result<QCount> {
    if !lambda.is_positive() {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let three_q = rat(3, 4);
    let terms = ceil(lambda).to_i64().expect("moderate lambda");
    let mut value = BigInt::zero();
    let mut exact = true;
    for m in 0..terms {
        for z in [int(m) + rat(1, 2), int(m + 1)] {
            if &z >= lambda {
                continue;
            }
            let f = certified_floor(lambda, &z, &three_q, p)?;
            exact &= f.resolved().is_some();
            value += f.safe_lower();
        }
    }
    Ok(QCount {
        value: value.to_i64().expect("small count"),
        exact,
    })
}

/// Floating-point `Q(lambda)`, used as a cross-check of the certified value.
pub fn q_count_float(lambda: f64) -> i64 {
    let terms = lambda.ceil() as i64;
    (0..terms)
        .map(|m| {
            let a = (g_eval_float(lambda, m as f64 + 0.5) + 0.75).floor() as i64;
            let b = (g_eval_float(lambda, (m + 1) as f64) + 0.75).floor() as i64;
            a + b
        })
        .sum()
}

/// Continuous piecewise-linear function through rational breakpoints,
/// extended by its last value to the right of the last breakpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinear {
    xs: Vec<Rational>,
    ys: Vec<Rational>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::NotAdmissible("need at least two breakpoints".into()));
        }
        if !points[0].0.is_zero() {
            return Err(Error::NotAdmissible("first breakpoint must be at 0".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::NotAdmissible("breakpoints must increase".into()));
        }
        let (xs, ys) = points.into_iter().unzip();
        Ok(Self { xs, ys })
    }

    /// Linear `g(z) = g0 + slope z` on `[0, b]`.
    pub fn linear(g0: Rational, slope: Rational, b: Rational) -> Result<Self> {
        let end = &g0 + &slope * &b;
        Self::new(vec![(Rational::zero(), g0), (b, end)])
    }

    pub fn b(&self) -> &Rational {
        self.xs.last().expect("nonempty")
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.xs.iter().zip(&self.ys)
    }

    fn slopes(&self) -> Vec<Rational> {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (&y[1] - &y[0]) / (&x[1] - &x[0]))
            .collect()
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        assert!(!z.is_negative(), "evaluation left of the domain");
        if z >= self.b() {
            return self.ys.last().expect("nonempty").clone();
        }
        // first breakpoint strictly greater than z
        let k = self.xs.partition_point(|x| x <= z);
        let (x0, x1) = (&self.xs[k - 1], &self.xs[k]);
        let (y0, y1) = (&self.ys[k - 1], &self.ys[k]);
        y0 + (y1 - y0) * (z - x0) / (x1 - x0)
    }

    /// Exact `int_a^b g`, including the constant extension past the last
    /// breakpoint.
    pub fn integral(&self, a: &Rational, b: &Rational) -> Rational {
        if b <= a {
            return Rational::zero();
        }
        let mut cuts: Vec<Rational> = vec![a.clone()];
        cuts.extend(self.xs.iter().filter(|x| *x > a && *x < b).cloned());
        cuts.push(b.clone());
        cuts.windows(2)
            .map(|w| (&w[1] - &w[0]) * (self.eval(&w[0]) + self.eval(&w[1])) / int(2))
            .sum()
    }

    pub fn shifted_down(&self, n: &Rational) -> Self {
        Self {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|y| y - n).collect(),
        }
    }

    /// Decreasing, convex and `1/2`-Lipschitz.
    pub fn check_shape(&self) -> Result<()> {
        let slopes = self.slopes();
        let half = rat(1, 2);
        if let Some(s) = slopes.iter().find(|s| s.is_positive()) {
            return Err(Error::NotAdmissible(format!("increasing segment, slope {s}")));
        }
        if let Some(s) = slopes.iter().find(|s| **s < -&half) {
            return Err(Error::NotAdmissible(format!("slope {s} steeper than -1/2")));
        }
        if slopes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NotAdmissible("slopes must not decrease (convexity)".into()));
        }
        Ok(())
    }

    /// Shape conditions plus `g(b) = 0`, hence `g >= 0`.
    pub fn check_admissible(&self) -> Result<()> {
        self.check_shape()?;
        if !self.ys.last().expect("nonempty").is_zero() {
            return Err(Error::NotAdmissible("g(b) must be 0".into()));
        }
        Ok(())
    }

    /// Smallest `z` in `[a, b]` with `g(z) <= 0`, if any. For a decreasing `g`
    /// this is the first zero whenever `g(a) >= 0`.
    pub fn first_nonpositive(&self, a: &Rational, b: &Rational) -> Option<Rational> {
        if !self.eval(a).is_positive() {
            return Some(a.clone());
        }
        let mut cuts: Vec<Rational> = vec![a.clone()];
        cuts.extend(self.xs.iter().filter(|x| *x > a && *x < b).cloned());
        cuts.push(b.clone());
        for w in cuts.windows(2) {
            let (y0, y1) = (self.eval(&w[0]), self.eval(&w[1]));
            if !y1.is_positive() {
                // y0 > 0 >= y1 on a linear piece
                return Some(&w[0] + (&w[1] - &w[0]) * &y0 / (&y0 - &y1));
            }
        }
        None
    }
}

/// `z -> G_lambda(z + shift)` on `[0, b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GProfile {
    pub lambda: Rational,
    pub shift: Rational,
    pub b: Rational,
}

impl GProfile {
    /// Natural domain `b = lambda - shift`.
    pub fn new(lambda: Rational, shift: Rational) -> Result<Self> {
        let b = &lambda - &shift;
        Self::with_b(lambda, shift, b)
    }

    pub fn with_b(lambda: Rational, shift: Rational, b: Rational) -> Result<Self> {
        if !lambda.is_positive() || shift.is_negative() || !b.is_positive() {
            return Err(Error::NotAdmissible(format!(
                "G profile needs lambda > 0, shift >= 0, b > 0 (lambda={lambda}, shift={shift}, b={b})"
            )));
        }
        if &lambda - &shift > b {
            return Err(Error::NotAdmissible("profile must vanish at b".into()));
        }
        Ok(Self { lambda, shift, b })
    }

    fn lambda_f(&self) -> f64 {
        to_f64(&self.lambda)
    }

    fn floor_at(&self, z: &Rational, offset: &Rational, side: Side) -> i64 {
        let arg = z + &self.shift;
        let v = g_eval_float(self.lambda_f(), to_f64(&arg)) + to_f64(offset);
        if (v - v.round()).abs() > NEAR_INTEGER_GUARD {
            return v.floor() as i64;
        }
        let f = certified_floor(&self.lambda, &arg, offset, &Precision::default())
            .expect("valid G arguments");
        match (f, side) {
            (FloorShift::Resolved(n), _) => n.to_i64().expect("small"),
            (FloorShift::Unresolved { upper, .. }, Side::Upper) => upper.to_i64().expect("small"),
            (FloorShift::Unresolved { lower, .. }, Side::Lower) => lower.to_i64().expect("small"),
        }
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        let s = to_f64(&self.shift);
        g_integral(self.lambda_f(), a + s, b + s)
    }
}

/// Convex test profiles accepted by the counting verifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvexTestFn {
    PiecewiseLinear(PiecewiseLinear),
    G(GProfile),
}

impl From<PiecewiseLinear> for ConvexTestFn {
    fn from(g: PiecewiseLinear) -> Self {
        ConvexTestFn::PiecewiseLinear(g)
    }
}

impl From<GProfile> for ConvexTestFn {
    fn from(g: GProfile) -> Self {
        ConvexTestFn::G(g)
    }
}

/// Outcome of one counting inequality `lhs <= rhs` (or `>=`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountCheck {
    pub lhs: i64,
    /// Exact right-hand side for piecewise-linear profiles.
    pub rhs_exact: Option<String>,
    pub rhs: f64,
    pub holds: bool,
    /// Exact equality between the two sides (piecewise-linear only).
    pub equality: bool,
}

/// Tolerance for right-hand sides computed by quadrature.
const QUAD_SLACK: f64 = 1e-9;

/// Checks `sum_{m=0}^{b-1} floor(g(m+alpha)+1/4) + floor(g(m+1-alpha)+1/4) <= 2 int_0^b g`
/// for an admissible profile with integer `b`.
pub fn verify_thm_count(g: &ConvexTestFn, alpha: &Flux) -> Result<CountCheck> {
    let quarter = rat(1, 4);
    let a = alpha.value();
    let c = alpha.complement();
    match g {
        ConvexTestFn::PiecewiseLinear(g) => {
            g.check_admissible()?;
            if !g.b().is_integer() {
                return Err(Error::NotAdmissible(format!("b = {} must be an integer", g.b())));
            }
            let b = g.b().to_integer().to_i64().expect("moderate b");
            let lhs: i64 = (0..b)
                .map(|m| {
                    let x = floor(&(g.eval(&(int(m) + a)) + &quarter));
                    let y = floor(&(g.eval(&(int(m) + &c)) + &quarter));
                    (x + y).to_i64().expect("small")
                })
                .sum();
            let rhs = int(2) * g.integral(&Rational::zero(), g.b());
            Ok(CountCheck {
                lhs,
                holds: int(lhs) <= rhs,
                equality: int(lhs) == rhs,
                rhs: to_f64(&rhs),
                rhs_exact: Some(format_rational(&rhs)),
            })
        }
        ConvexTestFn::G(g) => {
            if !g.b.is_integer() {
                return Err(Error::NotAdmissible(format!("b = {} must be an integer", g.b)));
            }
            let b = g.b.to_integer().to_i64().expect("moderate b");
            let lhs: i64 = (0..b)
                .map(|m| {
                    g.floor_at(&(int(m) + a), &quarter, Side::Upper)
                        + g.floor_at(&(int(m) + &c), &quarter, Side::Upper)
                })
                .sum();
            let rhs = 2.0 * g.integral(0.0, b as f64);
            Ok(CountCheck {
                lhs,
                holds: lhs as f64 <= rhs + QUAD_SLACK,
                equality: false,
                rhs,
                rhs_exact: None,
            })
        }
    }
}

/// Which of the five configurations of the counting lemma applies, with the
/// lemma's inequality checked exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCase {
    pub case: u8,
    /// The `k` of cases 4 and 5.
    pub k: Option<i64>,
    pub lhs: i64,
    pub rhs: String,
    pub holds: bool,
}

/// Classifies the window `[i, j+1]` of a profile normalised so that
/// `1 >= g(i+1) >= g(j) >= 0 >= g(j+1)` and `g` first vanishes before `j+1`,
/// by locating where the sequence `g(i+alpha) >= g(i+1-alpha) >= g(i+1+alpha) >= ...`
/// first drops below `3/4`; then checks
/// `sum_{m=i}^{j-1} floor(g(m+alpha)+1/4) + floor(g(m+1-alpha)+1/4) <= 2 int_i^j g`.
pub fn classify_lemma_case(g: &PiecewiseLinear, i: i64, j: i64, alpha: &Flux) -> Result<LemmaCase> {
    let fail = |msg: String| Err(Error::HypothesesFail(msg));
    if i < 0 || i >= j {
        return fail(format!("need 0 <= i < j, got i={i}, j={j}"));
    }
    g.check_shape()?;
    let (gi1, gj, gj1) = (g.eval(&int(i + 1)), g.eval(&int(j)), g.eval(&int(j + 1)));
    if !(gi1 <= int(1) && gi1 >= gj && !gj.is_negative() && !gj1.is_positive()) {
        return fail(format!(
            "need 1 >= g(i+1) >= g(j) >= 0 >= g(j+1), got {gi1}, {gj}, {gj1}"
        ));
    }
    match g.first_nonpositive(&int(i), &int(j + 1)) {
        Some(z) if z < int(j + 1) => {}
        _ => return fail(format!("first zero of g on [{i}, {}] is j+1", j + 1)),
    }

    let a = alpha.value();
    let c = alpha.complement();
    let quarter = rat(1, 4);
    let three_q = rat(3, 4);
    let sequence: Vec<Rational> = (i..j)
        .flat_map(|m| [g.eval(&(int(m) + a)), g.eval(&(int(m) + &c))])
        .collect();
    let lhs: i64 = sequence
        .iter()
        .map(|v| floor(&(v + &quarter)).to_i64().expect("small"))
        .sum();
    let drop = sequence
        .iter()
        .position(|v| *v < three_q)
        .map(|t| t as i64);
    let (case, k) = match drop {
        Some(0) => (1, None),
        Some(1) => (2, None),
        Some(2) => (3, None),
        Some(t) if t % 2 == 1 => (4, Some((t - 1) / 2)),
        Some(t) => (5, Some(t / 2)),
        None => return fail("sequence never drops below 3/4".into()),
    };
    let predicted = drop.expect("matched");
    if lhs != predicted {
        return fail(format!("left side {lhs} differs from case count {predicted}"));
    }
    let rhs = int(2) * g.integral(&int(i), &int(j));
    Ok(LemmaCase {
        case,
        k,
        lhs,
        holds: int(lhs) <= rhs,
        rhs: format_rational(&rhs),
    })
}

/// Splits an admissible integer-domain profile into the windows
/// `[L_{n+1}, L_n]`, `L_k = max{m in 0..=b : g(m) >= k}`, and classifies
/// each window with `g - n`. The per-window sums add up to the full
/// counting inequality.
pub fn lemma_decomposition(g: &PiecewiseLinear, alpha: &Flux) -> Result<Vec<LemmaCase>> {
    g.check_admissible()?;
    if !g.b().is_integer() {
        return Err(Error::NotAdmissible(format!("b = {} must be an integer", g.b())));
    }
    let b = g.b().to_integer().to_i64().expect("moderate b");
    let n_top = floor(&g.eval(&Rational::zero())).to_i64().expect("small");
    let mut levels: Vec<i64> = vec![b];
    for k in 1..=n_top {
        let l = (0..=b).rev().find(|m| g.eval(&int(*m)) >= int(k)).expect("g(0) >= k");
        levels.push(l);
    }
    if *levels.last().expect("nonempty") > 0 {
        levels.push(0);
    }
    let mut cases = Vec::new();
    for n in (0..levels.len() - 1).rev() {
        let (i, j) = (levels[n + 1], levels[n]);
        cases.push(classify_lemma_case(&g.shifted_down(&int(n as i64)), i, j, alpha)?);
    }
    Ok(cases)
}

/// Outcome of the lower-bound lemma check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeumannCheck {
    pub m0: i64,
    pub lhs: i64,
    pub rhs_exact: Option<String>,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `sum_{m=0}^{floor b} floor(g(m)+3/4) >= int_0^{M0} g + M0/4` with
/// `M0 = 1 + max{m in 0..=floor b : g(m) >= 1/4}`.
pub fn verify_neumann_lemma(g: &ConvexTestFn) -> Result<NeumannCheck> {
    let quarter = rat(1, 4);
    let three_q = rat(3, 4);
    match g {
        ConvexTestFn::PiecewiseLinear(g) => {
            g.check_admissible()?;
            if g.eval(&Rational::zero()) < quarter {
                return Err(Error::NotAdmissible("g(0) must be at least 1/4".into()));
            }
            let top = floor(g.b()).to_i64().expect("moderate b");
            let m0 = 1 + (0..=top)
                .rev()
                .find(|m| g.eval(&int(*m)) >= quarter)
                .expect("g(0) >= 1/4");
            if int(m0) > *g.b() {
                return Err(Error::HypothesisM0 { m0, b: format_rational(g.b()) });
            }
            let lhs: i64 = (0..=top)
                .map(|m| floor(&(g.eval(&int(m)) + &three_q)).to_i64().expect("small"))
                .sum();
            let rhs = g.integral(&Rational::zero(), &int(m0)) + int(m0) * &quarter;
            Ok(NeumannCheck {
                m0,
                lhs,
                holds: int(lhs) >= rhs,
                rhs: to_f64(&rhs),
                rhs_exact: Some(format_rational(&rhs)),
            })
        }
        ConvexTestFn::G(g) => {
            let lambda = to_f64(&g.lambda);
            let shift = to_f64(&g.shift);
            if g_eval_float(lambda, shift) < 0.25 {
                return Err(Error::NotAdmissible("g(0) must be at least 1/4".into()));
            }
            let top = floor(&g.b).to_i64().expect("moderate b");
            let m0 = 1 + (0..=top)
                .rev()
                .find(|m| g.floor_at(&int(*m), &three_q, Side::Lower) >= 1)
                .expect("g(0) >= 1/4");
            if int(m0) > g.b {
                return Err(Error::HypothesisM0 { m0, b: format_rational(&g.b) });
            }
            let lhs: i64 = (0..=top).map(|m| g.floor_at(&int(m), &three_q, Side::Lower)).sum();
            let rhs = g.integral(0.0, m0 as f64) + m0 as f64 / 4.0;
            Ok(NeumannCheck {
                m0,
                lhs,
                holds: lhs as f64 >= rhs - QUAD_SLACK,
                rhs,
                rhs_exact: None,
            })
        }
    }
}

/// Random admissible profiles for property checks. Breakpoints sit on a
/// rational grid and slopes are sorted so that the result is convex,
/// decreasing, `1/2`-Lipschitz and vanishes at `b`.
pub mod sampling {
    use rand::Rng;

    use super::*;

    pub fn random_flux(rng: &mut impl Rng) -> Flux {
        let d: i64 = rng.gen_range(1..=12);
        let a: i64 = rng.gen_range(0..=d / 2);
        Flux::new(rat(a, d)).expect("a/d <= 1/2")
    }

    /// Profile on `[0, b]`.
    pub fn random_profile(rng: &mut impl Rng, b: &Rational) -> PiecewiseLinear {
        let grid: i64 = rng.gen_range(1..=4);
        let cells = (b * int(grid)).floor().to_integer().to_i64().expect("moderate b");
        let mut xs: Vec<Rational> = vec![Rational::zero()];
        let extra = rng.gen_range(0..=5usize);
        for _ in 0..extra {
            if cells > 1 {
                xs.push(rat(rng.gen_range(1..cells), grid));
            }
        }
        xs.push(b.clone());
        xs.sort();
        xs.dedup();
        xs.retain(|x| x <= b);

        let mut slopes: Vec<Rational> = (1..xs.len())
            .map(|_| {
                let d: i64 = rng.gen_range(1..=8);
                let a: i64 = rng.gen_range(0..=d);
                rat(-a, 2 * d)
            })
            .collect();
        slopes.sort();

        let mut ys = vec![Rational::zero(); xs.len()];
        for k in (0..xs.len() - 1).rev() {
            ys[k] = &ys[k + 1] - &slopes[k] * (&xs[k + 1] - &xs[k]);
        }
        PiecewiseLinear::new(xs.into_iter().zip(ys).collect()).expect("valid breakpoints")
    }

    /// Profile on an integer domain `[0, b]`, `1 <= b <= 10`.
    pub fn random_integer_profile(rng: &mut impl Rng) -> PiecewiseLinear {
        let b = int(rng.gen_range(1..=10));
        random_profile(rng, &b)
    }

    /// Profile meeting the hypotheses of the lower-bound lemma:
    /// `g(0) >= 1/4` and `M0 <= b`. The domain may end off the integers.
    pub fn random_neumann_profile(rng: &mut impl Rng) -> PiecewiseLinear {
        loop {
            let whole: i64 = rng.gen_range(1..=10);
            let b = if rng.gen_bool(0.5) {
                int(whole)
            } else {
                int(whole) + rat(rng.gen_range(1..=3), 4)
            };
            let g = random_profile(rng, &b);
            if g.eval(&Rational::zero()) < rat(1, 4) {
                continue;
            }
            let top = floor(&b).to_i64().expect("small");
            let last = (0..=top).rev().find(|m| g.eval(&int(*m)) >= rat(1, 4));
            if matches!(last, Some(m) if int(m + 1) <= b) {
                return g;
            }
        }
    }
}
