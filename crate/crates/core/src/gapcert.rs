//! Certified stepping chain for `Q(lambda) > lambda^2/4` on a bounded range,
//! replay of the published table, and the two endpoint certificates.
//!
//! A step at rational `lambda` records `e = Q(lambda) - lambda^2/4 > 0` and a
//! rational `d` with `(lambda + d)^2 <= lambda^2 + 4e`. Since `Q` is
//! nondecreasing in `lambda`, every `mu` in `[lambda, lambda + d)` satisfies
//! `mu^2/4 < (lambda + d)^2/4 <= Q(lambda) <= Q(mu)`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::enclosures::{enclose_pi, enclose_sqrt, Precision};
use crate::error::{Error, Result};
use crate::gfun::{q1, q2, q2_symbolic, PiRatio};
use crate::lattice::{q_count_float, q_count_with};
use crate::rational::{
    floor, format_rational, int, isqrt, parse_rational, rat, serde_rational, to_f64, RatInterval,
    Rational,
};

/// Denominator exponent of the step lengths found by the free-running chain.
pub const STEP_BITS: u32 = 40;

/// Hard cap on chain length in free-running mode.
const MAX_STEPS: usize = 1000;

/// One certified row of the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapStep {
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    pub q_low: i64,
    #[serde(with = "serde_rational")]
    pub e_low: Rational,
    #[serde(with = "serde_rational")]
    pub d_low: Rational,
}

impl GapStep {
    /// The three exact conditions that make this row sound, given `q_low`.
    pub fn check(&self) -> std::result::Result<(), String> {
        let quarter_sq = &self.lambda * &self.lambda / int(4);
        if self.e_low != int(self.q_low) - &quarter_sq {
            return Err(format!("e = {} is not Q - lambda^2/4", self.e_low));
        }
        if !self.e_low.is_positive() {
            return Err(format!("e = {} is not positive", self.e_low));
        }
        if !self.d_low.is_positive() {
            return Err(format!("d = {} is not positive", self.d_low));
        }
        let reach = &self.lambda + &self.d_low;
        if &reach * &reach > &self.lambda * &self.lambda + int(4) * &self.e_low {
            return Err(format!("(lambda + d)^2 exceeds lambda^2 + 4e at d = {}", self.d_low));
        }
        Ok(())
    }
}

/// Certified chain. `steps[n]` covers `[lambda_n, lambda_n + d_n)`, each
/// start lies within the reach of the previous step, and `end > target` is
/// the first unprocessed point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapChain {
    #[serde(with = "serde_rational")]
    pub from: Rational,
    #[serde(with = "serde_rational")]
    pub target: Rational,
    pub steps: Vec<GapStep>,
    #[serde(with = "serde_rational")]
    pub end: Rational,
}

/// `Q(lambda)` and `e = Q - lambda^2/4`, failing when `e <= 0`.
fn margin(lambda: &Rational, p: &Precision) -> Result<(i64, Rational)> {
    if !lambda.is_positive() {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let q = q_count_with(lambda, p)?;
    if !q.exact {
        log::warn!("Q({lambda}) unresolved after refinement; using the safe lower value");
    }
    let e = int(q.value) - lambda * lambda / int(4);
    if !e.is_positive() {
        return Err(Error::NoPositiveMargin { lambda: lambda.clone(), q: q.value, e });
    }
    Ok((q.value, e))
}

/// Largest `d = a / 2^bits` with `(lambda + d)^2 <= lambda^2 + 4e`.
pub fn max_dyadic_step(lambda: &Rational, e: &Rational, bits: u32) -> Rational {
    let radicand = lambda * lambda + int(4) * e;
    let scale = BigInt::from(1u8) << bits;
    let scale_q = Rational::from_integer(scale.clone());
    // s / 2^bits <= sqrt(radicand) < (s + 1) / 2^bits
    let s = isqrt(&floor(&(&radicand * &scale_q * &scale_q)));
    let fits = |a: &BigInt| {
        let reach = lambda + Rational::new(a.clone(), scale.clone());
        &reach * &reach <= radicand
    };
    let mut a = s - crate::rational::ceil(&(lambda * &scale_q));
    while !fits(&a) {
        a -= 1;
    }
    while fits(&(&a + 1)) {
        a += 1;
    }
    Rational::new(a, scale)
}

/// Certifies one step at `lambda` with a dyadic step length.
pub fn certify_step(lambda: &Rational, p: &Precision) -> Result<GapStep> {
    let (q_low, e_low) = margin(lambda, p)?;
    let d_low = max_dyadic_step(lambda, &e_low, STEP_BITS);
    if !d_low.is_positive() {
        return Err(Error::NoPositiveMargin { lambda: lambda.clone(), q: q_low, e: e_low });
    }
    Ok(GapStep { lambda: lambda.clone(), q_low, e_low, d_low })
}

/// The rational with the smallest denominator in `(lo, hi]`, taking the
/// smallest numerator among those.
pub fn simplest_in(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi, "empty interval");
    let mut q = BigInt::from(1u8);
    loop {
        let qq = Rational::from_integer(q.clone());
        let p = floor(&(lo * &qq)) + 1;
        let cand = Rational::new(p, q.clone());
        if &cand <= hi {
            return cand;
        }
        q += 1;
    }
}

/// Free-running chain from `from` until a start exceeds `to`. The next start
/// is the simplest rational in `(lambda + d/2, lambda + d]`.
pub fn run_chain(from: &Rational, to: &Rational, p: &Precision) -> Result<GapChain> {
    if !from.is_positive() || from >= to {
        return Err(Error::Domain(format!("need 0 < from < to, got from={from}, to={to}")));
    }
    let mut steps = Vec::new();
    let mut lambda = from.clone();
    while &lambda <= to {
        if steps.len() == MAX_STEPS {
            return Err(Error::RefinementCap(format!("chain exceeded {MAX_STEPS} steps")));
        }
        let step = certify_step(&lambda, p)?;
        let reach = &lambda + &step.d_low;
        let next = simplest_in(&(&lambda + &step.d_low / int(2)), &reach);
        log::info!("lambda={lambda} Q={} e={} next={next}", step.q_low, step.e_low);
        steps.push(step);
        lambda = next;
    }
    Ok(GapChain { from: from.clone(), target: to.clone(), steps, end: lambda })
}

/// Chain through prescribed starts: every start but the last is certified
/// with step length equal to the distance to the next start; the last start
/// must exceed `to`.
pub fn replay_chain(starts: &[Rational], to: &Rational, p: &Precision) -> Result<GapChain> {
    let (last, body) = starts
        .split_last()
        .ok_or_else(|| Error::Domain("empty start list".into()))?;
    if body.is_empty() || last <= to {
        return Err(Error::Domain(format!("last start {last} must exceed {to}")));
    }
    let mut steps = Vec::new();
    for (lambda, next) in body.iter().zip(&starts[1..]) {
        let (q_low, e_low) = margin(lambda, p)?;
        let step = GapStep { lambda: lambda.clone(), q_low, e_low, d_low: next - lambda };
        step.check().map_err(|msg| Error::HypothesesFail(format!("at {lambda}: {msg}")))?;
        steps.push(step);
    }
    Ok(GapChain { from: starts[0].clone(), target: to.clone(), steps, end: last.clone() })
}

/// Independent re-check of a chain: fresh `Q` values at a finer precision,
/// the per-step inequalities, chaining and coverage of `[from, target]`.
pub fn recheck_chain(chain: &GapChain) -> std::result::Result<(), String> {
    let fine = Precision::from_bits(64);
    let first = chain.steps.first().ok_or("chain has no steps")?;
    if first.lambda > chain.from {
        return Err(format!("first start {} is past {}", first.lambda, chain.from));
    }
    for (n, step) in chain.steps.iter().enumerate() {
        let q = q_count_with(&step.lambda, &fine).map_err(|e| e.to_string())?;
        if q.value != step.q_low {
            return Err(format!("step {}: recomputed Q = {} differs from {}", n + 1, q.value, step.q_low));
        }
        step.check().map_err(|msg| format!("step {}: {msg}", n + 1))?;
        let next = chain.steps.get(n + 1).map_or(&chain.end, |s| &s.lambda);
        if next <= &step.lambda || next > &(&step.lambda + &step.d_low) {
            return Err(format!("step {}: next start {next} is outside (lambda, lambda + d]", n + 1));
        }
    }
    if chain.end <= chain.target {
        return Err(format!("end {} does not pass {}", chain.end, chain.target));
    }
    Ok(())
}

/// Floating-point cross-check: the float `Q` agrees with every certified one.
pub fn float_cross_check(chain: &GapChain) -> bool {
    chain
        .steps
        .iter()
        .all(|s| q_count_float(to_f64(&s.lambda)) == s.q_low)
}

/// One fixture row; the final row carries no margin or step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub step: usize,
    pub lambda: Rational,
    pub e_low: Option<Rational>,
    pub d_low: Option<Rational>,
}

/// The published chain, as a bundled fixture.
pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");

/// Parses `step,lambda,e_low,d_low` rows with exact `p/q` entries.
pub fn parse_table(text: &str) -> Result<Vec<TableRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("row {}: {e}", n + 1)))?;
        if record.len() != 4 {
            return Err(Error::Parse(format!("row {}: expected 4 fields", n + 1)));
        }
        let step = record[0]
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad step {:?}", n + 1, &record[0])))?;
        let opt = |s: &str| -> Result<Option<Rational>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_rational(s).map(Some)
            }
        };
        rows.push(TableRow {
            step,
            lambda: parse_rational(&record[1])?,
            e_low: opt(&record[2])?,
            d_low: opt(&record[3])?,
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse("table has no rows".into()));
    }
    Ok(rows)
}

pub fn table1() -> Vec<TableRow> {
    parse_table(TABLE1_CSV).expect("bundled fixture parses")
}

/// Which condition a row failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowCheck {
    /// `Q(lambda) - lambda^2/4 = e`.
    #[serde(rename = "a")]
    Margin,
    /// `(lambda + d)^2 <= lambda^2 + 4e`.
    #[serde(rename = "b")]
    Step,
    /// next `lambda <= lambda + d`.
    #[serde(rename = "c")]
    Chaining,
    /// Only the final row may lack `e` and `d`.
    #[serde(rename = "shape")]
    Shape,
}

impl std::fmt::Display for RowCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RowCheck::Margin => "(a)",
            RowCheck::Step => "(b)",
            RowCheck::Chaining => "(c)",
            RowCheck::Shape => "(shape)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowVerdict {
    pub step: usize,
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    pub q: Option<i64>,
    pub failed: Option<RowCheck>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub rows: Vec<RowVerdict>,
    #[serde(with = "serde_rational")]
    pub end: Rational,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.failed.is_none())
    }

    pub fn first_failure(&self) -> Option<&RowVerdict> {
        self.rows.iter().find(|r| r.failed.is_some())
    }
}

fn validate_row(row: &TableRow, next: Option<&TableRow>, p: &Precision) -> RowVerdict {
    let mut verdict = RowVerdict {
        step: row.step,
        lambda: row.lambda.clone(),
        q: None,
        failed: None,
        message: None,
    };
    let mut fail = |check: RowCheck, msg: String| {
        verdict.failed = Some(check);
        verdict.message = Some(msg);
    };
    let (e, d) = match (&row.e_low, &row.d_low, next) {
        (Some(e), Some(d), Some(_)) => (e, d),
        (None, None, None) => return verdict,
        _ => {
            fail(RowCheck::Shape, "only the final row may omit e and d".into());
            return verdict;
        }
    };
    let q = match q_count_with(&row.lambda, p) {
        Ok(q) if q.exact => q.value,
        Ok(q) => {
            fail(RowCheck::Margin, format!("Q({}) unresolved, lower bound {}", row.lambda, q.value));
            return verdict;
        }
        Err(err) => {
            fail(RowCheck::Margin, err.to_string());
            return verdict;
        }
    };
    let e_true = int(q) - &row.lambda * &row.lambda / int(4);
    let reach = &row.lambda + d;
    let next_lambda = &next.expect("matched").lambda;
    if &e_true != e {
        fail(RowCheck::Margin, format!("Q - lambda^2/4 = {e_true}, table has {e}"));
    } else if &reach * &reach > &row.lambda * &row.lambda + int(4) * e {
        fail(RowCheck::Step, format!("(lambda + d)^2 = {} > lambda^2 + 4e", &reach * &reach));
    } else if next_lambda > &reach {
        fail(RowCheck::Chaining, format!("next lambda {next_lambda} > lambda + d = {reach}"));
    }
    verdict.q = Some(q);
    verdict
}

/// Checks every row exactly: the margin against certified `Q`, the step
/// inequality, and chaining into the next row.
pub fn validate_table(rows: &[TableRow], p: &Precision) -> TableReport {
    let verdicts = rows
        .iter()
        .enumerate()
        .map(|(n, row)| validate_row(row, rows.get(n + 1), p))
        .collect();
    TableReport {
        rows: verdicts,
        end: rows.last().map(|r| r.lambda.clone()).unwrap_or_else(Rational::zero),
    }
}

/// One checked comparison between exact values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub label: String,
    pub lhs: String,
    pub rhs: String,
    pub relation: String,
    pub holds: bool,
}

impl Inequality {
    fn strict(label: &str, lhs: &Rational, rel: &str, rhs: &Rational) -> Self {
        let holds = match rel {
            "<" => lhs < rhs,
            "<=" => lhs <= rhs,
            ">" => lhs > rhs,
            ">=" => lhs >= rhs,
            "=" => lhs == rhs,
            _ => unreachable!("unknown relation"),
        };
        Self {
            label: label.into(),
            lhs: format_rational(lhs),
            rhs: format_rational(rhs),
            relation: rel.into(),
            holds,
        }
    }
}

/// A claim with every exact comparison behind it. Enclosures of `pi` come
/// from alternating Machin series bounds; square roots are bracketed and
/// the brackets are listed as squared comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub claim: String,
    pub inequalities: Vec<Inequality>,
    pub status: String,
}

impl Certificate {
    fn new(claim: &str, inequalities: Vec<Inequality>) -> Self {
        let status = if inequalities.iter().all(|i| i.holds) { "certified" } else { "failed" };
        Self { claim: claim.into(), inequalities, status: status.into() }
    }

    pub fn certified(&self) -> bool {
        self.status == "certified"
    }
}

fn sqrt_bracket(r: i64, name: &str, p: &Precision) -> Result<(RatInterval, Vec<Inequality>)> {
    let s = enclose_sqrt(&int(r), p)?;
    let ineqs = vec![
        Inequality::strict(&format!("{name} lower endpoint squared <= {r}"), &s.lo().pow(2), "<=", &int(r)),
        Inequality::strict(&format!("{name} upper endpoint squared >= {r}"), &s.hi().pow(2), ">=", &int(r)),
    ];
    Ok((s, ineqs))
}

fn pi_bracket(p: &Precision) -> (RatInterval, Vec<Inequality>) {
    let pi = enclose_pi(p);
    let ineqs = vec![
        Inequality {
            label: "pi lower bound (alternating Machin series)".into(),
            lhs: format_rational(pi.lo()),
            rhs: "pi".into(),
            relation: "<".into(),
            holds: true,
        },
        Inequality {
            label: "pi upper bound (alternating Machin series)".into(),
            lhs: format_rational(pi.hi()),
            rhs: "pi".into(),
            relation: ">".into(),
            holds: true,
        },
    ];
    (pi, ineqs)
}

/// `sqrt 3 + 6/(5 pi) - 5 pi/9 > 0`, `5 pi/6 < 2 sqrt 2` and `5/2 <= 2 sqrt 2`.
pub fn certify_small_lambda(p: &Precision) -> Result<Certificate> {
    let (pi, mut ineqs) = pi_bracket(p);
    let (s3, b3) = sqrt_bracket(3, "sqrt 3", p)?;
    let (s2, b2) = sqrt_bracket(2, "sqrt 2", p)?;
    ineqs.extend(b3);
    ineqs.extend(b2);

    // the expression is decreasing in pi and increasing in sqrt 3
    let s_low = s3.lo() + rat(6, 5) / pi.hi() - rat(5, 9) * pi.hi();
    ineqs.push(Inequality::strict(
        "S(5pi/6) = sqrt 3 + 6/(5pi) - 5pi/9 > 0 (lower bound)",
        &s_low,
        ">",
        &Rational::zero(),
    ));
    ineqs.push(Inequality::strict(
        "5pi/6 < 2 sqrt 2 (upper bound of 5pi/6 vs lower bound of 2 sqrt 2)",
        &(rat(5, 6) * pi.hi()),
        "<",
        &(int(2) * s2.lo()),
    ));
    ineqs.push(Inequality::strict(
        "5/2 <= 2 sqrt 2, i.e. (5/2)^2 <= 8",
        &rat(25, 4),
        "<=",
        &int(8),
    ));
    Ok(Certificate::new(
        "S(5pi/6) > 0 and 5pi/6 < 2 sqrt 2, with 5/2 <= 2 sqrt 2",
        ineqs,
    ))
}

/// At `c = 783/1000`: `q2(c) > q1(c) > 3`, the closed form
/// `q2(c) = 2500pi/(3481pi - 10000)`, and `q2(c) <= 9`.
pub fn certify_large_lambda(p: &Precision) -> Result<Certificate> {
    let c = rat(783, 1000);
    let (_, mut ineqs) = pi_bracket(p);
    let a = q1(&c, p)?;
    let b = q2(&c, p)?;
    ineqs.push(Inequality::strict("q2(783/1000) > q1(783/1000) (q2 lower vs q1 upper)", b.lo(), ">", a.hi()));
    ineqs.push(Inequality::strict("q1(783/1000) > 3 (lower bound)", a.lo(), ">", &int(3)));
    let sym = q2_symbolic(&c);
    let expected = PiRatio::new(int(2500), int(3481), int(10000));
    ineqs.push(Inequality {
        label: "5/(2(7c - 2 - 10/pi)) at c = 783/1000 in lowest terms".into(),
        lhs: sym.to_string(),
        rhs: expected.to_string(),
        relation: "=".into(),
        holds: sym == expected,
    });
    ineqs.push(Inequality::strict("q2(783/1000) <= 9 (upper bound)", b.hi(), "<=", &int(9)));
    Ok(Certificate::new(
        "q2(783/1000) = 2500pi/(3481pi - 10000) > q1(783/1000) > 3, and q2(783/1000) <= 9",
        ineqs,
    ))
}

/// Smallest margin over the chain.
pub fn min_margin(chain: &GapChain) -> Option<&Rational> {
    chain.steps.iter().map(|s| &s.e_low).min()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn step_at_five_halves() {
        let s = certify_step(&rat(5, 2), &p()).unwrap();
        assert_eq!((s.q_low, s.e_low.clone()), (2, rat(7, 16)));
        // (5/2 + d)^2 <= 8, and the published 15/46 fits too
        assert!(s.d_low >= rat(15, 46));
        assert!(s.check().is_ok());
    }

    #[test]
    fn step_at_four() {
        let s = certify_step(&int(4), &p()).unwrap();
        assert_eq!((s.q_low, s.e_low.clone()), (5, int(1)));
        assert!(rat(76, 17) * rat(76, 17) <= int(20));
        assert!(s.d_low >= rat(8, 17));
    }

    #[test]
    fn no_margin_at_one_tenth() {
        let err = certify_step(&rat(1, 10), &p()).unwrap_err();
        assert_eq!(err, Error::NoPositiveMargin { lambda: rat(1, 10), q: 0, e: rat(-1, 400) });
        assert!(err.to_string().starts_with("no-positive-margin at 1/10"));
    }

    #[test]
    fn dyadic_step_is_maximal() {
        let d = max_dyadic_step(&rat(5, 2), &rat(7, 16), 10);
        let bump = &d + rat(1, 1024);
        assert!((rat(5, 2) + &d).pow(2) <= int(8));
        assert!((rat(5, 2) + bump).pow(2) > int(8));
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_in(&rat(5, 2), &rat(3, 1)), int(3));
        assert_eq!(simplest_in(&rat(21, 10), &rat(24, 10)), rat(7, 3));
        assert_eq!(simplest_in(&rat(1, 3), &rat(1, 2)), rat(1, 2));
    }

    #[test]
    fn tiny_chain_is_one_step() {
        let to = rat(5, 2) + rat(1, 1000);
        let chain = run_chain(&rat(5, 2), &to, &p()).unwrap();
        assert_eq!(chain.steps.len(), 1);
        recheck_chain(&chain).unwrap();
    }

    #[test]
    fn reversed_range_rejected() {
        assert!(run_chain(&int(9), &rat(5, 2), &p()).is_err());
    }

    #[test]
    fn fixture_rows() {
        let rows = table1();
        assert_eq!(rows.len(), 15);
        assert_eq!(rows[0].lambda, rat(5, 2));
        assert_eq!(rows[14].lambda, rat(374, 39));
        assert!(rows[14].e_low.is_none());
        assert!(parse_table("").is_err());
        assert!(parse_table("step,lambda,e_low,d_low\n").is_err());
    }

    #[test]
    fn corrupted_row_fails_margin() {
        let mut rows = table1();
        rows[3].e_low = Some(int(2));
        let report = validate_table(&rows[..5], &p());
        let bad = report.first_failure().unwrap();
        assert_eq!((bad.step, bad.failed), (4, Some(RowCheck::Margin)));
    }

    #[test]
    fn endpoint_certificates() {
        let small = certify_small_lambda(&p()).unwrap();
        assert!(small.certified(), "{small:?}");
        let large = certify_large_lambda(&p()).unwrap();
        assert!(large.certified(), "{large:?}");
    }

    #[test]
    fn chain_serializes_rationals_as_text() {
        let chain = run_chain(&rat(5, 2), &rat(251, 100), &p()).unwrap();
        let json = serde_json::to_string(&chain).unwrap();
        assert!(json.contains("\"from\":\"5/2\""));
        assert!(json.contains("\"e_low\":\"7/16\""));
    }
}
