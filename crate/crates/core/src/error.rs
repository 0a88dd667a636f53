use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("interval-contains-zero: divisor {0} contains zero")]
    IntervalContainsZero(String),
    #[error("invalid interval: lo {lo} > hi {hi}")]
    InvertedInterval { lo: String, hi: String },
    #[error("negative-radicand: {0}")]
    NegativeRadicand(Rational),
    #[error("arccos-domain: |{0}| > 1")]
    ArccosDomain(Rational),
    #[error("precision must be strictly positive, got {0}")]
    NonPositivePrecision(Rational),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("level-above-max: G_lambda(0) = lambda/pi < 1/4 for lambda = {0}")]
    LevelAboveMax(f64),
    #[error("not-admissible: {0}")]
    NotAdmissible(String),
    #[error("hypotheses-fail: {0}")]
    HypothesesFail(String),
    #[error("hypothesis-M0: M0 = {m0} exceeds b = {b}")]
    HypothesisM0 { m0: i64, b: String },
    #[error("no-positive-margin at {lambda}: Q = {q}, e = {e}")]
    NoPositiveMargin { lambda: Rational, q: i64, e: Rational },
    #[error("refinement cap exhausted: {0}")]
    RefinementCap(String),
    #[error("flux must lie in [0, 1/2], got {0}")]
    FluxOutOfRange(Rational),
    #[error("bessel zero bracketing failed: {0}")]
    Bracketing(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
