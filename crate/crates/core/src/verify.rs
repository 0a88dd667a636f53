//! Empirical sweeps over the disk spectra: Polya-type inequalities, the
//! zero-count bounds behind them, and the lattice sandwich.

use serde::Serialize;

use crate::bessel::{ab_spectrum, bessel_zeros_below, count_in, lowest_eigenvalues, Side, ZeroKind};
use crate::lattice::{guarded_floor, p_dirichlet, p_neumann, q_count, Flux, Side as FloorSide};
use crate::rational::{from_f64_exact, rat, Rational};

/// Margins below this are reported as suspicious.
pub const MARGIN_WARNING: f64 = 1e-6;

/// Result of a Polya-type sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyaReport {
    pub side: Side,
    pub alpha: String,
    pub n_max: usize,
    /// Smallest `lambda_n - 4n` (Dirichlet) or `4n - lambda_{n+1}` (Neumann).
    pub min_margin: f64,
    pub min_margin_at: usize,
    /// Offending `(n, eigenvalue)` pairs.
    pub violations: Vec<(usize, f64)>,
}

impl PolyaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn polya(side: Side, alpha: &Flux, n_max: usize) -> PolyaReport {
    assert!(n_max >= 1, "n_max must be at least 1");
    let extra = usize::from(side == Side::Neumann);
    let eig = lowest_eigenvalues(side, alpha, n_max + extra);
    let mut report = PolyaReport {
        side,
        alpha: alpha.to_string(),
        n_max,
        min_margin: f64::INFINITY,
        min_margin_at: 0,
        violations: Vec::new(),
    };
    for n in 1..=n_max {
        let value = eig[n - 1 + extra].value;
        let margin = match side {
            Side::Dirichlet => value - 4.0 * n as f64,
            Side::Neumann => 4.0 * n as f64 - value,
        };
        if margin < report.min_margin {
            report.min_margin = margin;
            report.min_margin_at = n;
        }
        if margin <= 0.0 {
            report.violations.push((n, value));
        }
    }
    if report.min_margin < MARGIN_WARNING {
        log::warn!(
            "{side} alpha={alpha}: margin {} at n={} is below {MARGIN_WARNING}",
            report.min_margin,
            report.min_margin_at
        );
    }
    report
}

/// `lambda^D_n > 4n` for `n <= n_max`.
pub fn verify_polya_dirichlet(alpha: &Flux, n_max: usize) -> PolyaReport {
    polya(Side::Dirichlet, alpha, n_max)
}

/// `lambda^N_{n+1} < 4n` for `n <= n_max`.
pub fn verify_polya_neumann(alpha: &Flux, n_max: usize) -> PolyaReport {
    polya(Side::Neumann, alpha, n_max)
}

/// One failed zero-count comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCountViolation {
    pub kind: ZeroKind,
    pub nu: String,
    pub lambda: String,
    pub count: i64,
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCountReport {
    pub checked: usize,
    pub violations: Vec<ZeroCountViolation>,
}

impl ZeroCountReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Number of zeros of `J_nu` (`Function`) or `J'_nu` (`Derivative`, counting
/// `j'_{0,1} = 0`) that are `<= lambda`.
fn zero_count(zeros: &[f64], nu: f64, kind: ZeroKind, lambda: f64) -> i64 {
    let origin = i64::from(kind == ZeroKind::Derivative && nu == 0.0);
    origin + zeros.partition_point(|z| *z <= lambda) as i64
}

/// On the grid `nu = 0, nu_step, ..., <= nu_max` and
/// `lambda = lambda_step, 2 lambda_step, ... <= lambda_max` (restricted to
/// `lambda >= lambda_min`), checks
/// `#{k: j_{nu,k} <= lambda} <= floor(G_lambda(nu) + 1/4)` and
/// `#{k: j'_{nu,k} <= lambda} >= floor(G_lambda(nu) + 3/4)`.
pub fn verify_zero_count_bounds(
    nu_max: &Rational,
    nu_step: &Rational,
    lambda_min: &Rational,
    lambda_max: &Rational,
    lambda_step: &Rational,
) -> ZeroCountReport {
    let quarter = rat(1, 4);
    let three_q = rat(3, 4);
    let mut lambdas = Vec::new();
    let mut l = lambda_step.clone();
    while &l <= lambda_max {
        if &l >= lambda_min {
            lambdas.push(l.clone());
        }
        l += lambda_step;
    }
    let lmax = crate::rational::to_f64(lambda_max);
    let mut report = ZeroCountReport { checked: 0, violations: Vec::new() };
    let mut nu = Rational::from_integer(0.into());
    while &nu <= nu_max {
        let nu_f = crate::rational::to_f64(&nu);
        let zeros = bessel_zeros_below(nu_f, ZeroKind::Function, lmax);
        let dzeros = bessel_zeros_below(nu_f, ZeroKind::Derivative, lmax);
        for lambda in &lambdas {
            let lf = crate::rational::to_f64(lambda);
            // the unfavourable side is taken on an unresolved floor
            let upper = guarded_floor(lf, &nu, &quarter, FloorSide::Lower);
            let lower = guarded_floor(lf, &nu, &three_q, FloorSide::Upper);
            let up_count = zero_count(&zeros, nu_f, ZeroKind::Function, lf);
            let low_count = zero_count(&dzeros, nu_f, ZeroKind::Derivative, lf);
            report.checked += 2;
            if up_count > upper {
                report.violations.push(ZeroCountViolation {
                    kind: ZeroKind::Function,
                    nu: nu.to_string(),
                    lambda: lambda.to_string(),
                    count: up_count,
                    bound: upper,
                });
            }
            if low_count < lower {
                report.violations.push(ZeroCountViolation {
                    kind: ZeroKind::Derivative,
                    nu: nu.to_string(),
                    lambda: lambda.to_string(),
                    count: low_count,
                    bound: lower,
                });
            }
        }
        nu += nu_step;
    }
    report
}

/// Counts at one `lambda` for the sandwich `N^D <= P^D < lambda^2/4` and
/// `N^N >= P^N >= Q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichRow {
    pub lambda: f64,
    pub alpha: String,
    pub n_dirichlet: usize,
    pub p_dirichlet: i64,
    pub weyl: f64,
    pub n_neumann: usize,
    pub p_neumann: i64,
    pub q: i64,
}

impl SandwichRow {
    pub fn holds(&self) -> bool {
        self.n_dirichlet as i64 <= self.p_dirichlet
            && (self.p_dirichlet as f64) < self.weyl
            && self.n_neumann as i64 >= self.p_neumann
            && self.p_neumann >= self.q
    }
}

/// Sandwich rows for every `lambda` of the grid. `q_values` holds the
/// certified `Q(lambda)` for the same grid (it does not depend on `alpha`).
pub fn sandwich_rows(alpha: &Flux, lambdas: &[f64], q_values: &[i64]) -> Vec<SandwichRow> {
    assert_eq!(lambdas.len(), q_values.len());
    let top = lambdas.iter().cloned().fold(0.0, f64::max);
    let dir = ab_spectrum(Side::Dirichlet, alpha, top);
    let neu = ab_spectrum(Side::Neumann, alpha, top);
    lambdas
        .iter()
        .zip(q_values)
        .map(|(&lambda, &q)| SandwichRow {
            lambda,
            alpha: alpha.to_string(),
            n_dirichlet: count_in(&dir, lambda),
            p_dirichlet: p_dirichlet(lambda, alpha),
            weyl: lambda * lambda / 4.0,
            n_neumann: count_in(&neu, lambda),
            p_neumann: p_neumann(lambda, alpha),
            q,
        })
        .collect()
}

/// Certified `Q` at each float grid point, read as the exact binary rational.
pub fn q_on_grid(lambdas: &[f64]) -> Vec<i64> {
    lambdas
        .iter()
        .map(|&l| {
            let q = q_count(&from_f64_exact(l).expect("finite grid")).expect("positive grid");
            if !q.exact {
                log::warn!("Q({l}) is only a lower bound");
            }
            q.value
        })
        .collect()
}

/// `lambda = start + k step` for `k = 0, 1, ...` while `<= stop`, computed from
/// integer multiples so the grid is reproducible.
pub fn float_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

/// The flux values used by the sweeps: `0, 1/10, 1/4, 2/5, 1/2`.
pub fn standard_fluxes() -> Vec<Flux> {
    [rat(0, 1), rat(1, 10), rat(1, 4), rat(2, 5), rat(1, 2)]
        .into_iter()
        .map(|a| Flux::new(a).expect("in range"))
        .collect()
}
