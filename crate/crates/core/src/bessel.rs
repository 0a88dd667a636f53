//! Double-precision Bessel functions `J_nu`, `J'_nu` of real order, their
//! positive zeros, and the Aharonov-Bohm spectra of the unit disk.

use std::fmt;

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::lattice::Flux;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// Start index for the backward recurrence. Far enough above both the
/// order and the turning point that the truncation error is below `1e-16`.
fn miller_start(n: usize, x: f64) -> usize {
    let top = (n as f64).max(x);
    (top + (160.0 * top.max(1.0)).sqrt()).ceil() as usize + 20
}

/// `(J_nu(x), J_{nu+1}(x))` by Miller's backward recurrence, normalised with
/// `(x/2)^mu = sum_k (mu+2k) Gamma(mu+k)/k! J_{mu+2k}(x)`, `mu = nu - floor(nu)`.
fn j_pair(nu: f64, x: f64) -> (f64, f64) {
    assert!(nu >= 0.0, "order must be nonnegative");
    assert!(x > 0.0, "argument must be positive");
    let n = nu.floor() as usize;
    let mu = nu - n as f64;
    let top = miller_start(n + 1, x);

    // ratio r_k = Gamma(mu+k)/k!, starting at r_1 = Gamma(1+mu)
    let g1 = gamma(1.0 + mu);
    let weight = |l: usize, r: f64| -> f64 {
        if l == 0 {
            g1
        } else {
            (mu + l as f64) * r
        }
    };
    let mut r = vec![0.0; top / 2 + 2];
    if r.len() > 1 {
        r[1] = g1;
    }
    for k in 1..r.len() - 1 {
        r[k + 1] = r[k] * (mu + k as f64) / (k as f64 + 1.0);
    }

    let mut upper = 0.0; // J_{mu+l+1}
    let mut cur = 1e-30; // J_{mu+l}
    let mut sum = 0.0;
    let mut at_n = 0.0;
    let mut at_n1 = 0.0;
    let mut l = top;
    loop {
        if l % 2 == 0 {
            sum += weight(l, r[l / 2]) * cur;
        }
        if l == n + 1 {
            at_n1 = cur;
        }
        if l == n {
            at_n = cur;
        }
        if l == 0 {
            break;
        }
        let lower = 2.0 * (mu + l as f64) / x * cur - upper;
        upper = cur;
        cur = lower;
        l -= 1;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_BY;
            upper *= RESCALE_BY;
            sum *= RESCALE_BY;
            at_n *= RESCALE_BY;
            at_n1 *= RESCALE_BY;
        }
    }
    let scale = (0.5 * x).powf(mu) / sum;
    (at_n * scale, at_n1 * scale)
}

/// `J_nu(x)` for `nu >= 0`, `x > 0`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    j_pair(nu, x).0
}

/// `J'_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x)`.
pub fn bessel_j_prime(nu: f64, x: f64) -> f64 {
    let (j, j1) = j_pair(nu, x);
    nu / x * j - j1
}

/// Zeros of `J_nu` or of `J'_nu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroKind {
    Function,
    Derivative,
}

/// Values and first derivative of whichever function `kind` selects.
fn eval_kind(nu: f64, x: f64, kind: ZeroKind) -> (f64, f64) {
    let (j, j1) = j_pair(nu, x);
    let jp = nu / x * j - j1;
    match kind {
        ZeroKind::Function => (j, jp),
        ZeroKind::Derivative => {
            // Bessel's equation: J'' = -J'/x - (1 - nu^2/x^2) J
            let jpp = -jp / x - (1.0 - nu * nu / (x * x)) * j;
            (jp, jpp)
        }
    }
}

/// Scan step. Consecutive zeros of `J_nu` and of `J'_nu` are more than two
/// units apart for every `nu >= 0`, so no sign change is skipped.
const SCAN_STEP: f64 = 0.25;

fn bisect_and_polish(nu: f64, mut a: f64, mut b: f64, kind: ZeroKind) -> f64 {
    let mut fa = eval_kind(nu, a, kind).0;
    while b - a > 1e-13 * b.max(1.0) {
        let m = 0.5 * (a + b);
        let fm = eval_kind(nu, m, kind).0;
        if fm == 0.0 {
            return m;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..2 {
        let (f, df) = eval_kind(nu, x, kind);
        let next = x - f / df;
        if !(next > a - 1e-12 && next < b + 1e-12) {
            break;
        }
        x = next;
    }
    x
}

/// Lazily scanned positive zeros of `J_nu` or `J'_nu`, in increasing order.
/// For `nu = 0` and the derivative, the zero at the origin is not produced.
struct ZeroScan {
    nu: f64,
    kind: ZeroKind,
    x: f64,
    f: f64,
}

impl ZeroScan {
    fn new(nu: f64, kind: ZeroKind) -> Self {
        // every zero exceeds nu; J'_0 vanishes at the origin so start past it
        let x = if nu > 0.0 { nu } else { 0.1 };
        let f = eval_kind(nu, x, kind).0;
        Self { nu, kind, x, f }
    }

    fn next_below(&mut self, limit: f64) -> Option<f64> {
        while self.x < limit {
            let x1 = self.x + SCAN_STEP;
            let f1 = eval_kind(self.nu, x1, self.kind).0;
            let (x0, f0) = (self.x, self.f);
            self.x = x1;
            self.f = f1;
            if f0 == 0.0 && x0 > self.nu {
                return Some(x0);
            }
            if (f0 < 0.0) != (f1 < 0.0) && f1 != 0.0 {
                return Some(bisect_and_polish(self.nu, x0, x1, self.kind));
            }
        }
        None
    }
}

/// Largest argument the scanning search will visit.
const SCAN_LIMIT: f64 = 1e4;

/// `j_{nu,k}` or `j'_{nu,k}`. For the derivative at `nu = 0` the zero
/// `j'_{0,1} = 0` is the caller's business: `k = 1` is rejected there and
/// `k >= 2` numbers the positive zeros from 2.
pub fn bessel_zero(nu: f64, k: usize, kind: ZeroKind) -> Result<f64> {
    if !(nu >= 0.0) || k == 0 {
        return Err(Error::Domain(format!("need nu >= 0 and k >= 1, got nu={nu}, k={k}")));
    }
    let skip_origin = kind == ZeroKind::Derivative && nu == 0.0;
    if skip_origin && k == 1 {
        return Err(Error::Domain("j'_{0,1} = 0 is not a positive zero".into()));
    }
    let wanted = if skip_origin { k - 1 } else { k };
    let mut scan = ZeroScan::new(nu, kind);
    let mut found = 0;
    while let Some(z) = scan.next_below(SCAN_LIMIT) {
        found += 1;
        if found == wanted {
            return Ok(z);
        }
    }
    Err(Error::Bracketing(format!(
        "no sign change for zero {k} of order {nu} below {SCAN_LIMIT}"
    )))
}

/// All positive zeros `<= limit` in increasing order (the origin excluded).
pub fn bessel_zeros_below(nu: f64, kind: ZeroKind, limit: f64) -> Vec<f64> {
    let mut scan = ZeroScan::new(nu, kind);
    let mut out = Vec::new();
    while let Some(z) = scan.next_below(limit + SCAN_STEP) {
        if z > limit {
            break;
        }
        out.push(z);
    }
    out
}

/// McMahon's large-`k` expansion, used only as a cross-check.
pub fn mcmahon(nu: f64, k: usize, kind: ZeroKind) -> f64 {
    let mu = 4.0 * nu * nu;
    let k = k as f64;
    match kind {
        ZeroKind::Function => {
            let b = (k + 0.5 * nu - 0.25) * std::f64::consts::PI;
            b - (mu - 1.0) / (8.0 * b)
                - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * b).powi(3))
        }
        ZeroKind::Derivative => {
            let b = (k + 0.5 * nu - 0.75) * std::f64::consts::PI;
            b - (mu + 3.0) / (8.0 * b)
                - 4.0 * (7.0 * mu * mu + 82.0 * mu - 9.0) / (3.0 * (8.0 * b).powi(3))
        }
    }
}

/// Boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Dirichlet,
    Neumann,
}

impl Side {
    pub fn kind(self) -> ZeroKind {
        match self {
            Side::Dirichlet => ZeroKind::Function,
            Side::Neumann => ZeroKind::Derivative,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Dirichlet => "dirichlet",
            Side::Neumann => "neumann",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Side::Dirichlet),
            "neumann" => Ok(Side::Neumann),
            other => Err(Error::Parse(format!("unknown side {other:?}"))),
        }
    }
}

/// One eigenvalue `j^2` (or `j'^2`) with angular index `i` and radial rank `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub side: Side,
    pub i: i64,
    pub k: usize,
    pub value: f64,
}

/// The two order sequences `(i, |i - alpha|)`: `i = -m` with order `m + alpha`
/// and `i = m + 1` with order `m + 1 - alpha`, for `m >= 0`, restricted to
/// orders below `limit`.
pub fn orders_below(alpha: f64, limit: f64) -> Vec<(i64, f64)> {
    let mut out = Vec::new();
    for m in 0.. {
        let a = m as f64 + alpha;
        let b = m as f64 + 1.0 - alpha;
        if a >= limit && b >= limit {
            break;
        }
        if a < limit {
            out.push((-m, a));
        }
        if b < limit {
            out.push((m + 1, b));
        }
    }
    out
}

/// All eigenvalues `<= lambda_max^2`, sorted ascending (ties by `i`, then
/// `k`). Coinciding orders at `alpha = 1/2` appear once per index pair.
pub fn ab_spectrum(side: Side, alpha: &Flux, lambda_max: f64) -> Vec<SpectrumEntry> {
    assert!(lambda_max > 0.0, "lambda_max must be positive");
    let a = alpha.as_f64();
    let kind = side.kind();
    let mut entries = Vec::new();
    for (i, nu) in orders_below(a, lambda_max) {
        let mut k = 1;
        if side == Side::Neumann && nu == 0.0 {
            entries.push(SpectrumEntry { side, i, k: 1, value: 0.0 });
            k = 2;
        }
        for z in bessel_zeros_below(nu, kind, lambda_max) {
            entries.push(SpectrumEntry { side, i, k, value: z * z });
            k += 1;
        }
    }
    entries.sort_by(|p, q| {
        p.value
            .total_cmp(&q.value)
            .then(p.i.cmp(&q.i))
            .then(p.k.cmp(&q.k))
    });
    entries
}

/// `N(lambda; alpha) = #{eigenvalues <= lambda^2}` over a precomputed sorted
/// spectrum.
pub fn count_in(spectrum: &[SpectrumEntry], lambda: f64) -> usize {
    let l2 = lambda * lambda;
    spectrum.partition_point(|e| e.value <= l2)
}

/// `N(lambda; alpha)` from scratch.
pub fn counting_function(side: Side, alpha: &Flux, lambda: f64) -> usize {
    count_in(&ab_spectrum(side, alpha, lambda), lambda)
}

/// The smallest `n` eigenvalues, enlarging the cutoff until enough are found.
pub fn lowest_eigenvalues(side: Side, alpha: &Flux, n: usize) -> Vec<SpectrumEntry> {
    // Weyl: lambda_n ~ 4n, so lambda ~ 2 sqrt(n)
    let mut cutoff = 2.0 * (n as f64).sqrt() * 1.1 + 3.0;
    loop {
        let spec = ab_spectrum(side, alpha, cutoff);
        if spec.len() >= n {
            return spec.into_iter().take(n).collect();
        }
        cutoff *= 1.25;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn half_integer_closed_form() {
        for x in [1.0, 2.0, 5.0] {
            let exact = (2.0 / (std::f64::consts::PI * x)).sqrt() * f64::sin(x);
            assert!(close(bessel_j(0.5, x), exact, 1e-13), "{x}");
        }
    }

    #[test]
    fn against_high_precision_values() {
        // (nu, x, J, J') computed with 30-digit arithmetic
        let table: [(f64, f64, f64, f64); 12] = [
            (0.0, 1.0, 0.7651976865579666, -0.4400505857449335),
            (0.0, 10.0, -0.2459357644513483, -0.04347274616886144),
            (0.25, 3.7, -0.3306271091009898, -0.2057335130275286),
            (1.5, 20.0, -0.06466286659231035, 0.1677304788494531),
            (10.3, 12.0, 0.2996564439254973, 0.007109353083262358),
            (35.75, 40.0, 0.1646498286431512, -0.04883165286808263),
            (70.0, 70.0, 0.1085308430824146, 0.02387894674757456),
            (70.0, 140.0, -0.07243084867671581, 0.002154254740313466),
            (0.1, 150.0, -0.01095290923662410, 0.06425634229823766),
            (50.0, 149.5, -0.06702664642691238, 0.005049149610453230),
            (3.0, 0.5, 0.002563729994587244, 0.01522164349115918),
            (20.0, 5.0, 2.770330052128942e-11, 1.074693820984045e-10),
        ];
        for (nu, x, j, jp) in table {
            let scale = j.abs().max(if j.abs() < 1e-6 { 0.0 } else { 1e-3 });
            assert!((bessel_j(nu, x) - j).abs() <= 1e-10 * scale.max(j.abs()), "J {nu} {x}");
            let scale = jp.abs().max(if jp.abs() < 1e-6 { 0.0 } else { 1e-3 });
            assert!(
                (bessel_j_prime(nu, x) - jp).abs() <= 1e-10 * scale.max(jp.abs()),
                "J' {nu} {x}: {}",
                bessel_j_prime(nu, x)
            );
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &(nu, x) in &[(0.0, 2.0), (2.25, 4.1), (17.5, 30.0), (60.0, 63.0)] {
            let h = 1e-5;
            let fd = (bessel_j(nu, x + h) - bessel_j(nu, x - h)) / (2.0 * h);
            assert!((bessel_j_prime(nu, x) - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn zeros_against_high_precision_values() {
        use ZeroKind::*;
        let table: [(f64, usize, ZeroKind, f64); 17] = [
            (0.0, 1, Function, 2.404825557695773),
            (0.0, 2, Function, 5.520078110286311),
            (0.0, 2, Derivative, 3.831705970207512),
            (0.25, 1, Function, 2.780887723994978),
            (0.25, 1, Derivative, 0.7690615528602313),
            (1.0, 1, Function, 3.831705970207512),
            (1.0, 1, Derivative, 1.841183781340659),
            (1.5, 1, Function, 4.493409457909064),
            (1.5, 1, Derivative, 2.460535572190399),
            (12.5, 3, Function, 25.10103852100806),
            (12.5, 3, Derivative, 23.22533270455781),
            (49.75, 2, Function, 62.53915926421522),
            (49.75, 2, Derivative, 59.76133848274955),
            (70.0, 1, Function, 77.89865984842842),
            (70.0, 1, Derivative, 73.34940852050051),
            (0.75, 1, Derivative, 1.514337003954342),
            (1.25, 1, Derivative, 2.155151039524742),
        ];
        for (nu, k, kind, z) in table {
            let got = bessel_zero(nu, k, kind).unwrap();
            assert!((got - z).abs() < 1e-10, "{nu} {k} {kind:?}: {got} vs {z}");
        }
    }

    #[test]
    fn neumann_origin_exception() {
        assert!(bessel_zero(0.0, 1, ZeroKind::Derivative).is_err());
        let spec = ab_spectrum(Side::Neumann, &Flux::zero(), 3.0);
        assert_eq!(spec[0], SpectrumEntry { side: Side::Neumann, i: 0, k: 1, value: 0.0 });
        assert!(ab_spectrum(Side::Neumann, &Flux::new(rat(1, 10)).unwrap(), 3.0)
            .iter()
            .all(|e| e.value > 0.0));
    }

    #[test]
    fn mcmahon_agrees_for_large_k() {
        for &(nu, kind) in &[(0.0, ZeroKind::Function), (2.5, ZeroKind::Function), (1.0, ZeroKind::Derivative)] {
            let k = 30;
            let z = bessel_zero(nu, k, kind).unwrap();
            assert!((z - mcmahon(nu, k, kind)).abs() < 1e-6);
        }
    }

    #[test]
    fn interlacing_and_monotonicity() {
        for nu in [0.3, 1.0, 4.75, 20.0] {
            let j = bessel_zeros_below(nu, ZeroKind::Function, 60.0);
            let d = bessel_zeros_below(nu, ZeroKind::Derivative, 60.0);
            assert!(nu <= d[0]);
            for k in 0..j.len() - 1 {
                assert!(d[k] < j[k] && j[k] < d[k + 1], "{nu} {k}");
            }
            let j_next = bessel_zeros_below(nu + 0.25, ZeroKind::Function, 60.0);
            for (a, b) in j.iter().zip(&j_next) {
                assert!(a < b);
            }
        }
    }

    #[test]
    fn spectrum_low_entries() {
        let d0 = ab_spectrum(Side::Dirichlet, &Flux::zero(), 5.0);
        assert!((d0[0].value - 5.783185962946784).abs() < 1e-9);
        assert_eq!(counting_function(Side::Dirichlet, &Flux::zero(), 2.0), 0);

        let quarter = Flux::new(rat(1, 4)).unwrap();
        let n = lowest_eigenvalues(Side::Neumann, &quarter, 3);
        assert!((n[1].value - 1.514337003954342f64.powi(2)).abs() < 1e-9);
        assert!((n[2].value - 2.155151039524742f64.powi(2)).abs() < 1e-9);

        let half = lowest_eigenvalues(Side::Neumann, &Flux::half(), 3);
        assert!((half[1].value - 1.165561185207211f64.powi(2)).abs() < 1e-9);
        assert!(half[1].value < 4.0);
        assert!(half[2].value < 8.0);
    }

    #[test]
    fn first_neumann_eigenvalue_counts_itself() {
        let alpha = Flux::new(rat(1, 4)).unwrap();
        let first = bessel_zero(0.25, 1, ZeroKind::Derivative).unwrap();
        assert_eq!(counting_function(Side::Neumann, &alpha, first), 1);
    }
}
