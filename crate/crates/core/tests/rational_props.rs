use num_integer::Integer;
use num_traits::Signed;
use proptest::prelude::*;

use ab_polya::enclosures::{enclose_arccos, enclose_pi, enclose_sqrt, Precision};
use ab_polya::rational::{floor, int, rat, rat_floor_shift, to_f64, FloorShift, RatInterval, Rational};

fn small_rat() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..5_000).prop_map(|(n, d)| rat(n, d))
}

fn interval() -> impl Strategy<Value = (RatInterval, Rational)> {
    (small_rat(), small_rat(), 0u32..=1000).prop_map(|(a, b, t)| {
        let iv = RatInterval::hull_of(a, b);
        let point = iv.lo() + (iv.hi() - iv.lo()) * rat(t.into(), 1000);
        (iv, point)
    })
}

fn canonical(x: &Rational) -> bool {
    x.denom().is_positive() && x.numer().gcd(x.denom()) == 1.into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ops_are_sound((a, x) in interval(), (b, y) in interval()) {
        let sum = &a + &b;
        prop_assert!(sum.contains(&(&x + &y)));
        let diff = &a - &b;
        prop_assert!(diff.contains(&(&x - &y)));
        let prod = &a * &b;
        prop_assert!(prod.contains(&(&x * &y)));
        prop_assert!((-&a).contains(&-&x));
        prop_assert!(a.scale(&rat(-3, 7)).contains(&(&x * rat(-3, 7))));
        match a.checked_div(&b) {
            Ok(q) => prop_assert!(q.contains(&(&x / &y))),
            Err(e) => prop_assert!(b.contains_zero() && e.to_string().starts_with("interval-contains-zero")),
        }
        for end in [sum.lo(), sum.hi(), prod.lo(), prod.hi()] {
            prop_assert!(canonical(end));
        }
    }

    #[test]
    fn resolved_floor_is_exact((a, x) in interval(), s in 0i64..4) {
        let shift = rat(s, 4);
        if let FloorShift::Resolved(n) = rat_floor_shift(&a, &shift) {
            prop_assert_eq!(n, floor(&(&x + &shift)));
        }
    }

    #[test]
    fn outward_rounding_contains((a, x) in interval(), bits in 1u32..60) {
        prop_assert!(a.round_outward(bits).contains(&x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn arccos_contains_float_value(n in -1000i64..=1000) {
        let r = rat(n, 1000);
        let p = Precision::from_bits(45);
        let e = enclose_arccos(&r, &p).unwrap();
        prop_assert!(e.width() <= rat(1, 1 << 40) * rat(1, 32));
        let f = (n as f64 / 1000.0).acos();
        prop_assert!(to_f64(e.lo()) <= f + 1e-15 && f - 1e-15 <= to_f64(e.hi()));
        // arccos r + arccos(-r) = pi
        let sum = &e + &enclose_arccos(&-&r, &p).unwrap();
        prop_assert!(sum.contains(&enclose_pi(&Precision::from_bits(80)).midpoint()));
    }

    #[test]
    fn sqrt_is_monotone(a in 0i64..100_000, b in 0i64..100_000) {
        let p = Precision::from_bits(50);
        let (lo, hi) = (a.min(b), a.max(b));
        let x = enclose_sqrt(&rat(lo, 97), &p).unwrap();
        let y = enclose_sqrt(&rat(hi, 97), &p).unwrap();
        prop_assert!(x.lo() <= y.hi());
        prop_assert!(x.lo() * x.lo() <= rat(lo, 97) && rat(lo, 97) <= x.hi() * x.hi());
    }
}

#[test]
fn arccos_decreasing_on_grid() {
    let p = Precision::from_bits(30);
    let vals: Vec<_> = (0..=50).map(|k| enclose_arccos(&rat(k, 50), &p).unwrap()).collect();
    for w in vals.windows(2) {
        let disjoint = w[1].hi() < w[0].lo() || w[0].hi() < w[1].lo();
        assert!(!disjoint || w[0].lo() >= w[1].hi());
    }
    assert!(vals[50].is_point() && vals[50].contains(&int(0)));
}
