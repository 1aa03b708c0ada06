use std::collections::BTreeMap;

use proptest::prelude::*;
use theta_gsp4::exact_arith::*;

fn small_poly() -> impl Strategy<Value = RatFunc> {
    prop::collection::vec((-3i64..4, -2i32..3, -1i32..2, -1i32..2, prop::sample::select(vec![Sym::Gamma, Sym::Delta])), 1..4).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(c, ue, ae, xe, s)| &(&int(c) * &RatFunc::u_pow(ue)) * &(&alpha().pow(ae) * &RatFunc::var(s).pow(xe)))
            .sum()
    })
}

fn nonzero() -> impl Strategy<Value = RatFunc> {
    small_poly().prop_filter("nonzero", |f| !f.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_axioms(a in small_poly(), b in nonzero(), c in small_poly()) {
        let sum_ab = &a + &b;
        prop_assert_eq!(&sum_ab, &(&b + &a));
        prop_assert_eq!(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)));
        prop_assert_eq!(&(&(&a / &b) * &b), &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert!((&(&b * &b.inv().unwrap()) - &RatFunc::one()).is_zero());
    }

    #[test]
    fn quotients_are_canonical(a in nonzero(), b in nonzero(), c in nonzero()) {
        let x = &(&a * &c) / &(&b * &c);
        prop_assert_eq!(x, &a / &b);
    }

    #[test]
    fn display_parses_back(a in small_poly(), b in nonzero()) {
        let f = &a / &b;
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn u_squared_is_q(k in -6i32..7) {
        prop_assert_eq!(RatFunc::u_pow(2 * k), q().pow(k));
        prop_assert_eq!(qh(k).pow(2), q().pow(k));
    }

    #[test]
    fn substitution_is_a_homomorphism(a in small_poly(), b in small_poly(), g in 1i64..5) {
        let mut s = BTreeMap::new();
        s.insert(Sym::Gamma, int(g));
        let lhs = (&a * &b).substitute(&s).unwrap();
        let rhs = &a.substitute(&s).unwrap() * &b.substitute(&s).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn geometric_series_closed_form() {
    let x = &gamma() * &qh(-3);
    let s = sum_geometric(&int(1), &x, 0).unwrap();
    assert_eq!(s, (&int(1) - &x).inv().unwrap());
    let shifted = sum_geometric(&int(1), &x, 2).unwrap();
    assert_eq!(shifted, &x.pow(2) * &s);
}

#[test]
fn central_character_eliminates_beta() {
    let f = &(&alpha() * &beta()) * &gamma().pow(2);
    assert!(impose_central_char(&f).is_one());
}

#[test]
fn parse_errors_and_zero_division() {
    assert!(parse("a +* b").is_err());
    assert!(parse("1/(a - a)").is_err());
    assert!(RatFunc::zero().inv().is_err());
}

#[test]
fn gcd_cancels_common_factor() {
    let f = parse("(a^2 - g^2)/(a - g)").unwrap();
    assert_eq!(f, parse("a + g").unwrap());
    assert!(f.is_laurent());
}
