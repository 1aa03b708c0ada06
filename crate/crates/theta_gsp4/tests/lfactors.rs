use proptest::prelude::*;
use theta_gsp4::exact_arith::*;
use theta_gsp4::lfactors::*;

fn character() -> impl Strategy<Value = FChar> {
    prop_oneof![
        (1i64..9, prop::bool::ANY).prop_map(|(k, inv)| FChar::unramified(&int(k) * &gamma().pow(if inv { -1 } else { 1 }))),
        (1u32..6, 1i64..9, prop::sample::select(vec![-1i64, 1])).prop_map(|(c, k, sign)| FChar::ramified(c, &int(k) * &delta(), sign)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_functional_equation(ch in character(), s in -9i32..10) {
        let s = Half(s);
        let lhs = &gamma_factor(s, &ch) * &gamma_factor(s.one_minus(), &ch.inverse());
        prop_assert_eq!(lhs, int(ch.sign));
    }

    #[test]
    fn epsilon_shift(ch in character(), s in -6i32..7) {
        let r = &ch.epsilon(Half(s)) / &ch.epsilon(Half(s + 2));
        prop_assert_eq!(r, qh(ch.conductor as i32 * 2));
    }
}

#[test]
fn tau_factors() {
    assert_eq!(l_tau(Splitting::Split), zeta(Half::int(1)));
    assert_eq!(l_tau(Splitting::Inert), l_value(Half::int(1), &int(-1)));
    assert_eq!(l_tau(Splitting::Ramified), RatFunc::one());
}

#[test]
fn hecke_polynomial_roots() {
    let sat = SatakeGSp4::from_local(&alpha(), &gamma(), 2);
    for r in sat.roots() {
        assert!(sat.hecke_poly_at(&r.inv().unwrap()).is_zero());
    }
    assert_eq!(sat.hecke_coeffs(), sat.product_coeffs());
}

#[test]
fn classical_and_local_multipliers_agree() {
    let (a, g, d) = (alpha(), gamma(), delta());
    let sat = SatakeGSp4::from_local(&a, &g, 3);
    let split = CharWithConductor::unramified(KLambda::Split { delta: d.clone() });
    assert_eq!(modified_euler(&sat, &EulerCase::Split(d.clone(), d.inv().unwrap())), modified_euler_local(&a, &g, &split));
    let inert = CharWithConductor::unramified(KLambda::Inert);
    assert_eq!(modified_euler(&sat, &EulerCase::Inert), modified_euler_local(&a, &g, &inert));
    for c in 1..4 {
        let ram = CharWithConductor { lam: KLambda::Split { delta: d.clone() }, conductor: c };
        assert_eq!(modified_euler(&sat, &EulerCase::Ramified(c)), modified_euler_local(&a, &g, &ram));
    }
}

#[test]
fn factor_table_covers_every_splitting() {
    let rows = factor_table(&gamma(), &alpha(), &delta(), 1);
    for case in ["split", "inert", "ramified"] {
        assert!(rows.iter().any(|r| r.2 == case), "{case}");
    }
}
