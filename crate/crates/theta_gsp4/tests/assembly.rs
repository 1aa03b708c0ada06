use num_rational::Ratio;
use proptest::prelude::*;
use theta_gsp4::assembly::*;
use theta_gsp4::quadfield::RootOfUnity;

const SQUAREFREE: [i64; 10] = [1, 2, 3, 5, 6, 7, 10, 11, 13, 15];

fn product() -> impl Strategy<Value = SymProduct> {
    (
        -20i64..21,
        1i64..13,
        prop::collection::vec((prop::sample::select(vec![PHI_NORM, L_AD, E_P, ALPHA_P]), -3i64..4), 0..4),
        0i64..6,
    )
        .prop_filter("nonzero", |t| t.0 != 0)
        .prop_map(|(n, d, syms, ph)| {
            let mut x = SymProduct::rational(n, d).mul(&SymProduct::root(RootOfUnity::new(Ratio::new(ph, 6))));
            for (s, e) in syms {
                x = x.mul(&SymProduct::sym(s).powi(e).unwrap());
            }
            x
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_form_a_group(a in product(), b in product(), c in product()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.div(&a).unwrap().is_one());
        prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a);
    }

    #[test]
    fn integer_powers_add(a in product(), m in -3i64..4, n in -3i64..4) {
        prop_assert_eq!(a.powi(m).unwrap().mul(&a.powi(n).unwrap()), a.powi(m + n).unwrap());
    }

    #[test]
    fn rational_values_multiply(n1 in -30i64..31, d1 in 1i64..20, n2 in -30i64..31, d2 in 1i64..20) {
        let x = SymProduct::rational(n1, d1).mul(&SymProduct::rational(n2, d2));
        let want = num_rational::BigRational::new((n1 * n2).into(), (d1 * d2).into());
        prop_assert_eq!(x.rational_value().unwrap(), want);
    }

    #[test]
    fn mass_is_multiplicative(i in 0usize..10, j in 0usize..10) {
        let (a, b) = (SQUAREFREE[i], SQUAREFREE[j]);
        prop_assume!(num_integer::gcd(a, b) == 1);
        let base = mass_volume(1, 1).unwrap();
        let v = mass_volume(a, b).unwrap();
        let va = mass_volume(a, 1).unwrap();
        let vb = mass_volume(1, b).unwrap();
        prop_assert_eq!(v.pi_power, 3);
        prop_assert_eq!(v.coeff * base.coeff, va.coeff * vb.coeff);
    }
}

#[test]
fn substitution_replaces_symbol() {
    let x = SymProduct::sym(OMEGA).powi(2).unwrap().mul(&SymProduct::integer(3));
    let y = x.substitute(OMEGA, &SymProduct::sym(L_AD).div(&SymProduct::sym(F_NORM)).unwrap()).unwrap();
    assert_eq!(y.exponent(OMEGA), Ratio::from_integer(0));
    assert_eq!(y.exponent(L_AD), Ratio::from_integer(2));
    assert_eq!(y.exponent(F_NORM), Ratio::from_integer(-2));
}

#[test]
fn zero_has_no_inverse() {
    assert!(SymProduct::zero().inv().is_err());
    assert!(SymProduct::zero().mul(&SymProduct::integer(5)).is_zero());
}

#[test]
fn fractional_power_keeps_prime_exponents() {
    let x = SymProduct::integer(12).pow(Ratio::new(1, 2)).unwrap();
    assert_eq!(x.to_string(), "2 * 3^(1/2)");
    assert!(SymProduct::integer(-1).pow(Ratio::new(1, 2)).is_err());
}

#[test]
fn mass_values() {
    let v = mass_volume(1, 1).unwrap();
    assert_eq!((v.coeff, v.pi_power), (Ratio::new(1, 270), 3));
    assert_eq!(xi_even(1).coeff, Ratio::new(1, 6));
    assert_eq!(xi_even(2).coeff, Ratio::new(1, 90));
    assert!(mass_volume(4, 1).is_err());
    assert!(mass_volume(6, 3).is_err());
}

#[test]
fn sample_data_specialize_to_classical_display() {
    for (name, g) in sample_data() {
        let rep = interpolation_rhs(&g).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(rep.all_hold(), "{name}");
    }
}

#[test]
fn trivial_case_prefactor() {
    let g = GlobalDatum::simple(7, 5, 3, 1);
    let rep = interpolation_rhs(&g).unwrap();
    let c = rep.checks.iter().find(|c| c.name.starts_with("prefactor")).unwrap();
    assert!(c.holds);
    // w_K^2 Delta_K^(k-1) 2^(2k-3-s) = 4 * 49 * 4
    assert_eq!(c.detail, "784");
}

#[test]
fn config_round_trip() {
    let text = "delta_k = 7\np = 3\nkappa = 3\nn_plus = 2\nsigns = 2:-1 # one prime\n";
    let g = GlobalDatum::from_config(text).unwrap();
    assert_eq!((g.delta_k, g.p, g.kappa, g.n_plus), (7, 3, 3, 2));
    assert_eq!(g.signs.get(&2), Some(&-1));
    assert!(GlobalDatum::from_config("delta_k = 7\np = 3\nkappa = 3\ncolour = 1\n").is_err());
}

#[test]
fn invalid_configurations() {
    let mut g = GlobalDatum::simple(7, 2, 3, 1);
    g.n_plus = 2;
    g.signs.insert(2, 1);
    assert!(matches!(g.validate(), Err(AssemblyError::BadP(2))));
    g = GlobalDatum::simple(7, 5, 3, 1);
    g.n_minus = 3;
    g.signs.insert(3, 1);
    assert!(matches!(g.validate(), Err(AssemblyError::OddNMinus(_))));
    g = GlobalDatum::simple(7, 5, 3, 1);
    g.n_plus = 3;
    g.signs.insert(3, 1);
    assert!(matches!(g.validate(), Err(AssemblyError::Heegner(..))));
}

#[test]
fn unknown_group_is_reported() {
    let e = run_verification_suite(&["nope"]);
    assert_eq!(e.len(), 1);
    assert_eq!(e[0].status, Status::Fail);
    assert!(run_verification_suite(&["mass"]).iter().all(|e| e.group == "mass" && e.status.passed()));
}
