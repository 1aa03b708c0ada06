use proptest::prelude::*;
use theta_gsp4::exact_arith::*;
use theta_gsp4::hecke_gsp4::*;

fn gen() -> impl Strategy<Value = Gen> {
    prop::sample::select(vec![Gen::S0, Gen::S1, Gen::S2, Gen::Eta])
}

#[test]
fn every_relation_holds() {
    let checks = relation_checks();
    assert!(checks.len() >= 7);
    for c in &checks {
        assert!(c.holds(), "{} fails", c.name);
    }
}

#[test]
fn quadratic_relation_exact() {
    let qm1 = &q() - &int(1);
    for g in [Gen::S0, Gen::S1, Gen::S2] {
        let m = generator_matrix(g);
        let lhs = word_product(&[g, g]);
        let rhs = &m.scale(&qm1) + &HeckeMatrix::scalar(&q());
        assert_eq!(lhs, rhs, "{g:?}");
    }
}

#[test]
fn braid_and_commutation() {
    let w1 = hecke_word("s1 s2 s1 s2").unwrap();
    let w2 = hecke_word("s2 s1 s2 s1").unwrap();
    assert_eq!(w1, w2);
    assert_eq!(&u_q() * &u_p(), &u_p() * &u_q());
}

#[test]
fn words_reject_unknown_tokens() {
    assert!(matches!(hecke_word("s1 s7"), Err(HeckeError::UnknownGenerator(_))));
    assert!(matches!(hecke_word("  "), Err(HeckeError::EmptyWord)));
}

#[test]
fn eigenvectors() {
    let d = phi_dagger();
    assert_eq!(u_q().apply(&d), d.scale(&(&q().pow(2) / &alpha())));
    assert_eq!(u_p().apply(&d), d.scale(&(&qh(3) * &gamma())));
}

#[test]
fn fixture_round_trip() {
    let m = uq_fixture();
    assert_eq!(HeckeMatrix::from_fixture(&m.to_fixture()).unwrap(), m);
    assert_eq!(u_q(), m);
}

#[test]
fn spherical_pairing_from_definition() {
    let want = &(&(&int(1) + &q()) * &(&int(1) + &q().pow(2))) * &q().pow(-3);
    assert_eq!(iwahori_pairing(&phi0(), &phi0()), want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn word_product_is_associative(a in prop::collection::vec(gen(), 1..4), b in prop::collection::vec(gen(), 1..4)) {
        let mut ab = a.clone();
        ab.extend(&b);
        prop_assert_eq!(word_product(&ab), &word_product(&a) * &word_product(&b));
    }

    #[test]
    fn generators_invertible(g in gen()) {
        let m = generator_matrix(g);
        let inv = m.inverse().unwrap();
        prop_assert_eq!(&m * &inv, HeckeMatrix::identity());
    }
}
