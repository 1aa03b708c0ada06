use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use theta_gsp4::cm_theta::*;
use theta_gsp4::exact_arith::*;
use theta_gsp4::quadfield::*;

const CASES: [(i64, i64); 12] = [(3, 5), (3, 7), (3, 13), (4, 5), (4, 7), (4, 13), (7, 5), (7, 13), (11, 5), (11, 7), (11, 13), (7, 11)];

fn random_sl2(rng: &mut StdRng, m: i64) -> Mat2 {
    loop {
        let (a, c) = (rng.gen_range(-9i64..10), m * rng.gen_range(-4i64..5));
        if num_integer::Integer::gcd(&a, &c) == 1 {
            let e = num_integer::Integer::extended_gcd(&a, &c);
            let k = rng.gen_range(-3i64..4);
            // [[a, b], [c, d]] with ad − bc = 1, shifted by a column operation.
            let g = [[a, -e.y], [c, e.x]];
            return mat_mul(&g, &[[1, k], [0, 1]]);
        }
    }
}

/// Γ₀(M)-equivalence witnessed by an explicit search.
fn witness(f: &Form, g: &Form, m: i64, bound: i64) -> bool {
    for a in -bound..=bound {
        for c in (-bound..=bound).filter(|c| c % m == 0) {
            for b in -bound..=bound {
                if a == 0 {
                    continue;
                }
                if (1 + b * c) % a != 0 {
                    continue;
                }
                let d = (1 + b * c) / a;
                if f.transform(&[[a, b], [c, d]]) == *g {
                    return true;
                }
            }
        }
    }
    false
}

#[test]
fn counts_match_ring_class_numbers() {
    for (d, p) in CASES {
        for n in 0..=2 {
            let pts = enumerate_cm_points(d, p, n, 1).unwrap();
            assert_eq!(pts.len() as u64, ring_class_number(d, p, n).unwrap(), "Δ={d} p={p} n={n}");
            for pt in &pts {
                assert_eq!(pt.s.det_quarter() * 4, num_rational::Ratio::from_integer(p.pow(2 * n) * d));
                assert!(pt.s.is_primitive());
                assert_eq!(pt.conductor(), p.pow(n));
            }
        }
    }
}

#[test]
fn brute_force_oracle() {
    for (d, p, n) in [(4, 5, 1), (4, 5, 2), (3, 5, 2), (7, 5, 2), (11, 7, 1), (4, 13, 1), (3, 7, 1)] {
        let mut keys: Vec<ClassKey> = enumerate_cm_points(d, p, n, 1).unwrap().iter().map(|p| p.key()).collect();
        keys.sort();
        assert_eq!(keys, brute_force_cm_keys(d, p, n, 1, 300).unwrap(), "Δ={d} p={p} n={n}");
    }
    let mut keys: Vec<Form> = enumerate_cm_points(4, 5, 1, 1).unwrap().iter().map(|p| p.key().form).collect();
    keys.sort();
    assert_eq!(keys, vec![Form::new(1, 0, 25), Form::new(2, 2, 13)]);
}

#[test]
fn local_obstructions_and_count_errors() {
    assert!(matches!(enumerate_cm_points(4, 5, 1, 7), Err(CmError::LocalObstruction(_))));
    assert!(matches!(enumerate_cm_points(4, 2, 1, 1), Err(CmError::LocalObstruction(_))));
    assert!(matches!(enumerate_cm_points(4, 13, 1, 25), Err(CmError::LocalObstruction(_))));
    assert_eq!(verify_cm_count(3, 4, 5, 1, 1), Err(CmError::CountMismatch { expected: 2, found: 3 }));
    assert!(verify_cm_count(2, 4, 5, 1, 1).is_ok());
    // Heegner level: two orientations at each split ℓ | N⁺.
    assert_eq!(enumerate_cm_points(4, 13, 1, 5).unwrap().len(), 12);
}

#[test]
fn base_point_and_lift() {
    for (d, p) in CASES {
        let t = CmTower::new(d, p, 2, 1).unwrap();
        let k = t.field;
        let base = &t.levels[0].base;
        assert_eq!(base.s.reduce(), Form::principal(-d));
        assert_eq!(-base.s.disc(), d);
        for n in 0..2u32 {
            let (lo, hi) = (&t.levels[n as usize], &t.levels[n as usize + 1]);
            assert_eq!(hi.base.s.det_quarter(), lo.base.s.det_quarter() * (p * p));
            assert_eq!(hi.base, tower_lift(&k, &lo.base, p, 1).unwrap());
            assert_eq!(hi.gamma_n, mat_mul(&lo.gamma_n, &[[p, 0], [0, 1]]));
            assert_eq!(hi.base.conductor(), p.pow(n + 1));
        }
    }
    // The regular representation of θ on (1, θ).
    let k = ImagQuadField::new(7).unwrap();
    let e = OptimalEmbedding::new(&k, [[0, -2], [1, 1]], 1, EichlerOrder::new(1)).unwrap();
    assert_eq!(e.s_form(), Form::new(1, 1, 2));
    // Non-optimal: x ∈ pℛ.
    assert_eq!(OptimalEmbedding::new(&k, [[0, -50], [25, 5]], 5, EichlerOrder::new(5)), Err(CmError::NotOptimal(5)));
}

#[test]
fn galois_action() {
    let mut rng = StdRng::seed_from_u64(11);
    for (d, p) in CASES {
        let t = CmTower::new(d, p, 2, 1).unwrap();
        for n in 0..=2u32 {
            let lvl = &t.levels[n as usize];
            let g = t.group(n);
            // identity and simple transitivity
            let id = galois_translate(&t.field, &lvl.base, &g.elements[g.identity]).unwrap();
            assert_eq!(id.key(), lvl.base.key());
            let mut orbit: Vec<ClassKey> = lvl.points.iter().map(|p| p.key()).collect();
            orbit.sort();
            let mut all: Vec<ClassKey> = enumerate_cm_points(d, p, n, 1).unwrap().iter().map(|p| p.key()).collect();
            all.sort();
            assert_eq!(orbit, all);
            // cocycle
            for _ in 0..6 {
                let (i, j) = (rng.gen_range(0..g.order()), rng.gen_range(0..g.order()));
                let twice = galois_translate(&t.field, &lvl.points[i], &g.elements[j]).unwrap();
                assert_eq!(twice.key(), lvl.points[g.mul(i, j)].key(), "Δ={d} p={p} n={n}");
            }
            // representative independence of γ in γℛ¹
            let m = t.order_level(n);
            for _ in 0..4 {
                let j = rng.gen_range(0..g.order());
                let u = random_sl2(&mut rng, m);
                let alt = translate_with(&t.field, &lvl.base, &g.elements[j], Some(u)).unwrap();
                assert_eq!(alt.key(), lvl.points[j].key());
            }
        }
    }
}

#[test]
fn fiber_multiset_identity() {
    for (d, p) in CASES {
        let t = CmTower::new(d, p, 2, 1).unwrap();
        for n in 1..=1 {
            assert!(t.fiber_identity(n).unwrap().iter().all(|x| x.1), "Δ={d} p={p} n={n}");
        }
    }
    for (d, p) in [(4, 5), (3, 5), (7, 5), (11, 7)] {
        let t = CmTower::new(d, p, 3, 1).unwrap();
        assert!(t.fiber_identity(2).unwrap().iter().all(|x| x.1), "Δ={d} p={p} n=2");
    }
    let t = CmTower::new(4, 13, 2, 5).unwrap();
    assert!(t.fiber_identity(1).unwrap().iter().all(|x| x.1));
}

#[test]
fn uq_worked_example() {
    let b = Form::new(1, 1, 1);
    assert_eq!(b.transform(&u_p(2, 1)), Form::new(4, 6, 3));
    assert_eq!(b.transform(&u_p(2, 2)), Form::new(4, 10, 7));
    assert_eq!(class_key(&Form::new(4, 10, 7), 1), class_key(&Form::new(4, 2, 1), 1));
    assert_eq!(class_key(&Form::new(4, 10, 7), 2), class_key(&Form::new(4, 2, 1), 2));
    assert!(witness(&Form::new(4, 2, 1), &Form::new(4, 10, 7), 2, 3));
    let mut f = FourierExpansion::new(1);
    f.set(&Form::new(4, 6, 3), int(1));
    assert_eq!(hecke_coefficient(&f, HeckeOp::UQ, 2, &b), int(2));
    let mut f = FourierExpansion::new(1);
    f.set(&Form::new(4, 6, 3), int(1));
    f.set(&Form::new(4, 2, 1), int(5));
    assert_eq!(hecke_coefficient(&f, HeckeOp::UQ, 2, &b), int(10));
}

#[test]
fn class_keys_are_complete_invariants() {
    let mut rng = StdRng::seed_from_u64(3);
    let m = 5;
    let classes = level_classes(-100, m, false);
    for (k, f) in &classes {
        for _ in 0..5 {
            let g = f.transform(&random_sl2(&mut rng, m));
            assert_eq!(class_key(&g, m), *k);
        }
    }
    // Distinct keys are not Γ₀(M)-equivalent by a bounded search.
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            assert!(!witness(&classes[i].1, &classes[j].1, m, 6));
        }
    }
}

#[test]
fn up_delta_and_commutation() {
    let p = 5;
    let mut f = FourierExpansion::new(p);
    let b0 = Form::new(5, 0, 1);
    f.set(&b0.scale(p), int(1));
    let g = fourier_hecke(&f, HeckeOp::UP, p);
    assert_eq!(g.coeffs.len(), 1);
    assert_eq!(g.get(&b0), int(1));
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..4 {
        let mut f = FourierExpansion::new(p);
        for d in [-100, -400, -2500, -2500 * 25, -100 * 25] {
            let cl = level_classes(d, p, false);
            for _ in 0..4 {
                let (_, b) = cl[rng.gen_range(0..cl.len())];
                f.set(&b, int(rng.gen_range(-5..6)));
            }
        }
        let a = fourier_hecke(&fourier_hecke(&f, HeckeOp::UP, p), HeckeOp::UQ, p);
        let b = fourier_hecke(&fourier_hecke(&f, HeckeOp::UQ, p), HeckeOp::UP, p);
        assert_eq!(a, b);
        // The output is a class function.
        let u = fourier_hecke(&f, HeckeOp::UQ, p);
        for (bb, v) in u.coeffs.values() {
            let moved = bb.transform(&random_sl2(&mut rng, p));
            assert_eq!(hecke_coefficient(&f, HeckeOp::UQ, p, &moved), *v);
        }
    }
}

fn random_expansion(rng: &mut StdRng, t: &CmTower, n: u32) -> FourierExpansion {
    let m = t.order_level(n.max(1));
    let mut f = FourierExpansion::new(m);
    let cl = level_classes(t.field.order_disc(t.p, n), m, false);
    for _ in 0..8 {
        let (_, b) = cl[rng.gen_range(0..cl.len())];
        f.set(&b, int(rng.gen_range(-9..10)));
    }
    for pt in &t.levels[n as usize].points {
        if rng.gen_bool(0.6) {
            f.set(&pt.s, int(rng.gen_range(-9..10)));
        }
    }
    f
}

#[test]
fn master_identity_random() {
    let mut rng = StdRng::seed_from_u64(17);
    let aq = &alpha() * &beta();
    for (d, p) in [(4, 5), (3, 7), (7, 13), (11, 5)] {
        let t = CmTower::new(d, p, 2, 1).unwrap();
        for _ in 0..5 {
            let f = random_expansion(&mut rng, &t, 2);
            assert!(master_identity(&f, &t, &aq, 1).unwrap(), "Δ={d} p={p}");
        }
    }
}

#[test]
fn norm_compatibility_for_eigen_data() {
    for (d, p) in [(4, 5), (3, 13), (7, 5), (11, 7)] {
        let t = CmTower::new(d, p, 3, 1).unwrap();
        let a_q = &int(3) * &alpha();
        let mut k = 0;
        let f = synthetic_uq_eigen(&t, 1, 3, &a_q, || {
            k += 1;
            &int(k) + &gamma()
        })
        .unwrap();
        for n in 1..=2u32 {
            let hi = theta_element(&f, &t, &a_q, n + 1).unwrap();
            let lo = theta_element(&f, &t, &a_q, n).unwrap();
            assert_eq!(theta_pushforward(&hi, &t).unwrap(), lo, "Δ={d} p={p} n={n}");
        }
        let u = fourier_hecke(&f, HeckeOp::UQ, p);
        for n in 1..=2usize {
            for pt in &t.levels[n].points {
                assert_eq!(u.get(&pt.s), &a_q * &f.get(&pt.s));
            }
        }
    }
}

#[test]
fn theta_basics_and_genus() {
    let t = CmTower::new(7, 5, 1, 1).unwrap();
    let aq = alpha();
    let z = theta_element(&FourierExpansion::new(5), &t, &aq, 1).unwrap();
    assert!(z.is_zero());
    assert!(theta_pushforward(&z, &t).unwrap().is_zero());
    let s0 = t.levels[1].points[2].s;
    let mut f = FourierExpansion::new(5);
    f.set(&s0, int(1));
    let th = theta_element(&f, &t, &aq, 1).unwrap();
    for (i, c) in th.coeffs.iter().enumerate() {
        assert_eq!(*c, if i == 2 { aq.pow(-1) } else { RatFunc::zero() });
    }
    // Genus: cosets of 𝒢² in 𝒢₁ (cyclic of order 6).
    let g = t.group(1);
    let sq = g.squares();
    let coset = |i: usize| -> usize { sq.iter().map(|&s| g.mul(i, s)).min().unwrap() };
    let mut f = FourierExpansion::new(5);
    for (_, b) in level_classes(t.field.order_disc(5, 1), 5, true) {
        if let Some(i) = g.index_of(&b) {
            f.set(&b, int(coset(i) as i64 + 1));
        }
    }
    let th = theta_element(&f, &t, &int(1), 1).unwrap();
    let mut by_coset: BTreeMap<usize, Vec<RatFunc>> = BTreeMap::new();
    for (i, c) in th.coeffs.iter().enumerate() {
        by_coset.entry(coset(i)).or_default().push(c.clone());
    }
    assert_eq!(by_coset.len(), 2);
    for v in by_coset.values() {
        assert!(v.iter().all(|c| c == &v[0]));
    }
    assert!(theta_pushforward(&ThetaElement::zero(0, 1), &t).is_err());
}

#[test]
fn stabilization() {
    let p = 5;
    let kappa = 3;
    let (ap, bp) = (alpha(), beta());
    let aq = alpha_q(&ap, &bp, kappa, p);
    let bq = beta_q(&ap, &bp, kappa, p).unwrap();
    assert!(stabilize_form(&FourierExpansion::new(p), &ap, &bp, kappa, p).unwrap().is_zero());
    let t = CmTower::new(4, p, 3, 1).unwrap();
    let mut k = 0;
    let e = synthetic_uq_eigen(&t, 1, 3, &aq, || {
        k += 1;
        int(k)
    })
    .unwrap();
    // (U^Q − β_Q)e = (α_Q − β_Q)e below the truncation.
    let shifted = fourier_hecke(&e, HeckeOp::UQ, p).sub(&e.scale(&bq));
    for n in 1..=2usize {
        for pt in &t.levels[n].points {
            assert_eq!(shifted.get(&pt.s), &(&aq - &bq) * &e.get(&pt.s));
        }
    }
    // Joint eigen data: c_{pʲB} = α_Pʲ c_B.
    let mut f = FourierExpansion::new(p);
    for (b, v) in e.coeffs.values() {
        for j in 0..=3u32 {
            f.set(&b.scale(p.pow(j)), v * &ap.pow(j as i32));
        }
    }
    let c = int(p).pow(2 * kappa - 3);
    let scalar = &(&(&(&(&aq - &bq) * &(&ap - &bp)) * &(&ap - &(&c * &bp.inv().unwrap()))) * &(&ap - &(&c * &ap.inv().unwrap())))
        / &(&ap.pow(3) * &aq);
    for n in 1..=2usize {
        for pt in &t.levels[n].points {
            let v = stabilized_coefficient(&f, &ap, &bp, kappa, p, &pt.s).unwrap();
            assert_eq!(v, &scalar * &f.get(&pt.s));
        }
    }
    // Integrality shadow on a random integral expansion.
    let mut rng = StdRng::seed_from_u64(2);
    let mut g = FourierExpansion::new(p);
    for d in [-100i64, -2500] {
        let cl = level_classes(d, p, false);
        for _ in 0..5 {
            let (_, b) = cl[rng.gen_range(0..cl.len())];
            g.set(&b, int(rng.gen_range(-5..6)));
            g.set(&b.scale(p), int(rng.gen_range(-5..6)));
        }
    }
    let st = stabilize_form(&g, &ap, &bp, kappa, p).unwrap();
    assert!(!st.is_zero());
    for (b, v) in st.coeffs.values() {
        assert!((v * &ap.pow(3)).is_laurent(), "{b}: {v}");
        assert_eq!(*v, stabilized_coefficient(&g, &ap, &bp, kappa, p, b).unwrap());
    }
}

#[test]
fn coefficient_file() {
    let f = FourierExpansion::parse("# c_B\n1 0 25 3\n2 2 13 a*b - 1\n", 5).unwrap();
    assert_eq!(f.get(&Form::new(1, 0, 25)), int(3));
    assert_eq!(f.get(&Form::new(2, 2, 13)), &(&alpha() * &beta()) - &int(1));
    assert!(FourierExpansion::parse("1 0\n", 5).is_err());
    assert!(FourierExpansion::parse("1 5 1 2\n", 5).is_err());
}

proptest! {
    #[test]
    fn key_invariance(a in 1i64..30, b in -30i64..30, c in 1i64..30, seed in 0u64..1000, m in prop::sample::select(vec![1i64, 2, 5, 7, 13, 35])) {
        let f = Form::new(a, b, c);
        prop_assume!(f.disc() < 0);
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_sl2(&mut rng, m);
        prop_assert_eq!(class_key(&f.transform(&g), m), class_key(&f, m));
    }

    #[test]
    fn cocycle_property(seed in 0u64..200) {
        let t = CmTower::new(7, 5, 2, 1).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let g = t.group(2);
        let (i, j) = (rng.gen_range(0..g.order()), rng.gen_range(0..g.order()));
        let p1 = galois_translate(&t.field, &t.levels[2].points[i], &g.elements[j]).unwrap();
        prop_assert_eq!(p1.key(), t.levels[2].points[g.mul(i, j)].key());
    }
}
