//! Randomized invariants across modules.

use std::f64::consts::PI;

use maasslift::arith::{
    fundamental_discriminants, is_fundamental, kronecker, l_value_neg, rint, to_f64, Rational,
};
use maasslift::bqf::{enumerate_classes, genus_character, heegner_point, mat_mul, BQForm, Mat2};
use maasslift::hecke::{hecke_half, hecke_integral};
use maasslift::numerics::{gamma, kloosterman_half, kloosterman_row};
use maasslift::qseries::{
    plus_allowed, principal_from, weakly_holo_integral_basis, weakly_holo_plus_basis,
};
use maasslift::{Level, QSeries};
use proptest::prelude::*;

fn series(tw: i32) -> impl Strategy<Value = QSeries> {
    (prop::collection::vec(-20i64..20, 14), -3i64..0).prop_map(move |(cs, lo)| {
        let it = cs.into_iter().enumerate().map(|(i, c)| (lo + i as i64, rint(c)));
        QSeries::from_coeffs(tw, Level::Sl2z, false, 10, it).unwrap()
    })
}

fn sl2z() -> impl Strategy<Value = Mat2> {
    prop::collection::vec(-3i128..=3, 1..5).prop_map(|ns| {
        let mut g: Mat2 = [[1, 0], [0, 1]];
        for n in ns {
            g = mat_mul(&g, &[[1, n], [0, 1]]).unwrap();
            g = mat_mul(&g, &[[0, -1], [1, 0]]).unwrap();
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ring_laws(a in series(4), b in series(4), c in series(8)) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&c).unwrap(), c.mul(&a).unwrap());
        let left = a.add(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let assoc1 = a.mul(&b).unwrap().mul(&c).unwrap();
        let assoc2 = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(assoc1, assoc2);
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn json_round_trip(a in series(-6)) {
        prop_assert_eq!(QSeries::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn bqf_action_preserves_discriminant_and_class(i in 0usize..40, g in sl2z(), h in sl2z(), disc in prop::sample::select(vec![-23i64, -47, -56, -84, 5, 12, 13, 40, 60, 85])) {
        let cs = enumerate_classes(disc).unwrap();
        let q = cs.reps[i % cs.reps.len()];
        let qg = q.act(&g).unwrap();
        prop_assert_eq!(qg.disc(), disc);
        // the action is a right action
        prop_assert_eq!(qg.act(&h).unwrap(), q.act(&mat_mul(&g, &h).unwrap()).unwrap());
        if disc < 0 {
            let (z, w) = heegner_point(&q).unwrap();
            let (zg, wg) = heegner_point(&qg).unwrap();
            prop_assert_eq!(w, wg);
            // the Heegner points differ by the inverse of g
            let ginv: Mat2 = [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]];
            prop_assert!((maasslift::bqf::mobius(&ginv, z) - zg).norm() < 1e-9 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn genus_character_is_multiplicative_in_d1(i in 0usize..40, g in sl2z()) {
        // 60 = (−3)(−20) = 5·12 = (−15)(−4)
        let q = {
            let cs = enumerate_classes(60).unwrap();
            cs.reps[i % cs.reps.len()].act(&g).unwrap()
        };
        let a = genus_character(&q, -3, -20).unwrap();
        let b = genus_character(&q, 5, 12).unwrap();
        let c = genus_character(&q, -15, -4).unwrap();
        // the product belongs to d1 = (−3)·5·(−15) = 15², which is trivial
        prop_assert_eq!(a * b * c, 1);
    }

    #[test]
    fn kloosterman_symmetries(c in 1u64..40, m in -40i64..40, n in -40i64..40, tw in prop::sample::select(vec![5i32, 13, -1, -3])) {
        prop_assume!(plus_allowed(tw, m) && plus_allowed(tw, n));
        let k = kloosterman_half(tw, m, n, c);
        let swapped = kloosterman_half(tw, n, m, c);
        prop_assert!((k - swapped).norm() < 1e-9);
        let shifted = kloosterman_half(tw, m + 4 * c as i64, n, c);
        prop_assert!((k - shifted).norm() < 1e-9);
        prop_assert!((kloosterman_row(tw, m, c).eval(n) - k).norm() < 1e-9);
        prop_assert!(k.im.abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn hecke_commutes_in_integral_weight(m in 1i64..4, two_k in prop::sample::select(vec![4i64, 6, 10])) {
        let f = weakly_holo_integral_basis(two_k, m, 60).unwrap();
        let a = hecke_integral(&hecke_integral(&f, 2).unwrap(), 3).unwrap();
        let b = hecke_integral(&hecke_integral(&f, 3).unwrap(), 2).unwrap();
        let h = a.horizon().min(b.horizon());
        prop_assert!(a.agrees_to(&b, h).unwrap());
    }

    #[test]
    fn hecke_half_commutes_and_keeps_plus(c1 in -3i64..4, c2 in -3i64..4, tw in prop::sample::select(vec![5i32, 7, -1])) {
        prop_assume!(c1 != 0 || c2 != 0);
        let s = if ((tw - 1) / 2) % 2 == 0 { 1 } else { -1 };
        let e1 = -(if s == 1 { 3 } else { 4 });
        let e2 = -(if s == 1 { 4 } else { 7 });
        let e1 = if plus_allowed(tw, e1) { e1 } else { -4 };
        let e2 = if plus_allowed(tw, e2) { e2 } else { -8 };
        let pp = principal_from([(e1, rint(c1)), (e2, rint(c2))].into_iter().filter(|(_, c)| *c != rint(0))).unwrap();
        let f = weakly_holo_plus_basis(tw, &pp, 4 * 9 * 6).unwrap();
        let a = hecke_half(&hecke_half(&f, 2).unwrap(), 3).unwrap();
        let b = hecke_half(&hecke_half(&f, 3).unwrap(), 2).unwrap();
        let h = a.horizon().min(b.horizon());
        prop_assert!(a.agrees_to(&b, h).unwrap());
        prop_assert!(a.check_plus());
        prop_assert!(hecke_half(&f, 5).unwrap().check_plus());
    }
}

/// 2h(D)/w(D) from class enumeration against L_D(0) from Bernoulli numbers.
#[test]
fn class_numbers_match_l_values() {
    for d in fundamental_discriminants(-2000, -3) {
        let h = enumerate_classes(d).unwrap().reps.len() as i64;
        let w = match d {
            -3 => 6,
            -4 => 4,
            _ => 2,
        };
        assert_eq!(l_value_neg(d, 1).unwrap(), Rational::new((2 * h).into(), w.into()), "D = {d}");
    }
    // frozen values
    for (d, h) in [(-23i64, 3usize), (-47, 5), (-71, 7), (-163, 1), (-420, 8)] {
        assert!(is_fundamental(d));
        assert_eq!(enumerate_classes(d).unwrap().reps.len(), h, "h({d})");
    }
}

/// Hurwitz class numbers from forms of all contents: H(3) = 1/3, H(4) = 1/2, H(12) = 4/3, H(15) = 2, H(16) = 3/2.
#[test]
fn hurwitz_class_numbers() {
    let hurwitz = |n: i64| -> f64 {
        let cs = enumerate_classes(-n).unwrap();
        cs.reps.iter().map(|q| 1.0 / heegner_point(q).unwrap().1 as f64).sum()
    };
    for (n, want) in [(3i64, 1.0 / 3.0), (4, 0.5), (7, 1.0), (8, 1.0), (11, 1.0), (12, 4.0 / 3.0), (15, 2.0), (16, 1.5), (20, 2.0), (23, 3.0)] {
        assert!((hurwitz(n) - want).abs() < 1e-12, "H({n}) = {}", hurwitz(n));
    }
}

/// L_D(1−k) against the functional equation and a direct partial sum of L_D(k).
#[test]
fn l_values_against_functional_equation() {
    for d in fundamental_discriminants(-60, 60) {
        if d == 1 {
            continue;
        }
        let f = d.unsigned_abs() as f64;
        for k in 2usize..7 {
            let even = d > 0;
            if even != (k % 2 == 0) {
                assert_eq!(l_value_neg(d, k).unwrap(), rint(0));
                continue;
            }
            let lk: f64 = (1..200_000i64).map(|n| kronecker(d, n) as f64 / (n as f64).powi(k as i32)).sum();
            let trig = if even { (PI * k as f64 / 2.0).cos() } else { (PI * k as f64 / 2.0).sin() };
            let want = 2.0 * gamma(k as f64) * f.powf(k as f64 - 0.5) / (2.0 * PI).powi(k as i32) * trig * lk;
            let got = to_f64(&l_value_neg(d, k).unwrap());
            assert!((got - want).abs() <= 1e-6 * want.abs().max(1e-3), "L_{d}(1-{k}) = {got} vs {want}");
        }
    }
}

#[test]
fn genus_character_values() {
    // discriminant −20 = (−4)(5): the two classes [1,0,5], [2,2,3] have χ = 1, −1
    let q1 = BQForm::new(1, 0, 5).unwrap();
    let q2 = BQForm::new(2, 2, 3).unwrap();
    assert_eq!(genus_character(&q1, -4, 5).unwrap(), 1);
    assert_eq!(genus_character(&q2, -4, 5).unwrap(), -1);
    assert_eq!(genus_character(&q2, 5, -4).unwrap(), -1);
}
