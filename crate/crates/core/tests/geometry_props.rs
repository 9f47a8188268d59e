use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmlkit_core::field::FieldTower;
use rmlkit_core::geometry::{
    classify_translation_hyperovals, hyperoval_from_function, is_hyperoval, is_scattered_pair, line_intersection_profile,
    linear_set, scattered_mrd_exhaustive, scattered_mrd_sampled, ProjectivePoint,
};
use rmlkit_core::qpoly::QPolynomial;
use rmlkit_core::Error;

fn tower(q: u32, m: u32) -> Arc<FieldTower> {
    FieldTower::for_q(q, m).unwrap()
}

fn independent_generators(t: &FieldTower, rank: usize, rng: &mut ChaCha8Rng) -> Vec<[u32; 2]> {
    loop {
        let g: Vec<[u32; 2]> = (0..rank)
            .map(|_| [rng.gen_range(0..t.big_order()), rng.gen_range(0..t.big_order())])
            .collect();
        if linear_set(t, &g).is_ok() {
            return g;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_formula_holds(seed in any::<u64>(), shape in 0usize..4) {
        let (q, m, rank) = [(2, 4, 4), (2, 4, 6), (3, 3, 3), (3, 3, 4)][shape];
        let t = tower(q, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = independent_generators(&t, rank, &mut rng);
        let r = linear_set(&t, &g).unwrap();
        prop_assert_eq!(r.mass(q as u64), (q as u64).pow(rank as u32) - 1);
        prop_assert!(r.points.iter().all(|(_, w)| *w >= 1 && *w <= m as usize));
        prop_assert_eq!(r.scattered, r.points.len() as u64 == ((q as u64).pow(rank as u32) - 1) / (q as u64 - 1));
    }
}

/// Scatteredness straight from the definition: two nonzero images that are
/// `F_{q^m}`-proportional must be `F_q`-proportional.
fn scattered_by_definition(f1: &QPolynomial, f2: &QPolynomial) -> bool {
    let t = f1.tower();
    let big = t.big();
    let imgs: Vec<(u32, u32)> = (1..t.big_order()).map(|x| (f1.eval(x), f2.eval(x))).collect();
    let scalars: Vec<u32> = (0..t.q()).map(|c| t.embed(c)).collect();
    for (i, u) in imgs.iter().enumerate() {
        for v in &imgs[i + 1..] {
            if big.mul(u.0, v.1) != big.mul(u.1, v.0) {
                continue;
            }
            if !scalars.iter().any(|&c| (big.mul(c, u.0), big.mul(c, u.1)) == *v) {
                return false;
            }
        }
    }
    true
}

#[test]
fn scattered_check_agrees_with_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (q, m) in [(2, 3), (2, 4), (3, 3)] {
        let t = tower(q, m);
        let mut checked = 0;
        while checked < 200 {
            let f1 = QPolynomial::new(&t, (0..m).map(|_| rng.gen_range(0..t.big_order())).collect()).unwrap();
            let f2 = QPolynomial::new(&t, (0..m).map(|_| rng.gen_range(0..t.big_order())).collect()).unwrap();
            match is_scattered_pair(&f1, &f2) {
                Ok(s) => {
                    assert_eq!(s, scattered_by_definition(&f1, &f2), "{f1} / {f2}");
                    checked += 1;
                }
                Err(Error::DegenerateSubspace(..)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn frobenius_graphs() {
    let t = tower(2, 3);
    let x = QPolynomial::identity(&t);
    let xq = QPolynomial::monomial(&t, 1, 1);
    let r = linear_set(&t, &rmlkit_core::geometry::pair_generators(&x, &xq).unwrap()).unwrap();
    assert!(r.scattered);
    assert_eq!(r.points.len(), 7);

    let t = tower(2, 4);
    let x = QPolynomial::identity(&t);
    let xq2 = QPolynomial::monomial(&t, 1, 2);
    assert!(!is_scattered_pair(&x, &xq2).unwrap());
    assert!(is_scattered_pair(&x, &QPolynomial::monomial(&t, 1, 1)).unwrap());
    // Every image lies on the point (1, 0).
    assert!(!is_scattered_pair(&x, &QPolynomial::zero(&t)).unwrap());
    assert!(matches!(
        is_scattered_pair(&QPolynomial::zero(&t), &QPolynomial::zero(&t)),
        Err(Error::DegenerateSubspace(0, 4))
    ));
}

#[test]
fn bridge_exhaustive_f8() {
    let r = scattered_mrd_exhaustive(&tower(2, 3)).unwrap();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    assert!(r.pairs_tested > 0 && r.scattered_and_mrd > 0 && r.neither > 0);
    // 512 polynomials give C(512, 2) unordered pairs.
    assert_eq!(r.pairs_tested + r.skipped_degenerate + r.skipped_dependent, 512 * 511 / 2);
}

#[test]
fn bridge_sampled_q2_and_q3() {
    for q in [2, 3] {
        let r = scattered_mrd_sampled(&tower(q, 4), 1000, 17).unwrap();
        assert_eq!(r.pairs_tested, 1000);
        assert!(r.violations.is_empty(), "q={q}: {:?}", r.violations);
        assert!(r.scattered_and_mrd > 0);
    }
    assert!(matches!(
        scattered_mrd_exhaustive(&tower(2, 4)),
        Err(Error::ResourceBudgetExceeded { .. })
    ));
}

fn assert_two_or_zero(points: &[ProjectivePoint], t: &FieldTower) {
    let profile = line_intersection_profile(points, t.big());
    let q = t.big_order() as usize;
    assert_eq!(profile.len(), q * q + q + 1);
    assert!(profile.values().all(|&c| c == 0 || c == 2));
}

#[test]
fn translation_hyperovals_q4_q8_q16() {
    for (h, expected) in [(2u32, 3usize), (3, 14), (4, 30)] {
        let r = classify_translation_hyperovals(h).unwrap();
        assert_eq!(r.hyperovals_found.len(), expected, "h={h}");
        assert!(r.prediction_match);
        assert_eq!(r.tested, 1 << (h * h));
        let t = FieldTower::new(2, 1, h).unwrap();
        for c in &r.hyperovals_found {
            let pts = hyperoval_from_function(&QPolynomial::new(&t, c.clone()).unwrap()).unwrap();
            assert_two_or_zero(&pts, &t);
        }
    }
}

#[test]
fn single_hyperoval_checks() {
    let t = FieldTower::new(2, 1, 2).unwrap();
    let conic = hyperoval_from_function(&QPolynomial::monomial(&t, 1, 1)).unwrap();
    assert!(is_hyperoval(&conic, t.big()));
    assert_two_or_zero(&conic, &t);
    let line = hyperoval_from_function(&QPolynomial::identity(&t)).unwrap();
    assert!(!is_hyperoval(&line, t.big()));

    let t = FieldTower::new(2, 1, 4).unwrap();
    let h4 = hyperoval_from_function(&QPolynomial::monomial(&t, 1, 2)).unwrap();
    assert!(!is_hyperoval(&h4, t.big()));
    let profile = line_intersection_profile(&h4, t.big());
    assert!(profile.values().any(|&c| c > 2));
}

#[test]
fn binary_plane_sweep_disagrees_with_prediction() {
    let r = classify_translation_hyperovals(1).unwrap();
    assert!(r.predicted.is_empty());
    assert_eq!(r.tested, 2);
    // Over F_2 the identity graph plus the two points at infinity is a
    // 4-arc, which is a hyperoval of PG(2, 2).
    assert_eq!(r.hyperovals_found, vec![vec![1]]);
    assert!(!r.prediction_match);
}
