use std::collections::BTreeMap;

use num_bigint::BigInt;
use rmlkit_core::field::GaloisField;
use rmlkit_core::lattice::{
    build_lattice, build_lattice_with_budget, closed_formula_i2m3, recursion_base, subspace_lattice_whitney,
    verify_whitney, whitney_recursion, LatticeParams, RankMetricLattice,
};
use rmlkit_core::linalg::{gaussian_binomial, Matrix};
use rmlkit_core::Error;

fn params(i: u32, n: u32, m: u32, q: u32) -> LatticeParams {
    LatticeParams::new(i, n, m, q).unwrap()
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `m × n` binary matrices of rank at most `r`, counted by brute force.
fn binary_matrices_of_rank_at_most(m: usize, n: usize, r: usize) -> u64 {
    let f = GaloisField::new(2, 1).unwrap();
    (0..1u32 << (m * n))
        .filter(|&idx| {
            let d = (0..m * n).map(|b| (idx >> b) & 1).collect();
            Matrix::from_flat(m, n, d).rank(&f) <= r
        })
        .count() as u64
}

#[test]
fn l2_4_3_2_against_rank_count() {
    let l = build_lattice(params(2, 4, 3, 2)).unwrap();
    // A vector of F_8^4 is a 3×4 binary matrix; its point has 7 scalar multiples.
    let light = binary_matrices_of_rank_at_most(3, 4, 2) - 1;
    assert_eq!(light, 105 + 1470);
    assert_eq!(l.layer_sizes()[1] as u64, light / 7);
    assert_eq!(l.whitney().first_kind, ints(&[1, -225, 11680, -89280, 77824]));
    assert!(l.whitney().invariant_violations().is_empty());
    assert_eq!(l.mobius_identity_violations(), 0);
}

#[test]
fn full_lattices_match_subspace_formula() {
    for (p, big_q) in [(params(2, 3, 2, 2), 4u64), (params(2, 2, 3, 2), 8), (params(2, 2, 3, 3), 27), (params(3, 3, 2, 2), 4)] {
        assert!(p.is_full());
        let l = build_lattice(p).unwrap();
        let sizes: Vec<usize> = (0..=p.n)
            .map(|k| gaussian_binomial(p.n, k, big_q).try_into().unwrap())
            .collect();
        assert_eq!(l.layer_sizes(), sizes, "{p}");
        let w = l.whitney();
        for j in 0..=p.n {
            assert_eq!(w.first_kind[j as usize], subspace_lattice_whitney(p.n, j, big_q), "{p} j={j}");
        }
    }
}

#[test]
fn atoms_of_planes() {
    for q in [2u32, 3] {
        for m in [2u32, 3] {
            let big_q = (q as usize).pow(m);
            let full = build_lattice(params(2, 2, m, q)).unwrap();
            assert_eq!(full.layer_sizes()[1], big_q + 1);
            // Rank-one points of F_{q^m}^2 are the q + 1 points of PG(1, q).
            let thin = build_lattice(params(1, 2, m, q)).unwrap();
            assert_eq!(thin.layer_sizes(), vec![1, q as usize + 1, 1]);
        }
    }
}

#[test]
fn mobius_and_invariants_on_several_lattices() {
    for p in [params(1, 3, 2, 2), params(1, 3, 3, 2), params(1, 4, 2, 2), params(2, 3, 3, 2), params(1, 3, 2, 3)] {
        let l = build_lattice(p).unwrap();
        assert_eq!(l.mobius_identity_violations(), 0, "{p}");
        let w = l.whitney();
        assert!(w.invariant_violations().is_empty(), "{p}: {:?}", w.invariant_violations());
        assert_eq!(w.characteristic_polynomial_at(1), BigInt::from(0));
    }
}

#[test]
fn semimodular_on_ten_thousand_pairs() {
    let l = build_lattice(params(2, 4, 3, 2)).unwrap();
    let r = l.check_semimodularity(10_000, 1);
    assert_eq!(r.samples, 10_000);
    assert_eq!((r.closure_failures, r.meet_failures, r.semimodularity_failures), (0, 0, 0));
}

#[test]
fn every_element_is_spanned_by_its_atoms() {
    for p in [params(1, 3, 2, 2), params(1, 3, 3, 2), params(2, 4, 3, 2)] {
        let l = build_lattice(p).unwrap();
        for (d, &size) in l.layer_sizes().iter().enumerate() {
            for idx in 0..size {
                let x = l.element(d, idx);
                assert_eq!(l.interior(&x), x, "{p}");
            }
        }
    }
}

#[test]
fn intervals_match_their_support_lattices() {
    for p in [params(1, 4, 2, 2), params(2, 4, 3, 2)] {
        let l = build_lattice(p).unwrap();
        let checks = l.check_interval_self_similarity(40, 5);
        assert!(checks.iter().all(|c| c.matches), "{p}: {checks:?}");
        assert!(checks.iter().any(|c| c.support_dim < p.n as usize));
    }
}

#[test]
fn cache_round_trip_and_rejects_corruption() {
    let l = build_lattice(params(2, 4, 3, 2)).unwrap();
    let dir = std::env::temp_dir().join(format!("rmlkit-lattice-props-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("l.lattice");
    l.save_cache(&path).unwrap();
    let back = RankMetricLattice::load_cache(&path).unwrap();
    assert_eq!(back.params(), l.params());
    assert_eq!(back.whitney(), l.whitney());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.trim_end().trim_end_matches("end")).unwrap();
    assert!(matches!(RankMetricLattice::load_cache(&path), Err(Error::Parse(_))));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn recursion_matches_brute_force_on_l2_5_3_2() {
    let p = params(2, 5, 3, 2);
    let l = build_lattice(p).unwrap();
    assert_eq!(l.mobius_identity_violations(), 0);
    for j in [1u32, 2] {
        let base = recursion_base(&p, j).unwrap();
        assert_eq!(whitney_recursion(&p, j, &base).unwrap(), l.whitney_first(j as usize), "j={j}");
    }
    assert_eq!(l.whitney_first(1), BigInt::from(-961));
    let r = verify_whitney(&l, 1).unwrap();
    assert!(r.agreements.contains(&"recursion".to_string()));
    // The printed closed form disagrees at j = 1.
    assert_eq!(r.closed_formula.as_deref(), Some("3720"));
    assert!(r.has_mismatch());
}

#[test]
fn recursion_requires_n_above_ij() {
    let p = params(2, 4, 3, 2);
    let base = BTreeMap::from([(1, BigInt::from(-1)), (2, BigInt::from(-9))]);
    assert!(matches!(whitney_recursion(&p, 2, &base), Err(Error::InvalidParameter(_))));
}

#[test]
fn closed_formula_values() {
    assert_eq!(closed_formula_i2m3(4, 1, 2).unwrap(), BigInt::from(360));
    // Hand evaluation of the two-term n = 6 form at j = 2, q = 2:
    // −[6,3]_2 [5,1]_8 (8−2)(8−4) + (64−2)(64−4)(64−16)(64−32).
    let first = -1395i64 * 4681 * 6 * 4;
    let second = 62i64 * 60 * 48 * 32;
    assert_eq!(closed_formula_i2m3(6, 2, 2).unwrap(), BigInt::from(first + second));
    let l = build_lattice(params(2, 4, 3, 2)).unwrap();
    let r = verify_whitney(&l, 1).unwrap();
    assert_eq!(r.brute_force, "-225");
    assert_eq!(r.discrepancies.len(), 1);
    assert_eq!(r.discrepancies[0].value, "360");
}

#[test]
fn oversized_builds_are_refused() {
    assert!(matches!(
        build_lattice_with_budget(params(2, 4, 3, 2), 1000),
        Err(Error::ResourceBudgetExceeded { .. })
    ));
    assert!(matches!(LatticeParams::new(0, 3, 2, 2), Err(Error::InvalidParameter(_))));
    assert!(matches!(LatticeParams::new(4, 3, 2, 2), Err(Error::InvalidParameter(_))));
}
