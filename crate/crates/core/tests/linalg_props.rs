use std::collections::HashSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use rmlkit_core::field::GaloisField;
use rmlkit_core::linalg::{
    enumerate_subspaces, gaussian_binomial, gl_order, visit_projective, Matrix, Subspace, SubspaceEnumerator,
};

fn f3() -> GaloisField {
    GaloisField::new(3, 1).unwrap()
}

/// Every vector of the row space, by summing all coefficient combinations.
fn span_size(m: &Matrix, f: &GaloisField) -> usize {
    let q = f.order() as usize;
    let mut seen = HashSet::new();
    for idx in 0..q.pow(m.rows() as u32) {
        let mut v = vec![0u32; m.cols()];
        let mut x = idx;
        for r in 0..m.rows() {
            let c = (x % q) as u32;
            x /= q;
            for (j, e) in v.iter_mut().enumerate() {
                *e = f.add(*e, f.mul(c, m.get(r, j)));
            }
        }
        seen.insert(v);
    }
    seen.len()
}

fn matrix_strategy(rows: usize, cols: usize, order: u32) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(0..order, rows * cols).prop_map(move |d| Matrix::from_flat(rows, cols, d))
}

proptest! {
    #[test]
    fn rank_matches_span_size(m in matrix_strategy(3, 4, 3)) {
        let f = f3();
        let r = m.rank(&f);
        prop_assert_eq!(span_size(&m, &f), 3usize.pow(r as u32));
    }

    #[test]
    fn rref_is_idempotent(m in matrix_strategy(4, 5, 5)) {
        let f = GaloisField::new(5, 1).unwrap();
        let r = m.rref(&f);
        prop_assert_eq!(r.rref(&f), r);
    }

    #[test]
    fn modular_law_in_f3_4(a in matrix_strategy(2, 4, 3), b in matrix_strategy(3, 4, 3)) {
        let f = f3();
        let x = Subspace::span(&a, &f);
        let y = Subspace::span(&b, &f);
        let j = x.join(&y, &f).unwrap();
        let m = x.meet(&y, &f).unwrap();
        prop_assert_eq!(j.dim() + m.dim(), x.dim() + y.dim());
        prop_assert!(m.is_subspace_of(&x, &f) && m.is_subspace_of(&y, &f));
        prop_assert!(x.is_subspace_of(&j, &f) && y.is_subspace_of(&j, &f));
    }
}

#[test]
fn modular_law_on_1000_seeded_pairs() {
    use rand::{Rng, SeedableRng};
    let f = f3();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let ra = rng.gen_range(0..=4);
        let rb = rng.gen_range(0..=4);
        let a = Matrix::from_flat(ra, 4, (0..ra * 4).map(|_| rng.gen_range(0..3)).collect());
        let b = Matrix::from_flat(rb, 4, (0..rb * 4).map(|_| rng.gen_range(0..3)).collect());
        let x = Subspace::span(&a, &f);
        let y = Subspace::span(&b, &f);
        let j = x.join(&y, &f).unwrap();
        let m = x.meet(&y, &f).unwrap();
        assert_eq!(j.dim() + m.dim(), x.dim() + y.dim());
    }
}

#[test]
fn enumeration_counts_and_distinctness() {
    for order in [2u32, 3, 4] {
        let f = GaloisField::new(if order == 3 { 3 } else { 2 }, if order == 4 { 2 } else { 1 }).unwrap();
        for n in 0..=5usize {
            if order > 2 && n == 5 {
                continue;
            }
            for k in 0..=n {
                let all = enumerate_subspaces(n, k, &f);
                let distinct: HashSet<_> = all.iter().map(|s| s.basis().data().to_vec()).collect();
                assert_eq!(distinct.len(), all.len());
                assert_eq!(
                    BigUint::from(all.len()),
                    gaussian_binomial(n as u32, k as u32, order as u64),
                    "n={n} k={k} q={order}"
                );
                for s in &all {
                    assert_eq!(s.basis().rref(&f), *s.basis());
                    assert_eq!(s.dim(), k);
                }
            }
        }
    }
    // n = 5 over F_3 and F_4, counted without materializing.
    for (order, n) in [(3u32, 5usize), (4, 5)] {
        for k in 0..=n {
            let mut c = 0u64;
            SubspaceEnumerator::new(n, k, order).visit_all(|_| c += 1);
            assert_eq!(BigUint::from(c), gaussian_binomial(n as u32, k as u32, order as u64));
        }
    }
}

#[test]
fn planes_of_f16_4() {
    let mut c = 0u64;
    SubspaceEnumerator::new(4, 2, 16).visit_all(|_| c += 1);
    assert_eq!(c, 70161);
    assert_eq!(gaussian_binomial(4, 2, 16), BigUint::from(70161u32));
}

#[test]
fn small_known_values() {
    assert_eq!(gaussian_binomial(4, 2, 2), BigUint::from(35u32));
    assert_eq!(gl_order(4, 2), BigUint::from(20160u32));
    let f = GaloisField::new(2, 1).unwrap();
    assert_eq!(enumerate_subspaces(3, 1, &f).len(), 7);
    assert_eq!(enumerate_subspaces(4, 2, &f).len(), 35);
    let id = Matrix::identity(3);
    assert_eq!(id.rref(&f), id);
    assert_eq!(id.rank(&f), 3);
    let z = Matrix::zeros(3, 3);
    assert_eq!(z.rank(&f), 0);
}

#[test]
fn subspace_lattice_laws_exhaustive_in_f2_3() {
    let f = GaloisField::new(2, 1).unwrap();
    let all: Vec<Subspace> = (0..=3).flat_map(|k| enumerate_subspaces(3, k, &f)).collect();
    assert_eq!(all.len(), 16);
    for a in &all {
        assert_eq!(a.join(a, &f).unwrap(), *a);
        assert_eq!(a.meet(a, &f).unwrap(), *a);
        for b in &all {
            let j = a.join(b, &f).unwrap();
            let m = a.meet(b, &f).unwrap();
            assert_eq!(j, b.join(a, &f).unwrap());
            assert_eq!(m, b.meet(a, &f).unwrap());
            // Absorption.
            assert_eq!(a.join(&m, &f).unwrap(), *a);
            assert_eq!(a.meet(&j, &f).unwrap(), *a);
            for c in &all {
                assert_eq!(j.join(c, &f).unwrap(), a.join(&b.join(c, &f).unwrap(), &f).unwrap());
                assert_eq!(m.meet(c, &f).unwrap(), a.meet(&b.meet(c, &f).unwrap(), &f).unwrap());
            }
        }
    }
}

#[test]
fn projective_representatives_are_normalized() {
    let mut seen = HashSet::new();
    visit_projective(3, 4, |c| {
        let lead = c.iter().find(|&&x| x != 0).copied();
        assert_eq!(lead, Some(1));
        seen.insert(c.to_vec());
    });
    assert_eq!(seen.len(), 21);
}

#[test]
fn text_form_round_trips() {
    let f = GaloisField::new(2, 4).unwrap();
    for s in enumerate_subspaces(3, 2, &f).iter().step_by(17) {
        assert_eq!(Subspace::from_text(&s.to_text(), &f).unwrap(), *s);
    }
}
