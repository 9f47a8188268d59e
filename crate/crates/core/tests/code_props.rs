use std::sync::Arc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmlkit_core::code::{
    code_automorphism_count, gabidulin, linear_automorphism_count, one_weight_code, rank_weight, support,
    twisted_gabidulin, AutMode, PolyCode, RankMetricCode, TwistVariant,
};
use rmlkit_core::field::FieldTower;
use rmlkit_core::linalg::{enumerate_subspaces, Matrix, Subspace};
use rmlkit_core::qpoly::QPolynomial;
use rmlkit_core::Error;

fn tower(q: u32, m: u32) -> Arc<FieldTower> {
    FieldTower::for_q(q, m).unwrap()
}

/// Decodes `idx` into `n` entries of `F_{q^m}`.
fn vector(idx: u32, n: usize, order: u32) -> Vec<u32> {
    (0..n).map(|i| (idx / order.pow(i as u32)) % order).collect()
}

/// Minimum rank over all `Q^k − 1` nonzero codewords (no projective shortcut).
fn naive_min_distance(t: &FieldTower, rows: &[Vec<u32>]) -> usize {
    let big = t.big();
    let q = big.order();
    let n = rows[0].len();
    let k = rows.len();
    (1..q.pow(k as u32))
        .map(|idx| {
            let c = vector(idx, k, q);
            let w: Vec<u32> = (0..n)
                .map(|j| (0..k).fold(0, |acc, r| big.add(acc, big.mul(c[r], rows[r][j]))))
                .collect();
            rank_weight(t, &w)
        })
        .min()
        .unwrap()
}

#[test]
fn rank_weight_examples() {
    let t = tower(2, 3);
    assert_eq!(rank_weight(&t, &[0, 0, 0]), 0);
    assert_eq!(rank_weight(&t, &[1, 0, 0]), 1);
    // α = x generates F_8 over F_2.
    assert_eq!(rank_weight(&t, &[1, 2, 4]), 3);
}

#[test]
fn rank_weight_scalar_invariance_exhaustive() {
    let t = tower(2, 3);
    let big = t.big();
    for idx in 0..8u32.pow(4) {
        let v = vector(idx, 4, 8);
        let w = rank_weight(&t, &v);
        for lam in 1..8 {
            let lv: Vec<u32> = v.iter().map(|&x| big.mul(lam, x)).collect();
            assert_eq!(rank_weight(&t, &lv), w);
        }
    }
}

#[test]
fn support_of_a_word_has_rank_dimension() {
    let t = tower(2, 3);
    let big = t.big();
    for idx in 0..8u32.pow(4) {
        let v = vector(idx, 4, 8);
        let x = Subspace::span_rows(std::slice::from_ref(&v), 4, big);
        assert_eq!(support(&t, &x).dim(), rank_weight(&t, &v));
    }
    let e1 = Subspace::span_rows(&[vec![1, 0, 0, 0]], 4, big);
    assert_eq!(support(&t, &e1), Subspace::span_rows(&[vec![1, 0, 0, 0]], 4, t.small()));
}

#[test]
fn support_is_additive_on_random_pairs() {
    let t = tower(2, 3);
    let big = t.big();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let a: Vec<Vec<u32>> = (0..rng.gen_range(1..3)).map(|_| (0..4).map(|_| rng.gen_range(0..8)).collect()).collect();
        let b: Vec<Vec<u32>> = (0..rng.gen_range(1..3)).map(|_| (0..4).map(|_| rng.gen_range(0..8)).collect()).collect();
        let x = Subspace::span_rows(&a, 4, big);
        let y = Subspace::span_rows(&b, 4, big);
        let lhs = support(&t, &x.join(&y, big).unwrap());
        let rhs = support(&t, &x).join(&support(&t, &y), t.small()).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn singleton_bound_and_distance_oracle_on_every_code_in_f8_3() {
    let t = tower(2, 3);
    for k in 1..=3 {
        for s in enumerate_subspaces(3, k, t.big()) {
            let rows: Vec<Vec<u32>> = s.basis().row_iter().map(|r| r.to_vec()).collect();
            let c = RankMetricCode::from_subspace(&t, s).unwrap();
            let d = c.min_distance();
            assert!(d <= 3 - k + 1);
            assert_eq!(d, naive_min_distance(&t, &rows));
            assert_eq!(c.is_mrd().unwrap(), d == 3 - k + 1);
        }
    }
}

#[test]
fn distance_examples() {
    let t = tower(2, 4);
    let c = RankMetricCode::from_rows(&t, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]], 4).unwrap();
    assert_eq!(c.min_distance(), 1);
    assert!(!c.is_mrd().unwrap());
    let g = gabidulin(&t, 2, 1).unwrap();
    assert_eq!(g.min_distance(), 3);
    assert!(g.is_mrd().unwrap());
    let mut projective = 0;
    g.code().visit_projective_codewords(|_| projective += 1);
    assert_eq!(projective, 17);
    for m in 2..=5 {
        let t = tower(2, m);
        assert_eq!(gabidulin(&t, 1, 1).unwrap().min_distance(), m as usize);
    }
    let t3 = tower(2, 3);
    let ow = one_weight_code(&t3, 2, 2).unwrap();
    assert_eq!(ow.min_distance(), 3);
    let wide = RankMetricCode::from_rows(&t3, &[vec![1, 0, 0, 0]], 4).unwrap();
    assert!(matches!(wide.is_mrd(), Err(Error::UnsupportedShape { .. })));
}

#[test]
fn frobenius_pairs_and_mrd() {
    let t = tower(2, 4);
    let x = QPolynomial::identity(&t);
    let xq = QPolynomial::monomial(&t, 1, 1);
    let xq2 = QPolynomial::monomial(&t, 1, 2);
    assert!(PolyCode::from_univariate(&t, &[x.clone(), xq]).unwrap().is_mrd().unwrap());
    assert!(!PolyCode::from_univariate(&t, &[x, xq2]).unwrap().is_mrd().unwrap());
}

#[test]
fn gabidulin_parameter_checks() {
    let t = tower(2, 4);
    assert!(gabidulin(&t, 2, 3).unwrap().is_mrd().unwrap());
    assert!(matches!(gabidulin(&t, 2, 2), Err(Error::InvalidParameter(_))));
}

/// Every codeword `a f1 + b f2` has evaluation rank equal to its q-polynomial rank.
#[test]
fn conversion_fidelity_exhaustive_at_q2() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in 2..=4u32 {
        let t = tower(2, m);
        let order = t.big_order();
        for _ in 0..5 {
            let f1 = QPolynomial::new(&t, (0..m).map(|_| rng.gen_range(0..order)).collect()).unwrap();
            let f2 = QPolynomial::new(&t, (0..m).map(|_| rng.gen_range(0..order)).collect()).unwrap();
            let code = PolyCode::from_univariate(&t, &[f1.clone(), f2.clone()]).unwrap();
            let mut from_polys = vec![0u64; m as usize + 1];
            for a in 0..order {
                for b in 0..order {
                    let w = f1.scale(a).add(&f2.scale(b)).unwrap();
                    from_polys[w.rank()] += 1;
                }
            }
            let dist = code.code().weight_distribution();
            if code.dim() == 2 {
                assert_eq!(dist, &from_polys[..]);
            } else {
                // Dependent pair: each codeword is hit Q^{2−dim} times.
                let mult = order as u64;
                let scaled: Vec<u64> = dist.iter().map(|&c| c * mult).collect();
                assert_eq!(scaled, from_polys);
            }
        }
    }
}

#[test]
fn weights_invariant_under_right_multiplication() {
    let t = tower(2, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let codes = [
        gabidulin(&t, 2, 1).unwrap().code().clone(),
        RankMetricCode::from_rows(&t, &[vec![1, 3, 0, 7], vec![0, 0, 1, 9]], 4).unwrap(),
    ];
    for c in &codes {
        for _ in 0..50 {
            let g = loop {
                let g = Matrix::from_flat(4, 4, (0..16).map(|_| rng.gen_range(0..2)).collect());
                if g.rank(t.small()) == 4 {
                    break g;
                }
            };
            let cg = c.right_multiply(&g).unwrap();
            assert_eq!(cg.weight_distribution(), c.weight_distribution());
            assert_eq!(cg.min_distance(), c.min_distance());
        }
    }
}

#[test]
fn twisted_sweep_q3_m4_all_deltas() {
    let t = tower(3, 4);
    let big = t.big();
    let (mut accepted, mut rejected) = (0, 0);
    for d in 1..81 {
        // Independent norm oracle: δ^{(81−1)/(3−1)} = δ^40.
        let norm_one = big.pow(d, 40) == 1;
        match twisted_gabidulin(&t, 2, 1, d, TwistVariant::Definition) {
            Ok(code) => {
                assert!(!norm_one);
                let mut reps = 0;
                let mut min = usize::MAX;
                code.code().visit_projective_codewords(|w| {
                    reps += 1;
                    min = min.min(rank_weight(&t, w));
                });
                assert_eq!(reps, 82);
                assert_eq!(min, 3);
                accepted += 1;
            }
            Err(Error::InvalidDelta) => {
                assert!(norm_one);
                rejected += 1;
            }
            Err(e) => panic!("δ = {d}: {e}"),
        }
        let cz = twisted_gabidulin(&t, 2, 1, d, TwistVariant::CzForm);
        assert_eq!(cz.is_ok(), !norm_one, "cz form at δ = {d}");
        // The top-exponent reading never yields an MRD code here.
        assert!(twisted_gabidulin(&t, 2, 1, d, TwistVariant::TopExponent).is_err());
    }
    assert_eq!((accepted, rejected), (40, 40));
}

#[test]
fn twisted_rejects_every_delta_at_q2() {
    let t = tower(2, 4);
    for d in 1..16 {
        for v in [TwistVariant::Definition, TwistVariant::CzForm] {
            assert!(matches!(twisted_gabidulin(&t, 2, 1, d, v), Err(Error::InvalidDelta)));
        }
    }
}

#[test]
fn untwisted_cz_form_is_gabidulin() {
    for q in [2, 3] {
        let t = tower(q, 4);
        let cz = twisted_gabidulin(&t, 2, 1, 0, TwistVariant::CzForm).unwrap();
        assert_eq!(cz.code().generator(), gabidulin(&t, 2, 1).unwrap().code().generator());
    }
}

#[test]
fn automorphism_counts() {
    let t = tower(2, 3);
    let g = gabidulin(&t, 2, 1).unwrap();
    assert_eq!(linear_automorphism_count(&g, AutMode::Exhaustive).unwrap(), BigUint::from(7u32));
    assert_eq!(linear_automorphism_count(&g, AutMode::Idealizer).unwrap(), BigUint::from(7u32));
    assert_eq!(linear_automorphism_count(&g, AutMode::Monomial).unwrap(), BigUint::from(7u32));

    let t2 = tower(2, 2);
    let ow = one_weight_code(&t2, 2, 2).unwrap();
    assert_eq!(code_automorphism_count(&ow, AutMode::Exhaustive).unwrap(), BigUint::from(180u32));
    assert_eq!(code_automorphism_count(&ow, AutMode::Idealizer).unwrap(), BigUint::from(180u32));

    let t3 = tower(3, 4);
    let big = t3.big();
    let delta = (1..81).find(|&d| big.pow(d, 40) != 1).unwrap();
    let cz = twisted_gabidulin(&t3, 2, 1, delta, TwistVariant::CzForm).unwrap();
    assert_eq!(linear_automorphism_count(&cz, AutMode::Monomial).unwrap(), BigUint::from(8u32));
    assert!(matches!(
        linear_automorphism_count(&gabidulin(&tower(3, 4), 2, 1).unwrap(), AutMode::Exhaustive),
        Err(Error::ResourceBudgetExceeded { .. })
    ));
}

#[test]
fn monomial_automorphisms_of_cz_form_are_f9_scalars() {
    let t = tower(3, 4);
    let big = t.big();
    for delta in (1..81).filter(|&d| big.pow(d, 40) != 1).take(5) {
        let cz = twisted_gabidulin(&t, 2, 1, delta, TwistVariant::CzForm).unwrap();
        let mut hits = Vec::new();
        for a in 1..81 {
            for i in 0..4 {
                let g = QPolynomial::monomial(&t, a, i);
                let fixed = cz.polys().iter().all(|f| {
                    let f = QPolynomial::new(&t, f.coeffs().to_vec()).unwrap();
                    let fg = f.compose(&g).unwrap();
                    cz.contains(&rmlkit_core::qpoly::MultiQPolynomial::from_univariate(&fg))
                });
                if fixed {
                    hits.push((a, i));
                }
            }
        }
        // a ∈ F_9^* exactly when a^8 = 1; only i = 0 occurs.
        assert_eq!(hits.len(), 8);
        assert!(hits.iter().all(|&(a, i)| i == 0 && big.pow(a, 8) == 1));
    }
}

/// Two generators give linearly equivalent one-weight codes.
#[test]
fn one_weight_codes_are_linearly_equivalent() {
    let t = tower(2, 2);
    let c2 = one_weight_code(&t, 2, 2).unwrap();
    let c3 = one_weight_code(&t, 2, 3).unwrap();
    assert!(matches!(one_weight_code(&t, 2, 1), Err(Error::NotPrimitiveElement)));
    let mut found = false;
    for idx in 0..(1u32 << 16) {
        let g = Matrix::from_flat(4, 4, (0..16).map(|i| (idx >> i) & 1).collect());
        if g.rank(t.small()) < 4 {
            continue;
        }
        if c2.right_multiply(&g).unwrap().generator() == c3.generator() {
            found = true;
            break;
        }
    }
    assert!(found);
    assert_eq!(c2.weight_distribution(), c3.weight_distribution());
    assert_eq!(c2.weight_distribution(), &[1, 0, 15]);
}

#[test]
fn json_and_csv_forms() {
    let t = tower(3, 3);
    let g = gabidulin(&t, 2, 1).unwrap();
    let back = RankMetricCode::from_json(&g.code().to_json()).unwrap();
    assert_eq!(back.generator(), g.code().generator());
    let csv = g.code().weight_distribution_csv();
    assert!(csv.starts_with("rank,count\n0,1\n"));
}
