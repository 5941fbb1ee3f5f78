mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schord::action::{act_on, check_chain_map, CochainTensor};
use schord::frobenius::{dual_numbers, group_c2, mat2, truncated_polynomial, FrobeniusAlgebra};
use schord::hochschild::{cohomology, Cochain, Variant};
use schord::linalg::Field;
use schord::verify::{catalog, expected_hh, reverse_defect};

fn builtins() -> Vec<Arc<FrobeniusAlgebra>> {
    vec![dual_numbers(), mat2(), group_c2(), truncated_polynomial(3)].into_iter().map(Arc::new).collect()
}

#[test]
fn bar_complex_oracle_matches_the_closed_forms() {
    for alg in builtins() {
        for n in 0..4 {
            assert_eq!(Some(common::hh_dimension(&alg, n)), expected_hh(&alg, n), "{} HH^{n}", alg.name());
        }
    }
}

#[test]
fn library_cohomology_matches_the_oracle() {
    for alg in builtins() {
        for n in 0..4 {
            let want = common::hh_dimension(&alg, n);
            for variant in [Variant::Normalized, Variant::Full] {
                let h = cohomology(&alg, n, 4, variant, Field::Rational).unwrap();
                assert_eq!(h.dimension, want, "{} HH^{n} {variant:?}", alg.name());
            }
            let hp = cohomology(&alg, n, 4, Variant::Normalized, Field::Prime(32003)).unwrap();
            assert_eq!(hp.dimension, want);
        }
    }
}

#[test]
fn rank_oracle_sanity() {
    assert_eq!(common::rank_mod_p(vec![vec![1, 2], vec![2, 4]]), 1);
    assert_eq!(common::rank_mod_p(vec![vec![0, 1], vec![1, 0], vec![1, 1]]), 2);
    assert_eq!(common::inversions(&[3, 1, 2]), 2);
}

/// Every normalized argument list of the given length.
fn tuples(len: usize, d: usize) -> Vec<Vec<usize>> {
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|v| (1..d).map(move |a| [v.clone(), vec![a]].concat())).collect()
    })
}

fn cup_agrees(alg: &Arc<FrobeniusAlgebra>, p: usize, q: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Cochain::random(alg.clone(), 6, p, 3, &mut rng).unwrap();
    let g = Cochain::random(alg.clone(), 6, q, 3, &mut rng).unwrap();
    let out = act_on(&catalog("cup"), &[f.clone(), g.clone()]).unwrap().to_cochain(6).unwrap();
    let ff = |a: &[usize], b: usize| f.get(a, b);
    let gg = |a: &[usize], b: usize| g.get(a, b);
    let d = alg.dim();
    for args in tuples(p + q, d) {
        for b in 0..d {
            assert_eq!(out.get(&args, b), common::cup(alg, &ff, p, &gg, &args, b), "{} {args:?}", alg.name());
        }
    }
}

#[test]
fn cup_matches_the_oracle() {
    for alg in builtins() {
        for (p, q) in [(0, 0), (0, 2), (1, 1), (2, 1), (1, 2), (2, 2)] {
            cup_agrees(&alg, p, q, (p * 10 + q) as u64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cup_oracle_random(seed in any::<u64>(), p in 0usize..3, q in 0usize..3, which in 0usize..4) {
        cup_agrees(&builtins()[which], p, q, seed);
    }

    #[test]
    fn reverse_defect_matches_the_oracle(seed in any::<u64>(), n in 0usize..3) {
        let alg = Arc::new(mat2());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Cochain::random(alg.clone(), 6, n, 3, &mut rng).unwrap();
        let x = CochainTensor::from_cochains(std::slice::from_ref(&f)).unwrap();
        let got = check_chain_map(&catalog("reverse"), &x).unwrap().discrepancy.to_cochain(6).unwrap();
        prop_assert_eq!(&got, &reverse_defect(&f, n));
        let ff = |a: &[usize], b: usize| f.get(a, b);
        let d = alg.dim();
        for args in tuples(n + 1, d) {
            let want = common::reverse_defect(&alg, &ff, n, &args);
            for b in 0..d {
                prop_assert_eq!(got.get(&args, b), want.0[b].clone());
            }
        }
    }
}
