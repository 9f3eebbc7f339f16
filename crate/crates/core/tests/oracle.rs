mod common;

use num_bigint::BigUint;
use qmcast_core::combinatorics::{multiset_count, multiset_count_big, TypeRanker};
use qmcast_core::symmetric::{product_state_coefficients, symmetric_decompose};
use qmcast_core::Capacity;

#[test]
fn counting_and_ranking_match_brute_force_small_alphabets() {
    for (n, d) in common::oracle_grid(16) {
        common::oracle_check(n, d).unwrap_or_else(|e| panic!("(N={n}, d={d}): {e}"));
    }
}

#[test]
fn counting_and_ranking_match_brute_force_wide_alphabets() {
    for (n, d) in common::oracle_grid(256)
        .into_iter()
        .filter(|&(_, d)| d > 16)
    {
        common::oracle_check(n, d).unwrap_or_else(|e| panic!("(N={n}, d={d}): {e}"));
    }
}

#[test]
fn single_symbol_sequences_up_to_two_to_the_sixteen() {
    for d in (257..=1 << 16).step_by(251) {
        assert_eq!(multiset_count(1, d).unwrap(), BigUint::from(d));
    }
    let ranker = TypeRanker::new(1, 4096).unwrap();
    for x in [0, 1, 2047, 4095] {
        let mut counts = vec![0; 4096];
        counts[x] = 1;
        // the lexicographically smallest type puts the copy on the last symbol
        assert_eq!(ranker.rank(&counts), 4095 - x);
    }
}

#[test]
fn multiset_count_big_agrees_with_small_path() {
    for d in 2..20usize {
        for n in 1..20u64 {
            assert_eq!(
                multiset_count_big(n, &BigUint::from(d)),
                multiset_count(n, d).unwrap()
            );
        }
    }
}

#[test]
fn closed_form_coefficients_match_projection() {
    let mut rng = common::rng(7);
    for (n, d) in [(1, 2), (3, 2), (5, 2), (4, 3), (3, 4), (2, 5)] {
        let phi = common::random_qudit(&mut rng, d);
        let dec = symmetric_decompose(&phi.power(n, Capacity::DEFAULT).unwrap(), Capacity::DEFAULT)
            .unwrap();
        let closed = product_state_coefficients(phi.amplitudes(), n).unwrap();
        assert!(dec.residual_norm < 1e-10);
        for (a, b) in dec.q.iter().zip(&closed) {
            assert!((a - b).norm() < 1e-12, "(N={n}, d={d})");
        }
    }
}
