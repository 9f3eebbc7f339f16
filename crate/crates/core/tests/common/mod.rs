#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use qmcast_core::combinatorics::{
    index_to_type, multiset_count, type_class_size, type_to_index, TypeIndex, TypeRanker,
    TypeVector,
};
use qmcast_core::{CoefficientFamily, PureState};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn random_amplitudes(rng: &mut impl Rng, d: usize) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|a| a / norm).collect()
}

pub fn random_qudit(rng: &mut impl Rng, d: usize) -> PureState {
    PureState::qudit(random_amplitudes(rng, d)).unwrap()
}

pub fn random_state(rng: &mut impl Rng, dims: Vec<usize>) -> PureState {
    let len = dims.iter().product();
    PureState::normalized(dims, random_amplitudes(rng, len)).unwrap()
}

pub fn random_family(rng: &mut impl Rng, d: usize, m: usize) -> CoefficientFamily {
    let reference = random_amplitudes(rng, d);
    let members = (0..m)
        .map(|_| {
            let mut p: Vec<usize> = (0..d).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    CoefficientFamily::new(reference, members).unwrap()
}

pub fn family_states(family: &CoefficientFamily) -> Vec<PureState> {
    (0..family.m()).map(|i| family.member_state(i)).collect()
}

/// Every `(N, d)` with `d^N <= 2^16`, capped at `d <= max_d`.
pub fn oracle_grid(max_d: usize) -> Vec<(usize, usize)> {
    let mut grid = Vec::new();
    for d in 2..=max_d {
        let mut n = 1;
        while (d as u64).pow(n as u32) <= 1 << 16 {
            grid.push((n, d));
            n += 1;
        }
    }
    grid
}

/// Brute-force check of type counting and indexing at one `(N, d)`.
///
/// Types are found by sorting every sequence; their lexicographic order on
/// count vectors (a `BTreeMap` walk) is the expected index order.
pub fn oracle_check(n: usize, d: usize) -> Result<(), String> {
    let mut by_sorted: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut seq = vec![0usize; n];
    let total = (d as u64).pow(n as u32);
    for _ in 0..total {
        let mut key = seq.clone();
        key.sort_unstable();
        *by_sorted.entry(key).or_insert(0) += 1;
        for pos in (0..n).rev() {
            seq[pos] += 1;
            if seq[pos] < d {
                break;
            }
            seq[pos] = 0;
        }
    }
    let mut classes: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for (key, size) in by_sorted {
        let mut counts = vec![0u64; d];
        for x in key {
            counts[x] += 1;
        }
        classes.insert(counts, size);
    }

    let h = multiset_count(n as u64, d).map_err(|e| e.to_string())?;
    if h != BigUint::from(classes.len()) {
        return Err(format!(
            "H^{n}_{d} = {h}, brute force found {}",
            classes.len()
        ));
    }
    let sum: u64 = classes.values().sum();
    if sum != total {
        return Err(format!("class sizes sum to {sum}, expected {total}"));
    }

    let ranker = TypeRanker::new(n, d).map_err(|e| e.to_string())?;
    // BigUint ranking costs O(d) big-integer binomials per type; sample wide alphabets.
    let stride = (classes.len() * d / 200_000).max(1);
    for (expected, (counts, size)) in classes.iter().enumerate() {
        let usize_counts: Vec<usize> = counts.iter().map(|&c| c as usize).collect();
        if ranker.rank(&usize_counts) != expected || ranker.unrank(expected) != usize_counts {
            return Err(format!(
                "ranker disagrees at {counts:?}, expected index {expected}"
            ));
        }
        if expected % stride != 0 && expected + 1 != classes.len() {
            continue;
        }
        let p = TypeVector::new(counts.clone()).map_err(|e| e.to_string())?;
        if type_class_size(&p).to_u64() != Some(*size) {
            return Err(format!(
                "|T_P| for {counts:?} is {}, expected {size}",
                type_class_size(&p)
            ));
        }
        let index = type_to_index(&p);
        if index.value != BigUint::from(expected) {
            return Err(format!(
                "s_P for {counts:?} is {}, expected {expected}",
                index.value
            ));
        }
        let back = index_to_type(&TypeIndex {
            value: index.value.clone(),
            n: n as u64,
            d,
        })
        .map_err(|e| e.to_string())?;
        if back != p {
            return Err(format!("index {expected} unranks to {:?}", back.counts()));
        }
    }
    Ok(())
}
