//! Types (empirical distributions) of sequences over a finite alphabet.
//!
//! A type of a length-`N` sequence over `{0, .., d-1}` is its vector of symbol
//! counts. There are `C(N+d-1, N)` of them. Types are ordered lexicographically
//! on their count vectors and that order fixes the bijection between types and
//! compressed basis indices used by every codec in this crate.
//!
//! All counts are exact. [`TypeRanker`] is the fast `usize` path used inside the
//! simulator, where every index is bounded by the amplitude cap anyway.

use num_bigint::BigUint;
use num_integer::{binomial, multinomial};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact results above this many bits are replaced by a sum of logarithms.
pub const EXACT_LOG_BITS: u64 = 512;

/// Occurrence counts of each symbol in a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    counts: Vec<u64>,
}

impl TypeVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "type needs an alphabet of at least 2 symbols, got {}",
                counts.len()
            )));
        }
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::InvalidParameter("type of an empty sequence".into()));
        }
        Ok(TypeVector { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Sequence length.
    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Alphabet size.
    pub fn d(&self) -> usize {
        self.counts.len()
    }

    /// Empirical probability of `symbol` as the reduced-free fraction `(count, N)`.
    pub fn frequency(&self, symbol: usize) -> (u64, u64) {
        (self.counts[symbol], self.n())
    }
}

/// Position of a type in the lexicographic order of all types with the same `(N, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeIndex {
    pub value: BigUint,
    pub n: u64,
    pub d: usize,
}

fn check_nd(n: u64, d: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "sequence length must be at least 1".into(),
        ));
    }
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "alphabet size must be at least 2, got {d}"
        )));
    }
    Ok(())
}

/// Number of length-`parts` count vectors summing to `total`; `C(total+parts-1, total)`.
/// Accepts the degenerate corners (`total = 0`, `parts = 0`) needed by ranking.
fn compositions(total: u64, parts: usize) -> BigUint {
    if parts == 0 {
        return if total == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    let k = (parts - 1) as u64;
    let n = total + k;
    binomial(BigUint::from(n), BigUint::from(k.min(total)))
}

/// `|P_N(X)|`, the number of distinct types of length-`n` sequences over `d` symbols.
pub fn multiset_count(n: u64, d: usize) -> Result<BigUint> {
    check_nd(n, d)?;
    Ok(compositions(n, d))
}

/// `H^m_x = C(x+m-1, m)` for an alphabet size that may itself be a large exact count.
pub fn multiset_count_big(m: u64, parts: &BigUint) -> BigUint {
    if m == 0 {
        return BigUint::one();
    }
    if parts.is_zero() {
        return BigUint::zero();
    }
    binomial(parts + BigUint::from(m) - 1u32, BigUint::from(m))
}

/// Natural logarithm of an arbitrarily large positive integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x
            .to_f64()
            .expect("BigUint below 2^1000 converts to f64")
            .ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head converts to f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln H^m_x`. Uses the exact integer when it fits in [`EXACT_LOG_BITS`] bits,
/// otherwise `sum_{l<m} ln(x+l) - ln(m!)`.
pub fn ln_multiset_count_big(m: u64, parts: &BigUint) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let estimated_bits = m.saturating_mul(parts.bits() + 1);
    if estimated_bits <= EXACT_LOG_BITS {
        return ln_big(&multiset_count_big(m, parts));
    }
    let ln_x = ln_big(parts);
    let x = parts.to_f64().unwrap_or(f64::INFINITY);
    let mut acc = 0.0;
    for l in 0..m {
        acc += ln_x + (l as f64 / x).ln_1p();
        acc -= ((l + 1) as f64).ln();
    }
    acc
}

/// Bandwidth of a transmitted dimension in units of `d`-level systems: `log_d dim`.
pub fn qudit_equivalents(dim: &BigUint, d: usize) -> f64 {
    assert!(!dim.is_zero(), "dimension must be positive");
    assert!(d >= 2, "alphabet size must be at least 2");
    let q = ln_big(dim) / (d as f64).ln();
    // exact for whole qudits
    let t = q.round();
    if (q - t).abs() < 1e-6
        && t >= 0.0
        && t < u32::MAX as f64
        && BigUint::from(d).pow(t as u32) == *dim
    {
        return t;
    }
    q
}

/// All types for `(n, d)` in increasing lexicographic order.
pub fn enumerate_types(n: u64, d: usize, cap: usize) -> Result<Vec<TypeVector>> {
    let count = multiset_count(n, d)?;
    if count > BigUint::from(cap) {
        return Err(Error::Capacity {
            required: count.to_string(),
            cap,
        });
    }
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    let mut prefix = Vec::with_capacity(d);
    fill_types(n, d, &mut prefix, &mut out);
    Ok(out)
}

fn fill_types(remaining: u64, d: usize, prefix: &mut Vec<u64>, out: &mut Vec<TypeVector>) {
    if prefix.len() + 1 == d {
        prefix.push(remaining);
        out.push(TypeVector {
            counts: prefix.clone(),
        });
        prefix.pop();
        return;
    }
    for v in 0..=remaining {
        prefix.push(v);
        fill_types(remaining - v, d, prefix, out);
        prefix.pop();
    }
}

pub fn type_of_sequence(x: &[usize], d: usize) -> Result<TypeVector> {
    check_nd(x.len() as u64, d)?;
    let mut counts = vec![0u64; d];
    for &symbol in x {
        if symbol >= d {
            return Err(Error::SymbolOutOfRange { symbol, d });
        }
        counts[symbol] += 1;
    }
    Ok(TypeVector { counts })
}

/// `|T_P| = N! / prod_a counts[a]!`.
pub fn type_class_size(p: &TypeVector) -> BigUint {
    let counts: Vec<BigUint> = p.counts.iter().map(|&c| BigUint::from(c)).collect();
    multinomial(&counts)
}

pub fn type_to_index(p: &TypeVector) -> TypeIndex {
    let d = p.d();
    let mut remaining = p.n();
    let mut rank = BigUint::zero();
    for (i, &c) in p.counts[..d - 1].iter().enumerate() {
        // Completions with a smaller value at position i:
        // sum_{v<c} compositions(r-v, d-i-1) = compositions(r, d-i) - compositions(r-c, d-i).
        if c > 0 {
            rank += compositions(remaining, d - i) - compositions(remaining - c, d - i);
        }
        remaining -= c;
    }
    TypeIndex {
        value: rank,
        n: p.n(),
        d,
    }
}

pub fn index_to_type(index: &TypeIndex) -> Result<TypeVector> {
    let (n, d) = (index.n, index.d);
    let bound = multiset_count(n, d)?;
    if index.value >= bound {
        return Err(Error::IndexOutOfRange {
            index: index.value.to_string(),
            bound: bound.to_string(),
        });
    }
    let mut rest = index.value.clone();
    let mut remaining = n;
    let mut counts = Vec::with_capacity(d);
    for i in 0..d - 1 {
        let mut v = 0;
        loop {
            let block = compositions(remaining - v, d - i - 1);
            if rest < block {
                break;
            }
            rest -= block;
            v += 1;
        }
        counts.push(v);
        remaining -= v;
    }
    counts.push(remaining);
    Ok(TypeVector { counts })
}

/// Table-driven ranking of types when every count fits in `usize`.
#[derive(Debug, Clone)]
pub struct TypeRanker {
    n: usize,
    d: usize,
    // table[r * (d + 1) + j] = compositions(r, j)
    table: Vec<usize>,
}

impl TypeRanker {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        check_nd(n as u64, d)?;
        let width = d + 1;
        let mut table = vec![0usize; (n + 1) * width];
        for r in 0..=n {
            table[r * width] = usize::from(r == 0);
            for j in 1..=d {
                // compositions(r, j) = compositions(r, j-1) + compositions(r-1, j)
                let a = table[r * width + j - 1];
                let b = if r > 0 { table[(r - 1) * width + j] } else { 0 };
                table[r * width + j] = a.checked_add(b).ok_or_else(|| Error::Capacity {
                    required: compositions(n as u64, d).to_string(),
                    cap: usize::MAX,
                })?;
            }
        }
        Ok(TypeRanker { n, d, table })
    }

    fn comp(&self, r: usize, j: usize) -> usize {
        self.table[r * (self.d + 1) + j]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of types.
    pub fn len(&self) -> usize {
        self.comp(self.n, self.d)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rank(&self, counts: &[usize]) -> usize {
        debug_assert_eq!(counts.len(), self.d);
        let mut remaining = self.n;
        let mut rank = 0;
        for (i, &c) in counts[..self.d - 1].iter().enumerate() {
            if c > 0 {
                rank += self.comp(remaining, self.d - i) - self.comp(remaining - c, self.d - i);
            }
            remaining -= c;
        }
        rank
    }

    pub fn unrank(&self, mut index: usize) -> Vec<usize> {
        assert!(index < self.len(), "type index {index} out of range");
        let mut remaining = self.n;
        let mut counts = Vec::with_capacity(self.d);
        for i in 0..self.d - 1 {
            let mut v = 0;
            while index >= self.comp(remaining - v, self.d - i - 1) {
                index -= self.comp(remaining - v, self.d - i - 1);
                v += 1;
            }
            counts.push(v);
            remaining -= v;
        }
        counts.push(remaining);
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn tv(c: &[u64]) -> TypeVector {
        TypeVector::new(c.to_vec()).unwrap()
    }

    fn all_sequences(n: usize, d: usize) -> Vec<Vec<usize>> {
        let total = d.pow(n as u32);
        (0..total)
            .map(|mut i| {
                let mut x = vec![0; n];
                for slot in x.iter_mut().rev() {
                    *slot = i % d;
                    i /= d;
                }
                x
            })
            .collect()
    }

    #[test]
    fn multiset_count_examples() {
        assert_eq!(multiset_count(4, 5).unwrap(), BigUint::from(70u32));
        assert_eq!(multiset_count(1, 7).unwrap(), BigUint::from(7u32));
        assert_eq!(multiset_count(2, 2).unwrap(), BigUint::from(3u32));
        assert!(multiset_count(0, 2).is_err());
        assert!(multiset_count(3, 1).is_err());
    }

    #[test]
    fn multiset_count_is_arbitrary_precision() {
        // C(299, 99) does not fit in 128 bits.
        let h = multiset_count(200, 100).unwrap();
        assert!(h.bits() > 128);
        let ratio = multiset_count_big(200, &BigUint::from(100u32));
        assert_eq!(h, ratio);
    }

    #[test]
    fn binary_pairs_match_enumeration() {
        let distinct: BTreeSet<Vec<u64>> = all_sequences(2, 2)
            .iter()
            .map(|x| type_of_sequence(x, 2).unwrap().counts)
            .collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn enumerate_small_cases() {
        let t = enumerate_types(2, 2, 1 << 20).unwrap();
        assert_eq!(t, vec![tv(&[0, 2]), tv(&[1, 1]), tv(&[2, 0])]);
        let t = enumerate_types(1, 3, 1 << 20).unwrap();
        assert_eq!(t, vec![tv(&[0, 0, 1]), tv(&[0, 1, 0]), tv(&[1, 0, 0])]);
        assert_eq!(enumerate_types(4, 2, 1 << 20).unwrap().len(), 5);
    }

    #[test]
    fn enumerate_respects_cap() {
        assert!(matches!(
            enumerate_types(10, 10, 1000),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn type_of_sequence_examples() {
        assert_eq!(type_of_sequence(&[0, 1, 1, 0], 2).unwrap(), tv(&[2, 2]));
        assert_eq!(type_of_sequence(&[2, 2, 2], 3).unwrap(), tv(&[0, 0, 3]));
        assert_eq!(type_of_sequence(&[0, 1, 2], 4).unwrap(), tv(&[1, 1, 1, 0]));
        assert_eq!(
            type_of_sequence(&[0, 3], 3),
            Err(Error::SymbolOutOfRange { symbol: 3, d: 3 })
        );
    }

    #[test]
    fn type_class_sizes() {
        assert_eq!(type_class_size(&tv(&[5, 0, 0])), BigUint::one());
        assert_eq!(type_class_size(&tv(&[1, 1])), BigUint::from(2u32));
        assert_eq!(type_class_size(&tv(&[2, 1])), BigUint::from(3u32));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(type_to_index(&tv(&[0, 2])).value, BigUint::zero());
        assert_eq!(type_to_index(&tv(&[2, 0])).value, BigUint::from(2u32));
        for p in enumerate_types(3, 3, 1 << 20).unwrap() {
            assert_eq!(index_to_type(&type_to_index(&p)).unwrap(), p);
        }
    }

    #[test]
    fn unrank_out_of_range() {
        let idx = TypeIndex {
            value: BigUint::from(3u32),
            n: 2,
            d: 2,
        };
        assert!(matches!(
            index_to_type(&idx),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn qudit_equivalent_examples() {
        assert!((qudit_equivalents(&BigUint::from(8u32), 2) - 3.0).abs() < 1e-12);
        assert_eq!(qudit_equivalents(&BigUint::one(), 5), 0.0);
        assert!((qudit_equivalents(&BigUint::from(3u32), 2) - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn ln_big_handles_huge_values() {
        let x = BigUint::from(3u32).pow(5000);
        assert!((ln_big(&x) - 5000.0 * 3f64.ln()).abs() < 1e-9 * 5000.0);
    }

    #[test]
    fn log_sum_path_agrees_with_exact() {
        let x = BigUint::from(10u32).pow(40);
        // 30 * 134 bits forces the log-sum path
        let approx = ln_multiset_count_big(30, &x);
        let exact = ln_big(&multiset_count_big(30, &x));
        assert!((approx - exact).abs() < 1e-8, "{approx} vs {exact}");
    }

    #[test]
    fn ranker_agrees_with_exact_ranking() {
        for (n, d) in [(1, 2), (4, 2), (3, 3), (5, 4), (2, 7)] {
            let ranker = TypeRanker::new(n, d).unwrap();
            let types = enumerate_types(n as u64, d, 1 << 20).unwrap();
            assert_eq!(ranker.len(), types.len());
            for (i, p) in types.iter().enumerate() {
                let counts: Vec<usize> = p.counts().iter().map(|&c| c as usize).collect();
                assert_eq!(ranker.rank(&counts), i);
                assert_eq!(ranker.unrank(i), counts);
            }
        }
    }

    #[test]
    fn sizes_sum_to_all_sequences() {
        for (n, d) in [(3u64, 2usize), (4, 3), (6, 2), (3, 5)] {
            let total: BigUint = enumerate_types(n, d, 1 << 20)
                .unwrap()
                .iter()
                .map(type_class_size)
                .sum();
            assert_eq!(total, BigUint::from(d).pow(n as u32));
        }
    }

    #[test]
    fn pascal_identity() {
        for n in 2..12u64 {
            for d in 3..9usize {
                assert_eq!(
                    multiset_count(n, d).unwrap(),
                    multiset_count(n - 1, d).unwrap() + multiset_count(n, d - 1).unwrap()
                );
            }
        }
    }

    #[test]
    fn polynomial_type_bound() {
        for n in 1..20u64 {
            for d in 2..6usize {
                assert!(multiset_count(n, d).unwrap() <= BigUint::from(n + 1).pow(d as u32));
            }
        }
    }
}
