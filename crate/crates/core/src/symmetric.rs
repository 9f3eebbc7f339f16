//! The permutation-invariant basis and the isometry onto type indices.
//!
//! For `k` factors of dimension `y` the basis vector of type `P` is the uniform
//! superposition over its type class. Compressing a block maps the component
//! along that vector to the single basis state `|s_P>` of a factor of dimension
//! `H^k_y`, which is the encoder `U` followed by ancilla removal. Expanding is
//! the inverse (ancilla addition followed by `U^-1`).

use num_complex::Complex64;
use num_traits::Zero;

use crate::combinatorics::{type_class_size, TypeRanker, TypeVector};
use crate::error::{Error, Result};
use crate::state::{Capacity, PureState, STRUCTURAL_TOL};

/// Type index and class normalization for every sequence of one block.
#[derive(Debug, Clone)]
pub(crate) struct BlockMap {
    /// type index of each flat sequence index
    index: Vec<usize>,
    /// `1/sqrt|T_P|` per type index
    weight: Vec<f64>,
}

impl BlockMap {
    /// Walks the sequences type class by type class.
    pub(crate) fn new(y: usize, k: usize, cap: Capacity) -> Result<Self> {
        let mid = cap.check_dims(&vec![y; k])?;
        let ranker = TypeRanker::new(k, y)?;
        let types = ranker.len();
        let mut index = vec![usize::MAX; mid];
        let mut weight = Vec::with_capacity(types);
        let mut seq = Vec::with_capacity(k);
        for s in 0..types {
            seq.clear();
            for (symbol, &count) in ranker.unrank(s).iter().enumerate() {
                seq.extend(std::iter::repeat_n(symbol, count));
            }
            let mut size = 0usize;
            loop {
                let flat = seq.iter().fold(0usize, |acc, &x| acc * y + x);
                index[flat] = s;
                size += 1;
                if !next_permutation(&mut seq) {
                    break;
                }
            }
            weight.push(1.0 / (size as f64).sqrt());
        }
        debug_assert!(index.iter().all(|&s| s != usize::MAX));
        Ok(BlockMap { index, weight })
    }

    pub(crate) fn types(&self) -> usize {
        self.weight.len()
    }
}

/// Lexicographic next permutation of a multiset; false once the last one is reached.
fn next_permutation(seq: &mut [usize]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

fn block_dims(state: &PureState, start: usize, k: usize) -> Result<usize> {
    let dims = state.dims();
    if k == 0 || start + k > dims.len() {
        return Err(Error::ShapeMismatch(format!(
            "block [{start}, {}) outside {} factors",
            start + k,
            dims.len()
        )));
    }
    let y = dims[start];
    if dims[start..start + k].iter().any(|&dim| dim != y) {
        return Err(Error::ShapeMismatch(format!(
            "block factors {:?} are not homogeneous",
            &dims[start..start + k]
        )));
    }
    Ok(y)
}

/// Projects the `k` factors starting at `start` onto the symmetric subspace and
/// relabels them as one factor of dimension `H^k_y`.
///
/// Returns the compressed state (norm equal to the symmetric component's norm)
/// and the norm of the discarded non-symmetric component.
pub(crate) fn compress_block(
    state: &PureState,
    start: usize,
    k: usize,
    cap: Capacity,
) -> Result<(PureState, f64)> {
    let y = block_dims(state, start, k)?;
    let map = BlockMap::new(y, k, cap)?;
    let dims = state.dims();
    let left: usize = dims[..start].iter().product();
    let right: usize = dims[start + k..].iter().product();
    let mid = map.index.len();
    let h = map.types();
    let amps = state.amplitudes();

    let mut out = vec![Complex64::zero(); left * h * right];
    for l in 0..left {
        for (x, &s) in map.index.iter().enumerate() {
            let w = map.weight[s];
            let src = (l * mid + x) * right;
            let dst = (l * h + s) * right;
            for r in 0..right {
                out[dst + r] += amps[src + r] * w;
            }
        }
    }

    let mut residual_sq = 0.0;
    for l in 0..left {
        for (x, &s) in map.index.iter().enumerate() {
            let w = map.weight[s];
            let src = (l * mid + x) * right;
            let dst = (l * h + s) * right;
            for r in 0..right {
                residual_sq += (amps[src + r] - out[dst + r] * w).norm_sqr();
            }
        }
    }

    let mut new_dims = dims[..start].to_vec();
    new_dims.push(h);
    new_dims.extend_from_slice(&dims[start + k..]);
    Ok((PureState::from_parts(new_dims, out), residual_sq.sqrt()))
}

/// Inverse of [`compress_block`]: replaces the factor at `position` (dimension
/// `H^k_y`) by `k` factors of dimension `y`.
pub(crate) fn expand_block(
    state: &PureState,
    position: usize,
    y: usize,
    k: usize,
    cap: Capacity,
) -> Result<PureState> {
    let dims = state.dims();
    if position >= dims.len() {
        return Err(Error::ShapeMismatch(format!(
            "factor {position} outside {} factors",
            dims.len()
        )));
    }
    let mut new_dims = dims[..position].to_vec();
    new_dims.extend(std::iter::repeat_n(y, k));
    new_dims.extend_from_slice(&dims[position + 1..]);
    cap.check_dims(&new_dims)?;
    let map = BlockMap::new(y, k, cap)?;
    let h = map.types();
    if dims[position] != h {
        return Err(Error::ShapeMismatch(format!(
            "factor {position} has dimension {}, expected H^{k}_{y} = {h}",
            dims[position]
        )));
    }
    let left: usize = dims[..position].iter().product();
    let right: usize = dims[position + 1..].iter().product();
    let mid = map.index.len();
    let amps = state.amplitudes();
    let mut out = vec![Complex64::zero(); left * mid * right];
    for l in 0..left {
        for (x, &s) in map.index.iter().enumerate() {
            let w = map.weight[s];
            let src = (l * h + s) * right;
            let dst = (l * mid + x) * right;
            for r in 0..right {
                out[dst + r] = amps[src + r] * w;
            }
        }
    }
    Ok(PureState::from_parts(new_dims, out))
}

/// Coordinates of a state in the permutation-invariant basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricDecomposition {
    /// `q[s_P] = <e_P|state>`
    pub q: Vec<Complex64>,
    /// Norm of the component orthogonal to the symmetric subspace.
    pub residual_norm: f64,
    /// Number of factors.
    pub n: usize,
    /// Factor dimension.
    pub d: usize,
}

pub fn symmetric_decompose(state: &PureState, cap: Capacity) -> Result<SymmetricDecomposition> {
    let n = state.num_factors();
    let (compressed, residual_norm) = compress_block(state, 0, n, cap)?;
    Ok(SymmetricDecomposition {
        q: compressed.into_amplitudes(),
        residual_norm,
        n,
        d: state.dims()[0],
    })
}

/// `sum_P q[s_P] |e_P>` over `n` factors of dimension `d`.
pub fn symmetric_reconstruct(dec: &SymmetricDecomposition, cap: Capacity) -> Result<PureState> {
    if dec.residual_norm > STRUCTURAL_TOL {
        return Err(Error::NotSymmetric {
            residual: dec.residual_norm,
        });
    }
    let compressed = PureState::new(vec![dec.q.len()], dec.q.clone())?;
    expand_block(&compressed, 0, dec.d, dec.n, cap)
}

/// Closed-form coordinates of `|phi>^{(x)n}`: `q_P = sqrt|T_P| prod_a phi(a)^{count_a}`,
/// in type-index order.
pub fn product_state_coefficients(phi: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let d = phi.len();
    let ranker = TypeRanker::new(n, d)?;
    (0..ranker.len())
        .map(|s| {
            let counts = ranker.unrank(s);
            let p = TypeVector::new(counts.iter().map(|&c| c as u64).collect())?;
            let size =
                num_traits::ToPrimitive::to_f64(&type_class_size(&p)).unwrap_or(f64::INFINITY);
            let monomial: Complex64 = counts
                .iter()
                .zip(phi)
                .map(|(&c, a)| a.powu(c as u32))
                .product();
            Ok(monomial * size.sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn next_permutation_walks_multiset() {
        let mut seq = vec![0, 0, 1];
        let mut all = vec![seq.clone()];
        while next_permutation(&mut seq) {
            all.push(seq.clone());
        }
        assert_eq!(all, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn block_map_covers_every_sequence() {
        let map = BlockMap::new(3, 3, Capacity::DEFAULT).unwrap();
        assert_eq!(map.types(), 10);
        assert_eq!(map.index.len(), 27);
        let total: f64 = map.weight.iter().map(|w| 1.0 / (w * w)).sum();
        assert!((total - 27.0).abs() < 1e-9);
    }

    #[test]
    fn plus_state_decomposition() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::qudit(vec![c(s), c(s)]).unwrap();
        let dec = symmetric_decompose(
            &plus.power(2, Capacity::DEFAULT).unwrap(),
            Capacity::DEFAULT,
        )
        .unwrap();
        assert!(dec.residual_norm < 1e-12);
        let expect = [0.5, s, 0.5];
        for (q, e) in dec.q.iter().zip(expect) {
            assert!((q - c(e)).norm() < 1e-12);
        }
    }

    #[test]
    fn antisymmetric_state_has_no_symmetric_component() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = PureState::new(vec![2, 2], vec![c(0.0), c(s), c(-s), c(0.0)]).unwrap();
        let dec = symmetric_decompose(&singlet, Capacity::DEFAULT).unwrap();
        assert!(dec.q.iter().all(|q| q.norm() < 1e-12));
        assert!((dec.residual_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_index_is_top_symbol_repeated() {
        let mut q = vec![c(0.0); 10];
        q[0] = c(1.0);
        let dec = SymmetricDecomposition {
            q,
            residual_norm: 0.0,
            n: 3,
            d: 3,
        };
        let state = symmetric_reconstruct(&dec, Capacity::DEFAULT).unwrap();
        // |2>|2>|2> is flat index 26
        assert_eq!(state, PureState::basis(vec![3, 3, 3], 26).unwrap());
    }

    #[test]
    fn single_copy_is_reversed_relabeling() {
        let phi = PureState::qudit(vec![c(0.0), c(0.6), c(0.8)]).unwrap();
        let dec = symmetric_decompose(&phi, Capacity::DEFAULT).unwrap();
        assert_eq!(dec.q, vec![c(0.8), c(0.6), c(0.0)]);
    }

    #[test]
    fn reconstruct_rejects_residual() {
        let dec = SymmetricDecomposition {
            q: vec![c(1.0), c(0.0), c(0.0)],
            residual_norm: 0.1,
            n: 2,
            d: 2,
        };
        assert!(matches!(
            symmetric_reconstruct(&dec, Capacity::DEFAULT),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn compress_inner_block_keeps_neighbours() {
        let phi = PureState::qudit(vec![c(0.6), c(0.8)]).unwrap();
        let zero = PureState::basis(vec![3], 0).unwrap();
        let cap = Capacity::DEFAULT;
        let state = zero
            .tensor(&phi.power(2, cap).unwrap(), cap)
            .unwrap()
            .tensor(&zero, cap)
            .unwrap();
        let (out, residual) = compress_block(&state, 1, 2, cap).unwrap();
        assert!(residual < 1e-12);
        assert_eq!(out.dims(), &[3, 3, 3]);
        let back = expand_block(&out, 1, 2, 2, cap).unwrap();
        assert!((back.fidelity(&state).unwrap() - 1.0).abs() < 1e-12);
    }
}
