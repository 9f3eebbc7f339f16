//! Dense pure states over registers of factors with arbitrary dimensions.
//!
//! Amplitudes are stored flat with big-endian digits: the leftmost factor is the
//! most significant. Values are immutable; every operation returns a new state.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Structural tolerance: ancilla purity, residuals, normalization.
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Tolerance on fidelities.
pub const FIDELITY_TOL: f64 = 1e-9;

/// Upper bound on the number of amplitudes any simulated state may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity(usize);

impl Capacity {
    pub const DEFAULT: Capacity = Capacity(1 << 20);
    pub const MIN: usize = 1 << 10;

    pub fn new(max_amplitudes: usize) -> Result<Self> {
        if max_amplitudes < Self::MIN {
            return Err(Error::InvalidParameter(format!(
                "capacity must be at least {}, got {max_amplitudes}",
                Self::MIN
            )));
        }
        Ok(Capacity(max_amplitudes))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Product of `dims`, or a capacity error if it exceeds the cap.
    pub fn check_dims(self, dims: &[usize]) -> Result<usize> {
        let mut total: u128 = 1;
        for &dim in dims {
            total = total.saturating_mul(dim as u128);
        }
        if total > self.0 as u128 {
            let required = if total == u128::MAX {
                ">= 2^128".to_string()
            } else {
                total.to_string()
            };
            return Err(Error::Capacity {
                required,
                cap: self.0,
            });
        }
        Ok(total as usize)
    }
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

impl PureState {
    /// Builds a state, checking shape and unit norm.
    pub fn new(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        let state = Self::unchecked_norm(dims, amps)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(state)
    }

    /// Builds a state from any nonzero vector by rescaling it to unit norm.
    pub fn normalized(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        let mut state = Self::unchecked_norm(dims, amps)?;
        let norm = state.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        state.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    fn unchecked_norm(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "invalid factor dimensions {dims:?}"
            )));
        }
        let expected = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        if expected != Some(amps.len()) {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for factor dimensions {dims:?}",
                amps.len()
            )));
        }
        Ok(PureState { dims, amps })
    }

    /// Crate-internal constructor for results of norm-preserving maps.
    pub(crate) fn from_parts(dims: Vec<usize>, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(product(&dims), amps.len());
        PureState { dims, amps }
    }

    /// Single-factor state with the given amplitudes.
    pub fn qudit(amps: Vec<Complex64>) -> Result<Self> {
        let d = amps.len();
        Self::new(vec![d], amps)
    }

    /// Computational basis state `|index>` over `dims`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let len = product(&dims);
        if index >= len {
            return Err(Error::IndexOutOfRange {
                index: index.to_string(),
                bound: len.to_string(),
            });
        }
        let mut amps = vec![Complex64::zero(); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    /// Total Hilbert-space dimension.
    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn tensor(&self, other: &PureState, cap: Capacity) -> Result<PureState> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        cap.check_dims(&dims)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(PureState::from_parts(dims, amps))
    }

    /// `n`-fold tensor power.
    pub fn power(&self, n: usize, cap: Capacity) -> Result<PureState> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "tensor power needs at least one copy".into(),
            ));
        }
        let dims: Vec<usize> = std::iter::repeat_n(self.dims.iter().copied(), n)
            .flatten()
            .collect();
        cap.check_dims(&dims)?;
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self, cap)?;
        }
        Ok(out)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!(
                "inner product of {:?} with {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    /// Relabels the computational basis of one factor: `|j> -> |perm[j]>`.
    pub fn apply_local_permutation(&self, factor: usize, perm: &[usize]) -> Result<PureState> {
        let dim = *self.dims.get(factor).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "factor {factor} out of range for {} factors",
                self.dims.len()
            ))
        })?;
        check_permutation(perm, dim)?;
        let right: usize = product(&self.dims[factor + 1..]);
        let left: usize = product(&self.dims[..factor]);
        let mut amps = vec![Complex64::zero(); self.amps.len()];
        for l in 0..left {
            for (j, &pj) in perm.iter().enumerate() {
                let src = (l * dim + j) * right;
                let dst = (l * dim + pj) * right;
                amps[dst..dst + right].copy_from_slice(&self.amps[src..src + right]);
            }
        }
        Ok(PureState::from_parts(self.dims.clone(), amps))
    }

    /// Reorders factors: factor `i` of the result is factor `order[i]` of `self`.
    pub fn permute_factors(&self, order: &[usize]) -> Result<PureState> {
        check_permutation(order, self.dims.len())?;
        let new_dims: Vec<usize> = order.iter().map(|&i| self.dims[i]).collect();
        let old_strides = strides(&self.dims);
        let mut digits = vec![0usize; new_dims.len()];
        let mut amps = Vec::with_capacity(self.amps.len());
        for _ in 0..self.amps.len() {
            let src: usize = digits
                .iter()
                .zip(order)
                .map(|(&x, &i)| x * old_strides[i])
                .sum();
            amps.push(self.amps[src]);
            increment(&mut digits, &new_dims);
        }
        Ok(PureState::from_parts(new_dims, amps))
    }

    /// Prepends `count` ancilla factors of dimension `dim` in state `|0>`.
    pub fn add_ancilla(&self, count: usize, dim: usize, cap: Capacity) -> Result<PureState> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "ancilla dimension must be positive".into(),
            ));
        }
        let mut dims = vec![dim; count];
        dims.extend_from_slice(&self.dims);
        let len = cap.check_dims(&dims)?;
        let mut amps = vec![Complex64::zero(); len];
        amps[..self.amps.len()].copy_from_slice(&self.amps);
        Ok(PureState::from_parts(dims, amps))
    }

    /// Drops `count` leading factors, which must be exactly `|0>`.
    pub fn remove_ancilla(&self, count: usize) -> Result<PureState> {
        if count >= self.dims.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot remove {count} ancillas from a {}-factor state",
                self.dims.len()
            )));
        }
        let keep = product(&self.dims[count..]);
        if let Some(a) = self.amps[keep..].iter().find(|a| a.norm() > STRUCTURAL_TOL) {
            return Err(Error::ContractViolation(format!(
                "leading factors are not |0> (stray amplitude {:.3e})",
                a.norm()
            )));
        }
        Ok(PureState::from_parts(
            self.dims[count..].to_vec(),
            self.amps[..keep].to_vec(),
        ))
    }

    /// Splits a product state into consecutive groups of factors of the given sizes.
    ///
    /// Fails with a contract violation when the state is not (within fidelity
    /// tolerance) a product across the requested cut. The global phase is
    /// carried by the first group so that the tensor of the parts reproduces
    /// `self` exactly.
    pub fn split_groups(&self, sizes: &[usize], cap: Capacity) -> Result<Vec<PureState>> {
        if sizes.iter().sum::<usize>() != self.dims.len() || sizes.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "group sizes {sizes:?} do not partition {} factors",
                self.dims.len()
            )));
        }
        let pivot = self
            .amps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
            .map(|(i, _)| i)
            .expect("state has at least one amplitude");

        let mut parts = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &size in sizes {
            let group_dims = self.dims[start..start + size].to_vec();
            let group_len = product(&group_dims);
            let right = product(&self.dims[start + size..]);
            let own = (pivot / right) % group_len;
            let base = pivot - own * right;
            let amps: Vec<Complex64> = (0..group_len)
                .map(|j| self.amps[base + j * right])
                .collect();
            parts.push(PureState::normalized(group_dims, amps)?);
            start += size;
        }

        let mut joined = parts[0].clone();
        for p in &parts[1..] {
            joined = joined.tensor(p, cap)?;
        }
        let overlap = joined.inner(self)?;
        if overlap.norm_sqr() < 1.0 - FIDELITY_TOL {
            return Err(Error::ContractViolation(format!(
                "state is not a product across groups {sizes:?} (fidelity {:.12})",
                overlap.norm_sqr()
            )));
        }
        let phase = overlap / overlap.norm();
        parts[0].amps.iter_mut().for_each(|a| *a *= phase);
        Ok(parts)
    }

    /// Splits a product state into its single factors.
    pub fn factorize(&self, cap: Capacity) -> Result<Vec<PureState>> {
        self.split_groups(&vec![1; self.dims.len()], cap)
    }
}

pub(crate) fn check_permutation(perm: &[usize], len: usize) -> Result<()> {
    if perm.len() != len {
        return Err(Error::InvalidPermutation(format!(
            "length {} for size {len}",
            perm.len()
        )));
    }
    let mut seen = vec![false; len];
    for &p in perm {
        if p >= len || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!(
                "{perm:?} is not a bijection on 0..{len}"
            )));
        }
    }
    Ok(())
}

pub(crate) fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Big-endian odometer step.
pub(crate) fn increment(digits: &mut [usize], dims: &[usize]) {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < dims[i] {
            return;
        }
        digits[i] = 0;
    }
}
