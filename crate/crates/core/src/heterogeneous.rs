//! Compression of distinct states whose coefficient vectors are permutations of
//! one reference vector, and its two compositions with homogeneous encoding.
//!
//! The heterogeneous encoder undoes each member's permutation locally, which
//! turns `phi_1 (x) .. (x) phi_m` into `m` copies of the reference state, then
//! applies the symmetric compression. The family (reference plus permutations)
//! is side information known to every node; it is not part of the payload.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::combinatorics::{multiset_count, multiset_count_big, qudit_equivalents, TypeRanker};
use crate::error::{Error, Result};
use crate::homogeneous::{
    decode_homogeneous, encode_homogeneous, SymmetricCompressed, SYMMETRIC_TOL,
};
use crate::state::{
    check_permutation, invert_permutation, Capacity, PureState, FIDELITY_TOL, STRUCTURAL_TOL,
};
use crate::symmetric::{compress_block, expand_block, product_state_coefficients};

/// Tolerance on individual coefficient matches.
pub const COEFFICIENT_TOL: f64 = 1e-9;

/// A reference coefficient vector and the permutation realizing each member.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFamily {
    reference: Vec<Complex64>,
    members: Vec<Vec<usize>>,
}

impl CoefficientFamily {
    pub fn new(reference: Vec<Complex64>, members: Vec<Vec<usize>>) -> Result<Self> {
        let d = reference.len();
        if d < 1 {
            return Err(Error::InvalidParameter("empty reference vector".into()));
        }
        let norm = reference.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized { norm });
        }
        if members.is_empty() {
            return Err(Error::InvalidParameter(
                "family needs at least one member".into(),
            ));
        }
        for perm in &members {
            check_permutation(perm, d)?;
        }
        Ok(CoefficientFamily { reference, members })
    }

    /// Alphabet size.
    pub fn d(&self) -> usize {
        self.reference.len()
    }

    /// Number of members.
    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn reference(&self) -> &[Complex64] {
        &self.reference
    }

    pub fn permutations(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// Amplitudes of member `i`: `out[perm[j]] = reference[j]`.
    pub fn member_amplitudes(&self, i: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.d()];
        for (j, &p) in self.members[i].iter().enumerate() {
            out[p] = self.reference[j];
        }
        out
    }

    pub fn member_state(&self, i: usize) -> PureState {
        PureState::from_parts(vec![self.d()], self.member_amplitudes(i))
    }

    /// The family followed by `N`-copy homogeneous compression of every member.
    ///
    /// Its reference is the type-basis coefficient vector of `reference^{(x)N}`
    /// and member `i` permutes type indices the way its symbol permutation
    /// permutes count vectors.
    pub fn induced(&self, n: usize) -> Result<CoefficientFamily> {
        let d = self.d();
        let ranker = TypeRanker::new(n, d)?;
        let reference = product_state_coefficients(&self.reference, n)?;
        let members = self
            .members
            .iter()
            .map(|perm| {
                (0..ranker.len())
                    .map(|s| {
                        let counts = ranker.unrank(s);
                        let mut moved = vec![0; d];
                        for (a, &c) in counts.iter().enumerate() {
                            moved[perm[a]] = c;
                        }
                        ranker.rank(&moved)
                    })
                    .collect()
            })
            .collect();
        CoefficientFamily::new(reference, members)
    }

    /// Member `i` up to a global phase, which states recovered by splitting a
    /// product do not preserve.
    fn check_member(&self, i: usize, state: &PureState) -> Result<()> {
        if state.dims() != [self.d()] {
            return Err(Error::NotInFamily { member: i });
        }
        let fidelity = self.member_state(i).fidelity(state)?;
        if fidelity < 1.0 - FIDELITY_TOL {
            return Err(Error::NotInFamily { member: i });
        }
        Ok(())
    }
}

/// Greedy lexicographically smallest `perm` with `target[perm[j]] ~ reference[j]`.
fn match_permutation(reference: &[Complex64], target: &[Complex64]) -> Option<Vec<usize>> {
    let mut used = vec![false; target.len()];
    reference
        .iter()
        .map(|r| {
            let t = (0..target.len())
                .find(|&t| !used[t] && (target[t] - r).norm() <= COEFFICIENT_TOL)?;
            used[t] = true;
            Some(t)
        })
        .collect()
}

/// Recovers the family structure of `states`, taking `states[0]` as the reference.
pub fn detect_family(states: &[PureState]) -> Result<CoefficientFamily> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidParameter("family needs at least one state".into()))?;
    if first.num_factors() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "family members must be single factors, got {:?}",
            first.dims()
        )));
    }
    let reference = first.amplitudes().to_vec();
    let members = states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if s.dims() != first.dims() {
                return Err(Error::NotInFamily { member: i });
            }
            match_permutation(&reference, s.amplitudes()).ok_or(Error::NotInFamily { member: i })
        })
        .collect::<Result<Vec<_>>>()?;
    CoefficientFamily::new(reference, members)
}

/// `m` family members compressed onto one factor of dimension `H^m_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroCompressed {
    pub d: usize,
    pub m: usize,
    pub amplitudes: Vec<Complex64>,
    pub family: CoefficientFamily,
}

impl HeteroCompressed {
    pub fn to_state(&self) -> PureState {
        PureState::from_parts(vec![self.amplitudes.len()], self.amplitudes.clone())
    }

    pub fn from_state(state: &PureState, family: &CoefficientFamily) -> Result<Self> {
        let h = multiset_count(family.m() as u64, family.d())?;
        if state.dims() != [h.to_usize().unwrap_or(usize::MAX)] {
            return Err(Error::ShapeMismatch(format!(
                "payload dims {:?}, expected [{h}] for a {}-member family over {} levels",
                state.dims(),
                family.m(),
                family.d()
            )));
        }
        Ok(HeteroCompressed {
            d: family.d(),
            m: family.m(),
            amplitudes: state.amplitudes().to_vec(),
            family: family.clone(),
        })
    }
}

pub fn encode_heterogeneous(
    states: &[PureState],
    family: &CoefficientFamily,
    cap: Capacity,
) -> Result<HeteroCompressed> {
    if states.len() != family.m() {
        return Err(Error::ShapeMismatch(format!(
            "{} states for a {}-member family",
            states.len(),
            family.m()
        )));
    }
    for (i, s) in states.iter().enumerate() {
        family.check_member(i, s)?;
    }
    cap.check_dims(&vec![family.d(); family.m()])?;
    let mut joint = states[0].clone();
    for s in &states[1..] {
        joint = joint.tensor(s, cap)?;
    }
    for (i, perm) in family.permutations().iter().enumerate() {
        joint = joint.apply_local_permutation(i, &invert_permutation(perm))?;
    }
    let (compressed, residual) = compress_block(&joint, 0, family.m(), cap)?;
    if residual > SYMMETRIC_TOL {
        return Err(Error::NotSymmetric { residual });
    }
    Ok(HeteroCompressed {
        d: family.d(),
        m: family.m(),
        amplitudes: compressed.into_amplitudes(),
        family: family.clone(),
    })
}

/// Inverse of [`encode_heterogeneous`]; returns the `m`-factor joint state.
pub fn decode_heterogeneous(c: &HeteroCompressed, cap: Capacity) -> Result<PureState> {
    let mut joint = expand_block(&c.to_state(), 0, c.d, c.m, cap)?;
    for (i, perm) in c.family.permutations().iter().enumerate() {
        joint = joint.apply_local_permutation(i, perm)?;
    }
    Ok(joint)
}

/// Side information for decoding a homo-hetero payload.
#[derive(Debug, Clone, PartialEq)]
pub struct HomoHeteroMeta {
    pub d: usize,
    pub n: usize,
    pub family: CoefficientFamily,
    /// The family over `H^N_d` levels seen by the heterogeneous stage.
    pub induced: CoefficientFamily,
}

impl HomoHeteroMeta {
    pub fn m(&self) -> usize {
        self.family.m()
    }
}

/// Homogeneous compression of each `phi_i^{(x)N}`, then heterogeneous compression
/// of the `m` results. Output dimension `H^m_{H^N_d}`.
pub fn homo_hetero_encode(
    phis: &[PureState],
    n: usize,
    cap: Capacity,
) -> Result<(PureState, HomoHeteroMeta)> {
    let family = detect_family(phis)?;
    let blocks = phis
        .iter()
        .map(|p| p.power(n, cap))
        .collect::<Result<Vec<_>>>()?;
    homo_hetero_encode_copies(&blocks, n, &family, cap)
}

/// Homo-hetero encoding of already materialized blocks `phi_i^{(x)N}`.
pub fn homo_hetero_encode_copies(
    blocks: &[PureState],
    n: usize,
    family: &CoefficientFamily,
    cap: Capacity,
) -> Result<(PureState, HomoHeteroMeta)> {
    let d = family.d();
    let compressed = blocks
        .iter()
        .map(|b| encode_homogeneous(b, d, n, cap).map(|c| c.to_state()))
        .collect::<Result<Vec<_>>>()?;
    let induced = family.induced(n)?;
    let outer = encode_heterogeneous(&compressed, &induced, cap)?;
    let meta = HomoHeteroMeta {
        d,
        n,
        family: family.clone(),
        induced,
    };
    Ok((outer.to_state(), meta))
}

/// Returns `phi_i^{(x)N}` for each member.
pub fn homo_hetero_decode(
    omega: &PureState,
    meta: &HomoHeteroMeta,
    cap: Capacity,
) -> Result<Vec<PureState>> {
    let outer = HeteroCompressed::from_state(omega, &meta.induced)?;
    let joint = decode_heterogeneous(&outer, cap)?;
    joint
        .factorize(cap)?
        .iter()
        .map(|f| decode_homogeneous(&SymmetricCompressed::from_state(f, meta.d, meta.n)?, cap))
        .collect()
}

/// Side information for decoding a hetero-homo payload.
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroHomoMeta {
    pub d: usize,
    pub n: usize,
    pub family: CoefficientFamily,
    /// `H^m_d`, the alphabet of the homogeneous stage.
    pub inner_dim: usize,
}

impl HeteroHomoMeta {
    pub fn m(&self) -> usize {
        self.family.m()
    }
}

/// Heterogeneous compression of `phi_1 (x) .. (x) phi_m`, then homogeneous
/// compression of `N` copies of the result. Output dimension `H^N_{H^m_d}`.
pub fn hetero_homo_encode(
    phis: &[PureState],
    n: usize,
    cap: Capacity,
) -> Result<(PureState, HeteroHomoMeta)> {
    let family = detect_family(phis)?;
    let inner = encode_heterogeneous(phis, &family, cap)?;
    let inner_dim = inner.amplitudes.len();
    let copies = inner.to_state().power(n, cap)?;
    let outer = encode_homogeneous(&copies, inner_dim, n, cap)?;
    let meta = HeteroHomoMeta {
        d: family.d(),
        n,
        family,
        inner_dim,
    };
    Ok((outer.to_state(), meta))
}

/// Returns the `N` copies of `phi_1 (x) .. (x) phi_m`, one `m`-factor state per copy.
///
/// Each copy is split off the decoded joint state; the split fails with a
/// contract violation if the copies are not in a product state.
pub fn hetero_homo_decode(
    omega: &PureState,
    meta: &HeteroHomoMeta,
    cap: Capacity,
) -> Result<Vec<PureState>> {
    let outer = SymmetricCompressed::from_state(omega, meta.inner_dim, meta.n)?;
    let copies = decode_homogeneous(&outer, cap)?;
    copies
        .factorize(cap)?
        .iter()
        .map(|c| decode_heterogeneous(&HeteroCompressed::from_state(c, &meta.family)?, cap))
        .collect()
}

/// Multicast encoding applied on the bottleneck link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Direct,
    Homogeneous,
    HomoHetero,
    HeteroHomo,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Direct,
        Scheme::Homogeneous,
        Scheme::HomoHetero,
        Scheme::HeteroHomo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Direct => "direct",
            Scheme::Homogeneous => "homogeneous",
            Scheme::HomoHetero => "homo_hetero",
            Scheme::HeteroHomo => "hetero_homo",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl serde::Serialize for Scheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.as_str() == s || x.as_str().replace('_', "-") == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme {s:?}")))
    }
}

/// Exact transmitted dimension and its bandwidth in qudit-equivalents.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeBandwidth {
    pub dimension: BigUint,
    pub qudits: f64,
}

impl SchemeBandwidth {
    fn from_dimension(dimension: BigUint, d: usize) -> Self {
        let qudits = qudit_equivalents(&dimension, d);
        SchemeBandwidth { dimension, qudits }
    }
}

/// Bottleneck bandwidth of every scheme for `N` terminals and `m` states.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthTable {
    pub direct: SchemeBandwidth,
    pub homogeneous: SchemeBandwidth,
    pub homo_hetero: SchemeBandwidth,
    pub hetero_homo: SchemeBandwidth,
}

impl BandwidthTable {
    pub fn get(&self, scheme: Scheme) -> &SchemeBandwidth {
        match scheme {
            Scheme::Direct => &self.direct,
            Scheme::Homogeneous => &self.homogeneous,
            Scheme::HomoHetero => &self.homo_hetero,
            Scheme::HeteroHomo => &self.hetero_homo,
        }
    }
}

pub fn bandwidth_table(d: usize, m: usize, n: usize) -> Result<BandwidthTable> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let h_nd = multiset_count(n as u64, d)?;
    let h_md = multiset_count(m as u64, d)?;
    let db = BigUint::from(d);
    let direct = SchemeBandwidth {
        dimension: db.pow((n * m) as u32),
        qudits: (n * m) as f64,
    };
    let homogeneous = SchemeBandwidth {
        qudits: m as f64 * qudit_equivalents(&h_nd, d),
        dimension: h_nd.pow(m as u32),
    };
    Ok(BandwidthTable {
        direct,
        homogeneous,
        homo_hetero: SchemeBandwidth::from_dimension(multiset_count_big(m as u64, &h_nd), d),
        hetero_homo: SchemeBandwidth::from_dimension(multiset_count_big(n as u64, &h_md), d),
    })
}

/// Fidelity between two lists of states, factor by factor; the minimum is returned.
pub fn min_fidelity(a: &[PureState], b: &[PureState]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} states against {}",
            a.len(),
            b.len()
        )));
    }
    a.iter()
        .zip(b)
        .try_fold(1.0f64, |acc, (x, y)| Ok(acc.min(x.fidelity(y)?)))
}

/// True when `fidelity >= 1 - FIDELITY_TOL`.
pub fn is_lossless(fidelity: f64) -> bool {
    fidelity >= 1.0 - FIDELITY_TOL
}
