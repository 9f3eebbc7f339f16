//! Multicast topologies and per-link bandwidth accounting.
//!
//! Star networks have a single bottleneck link between the encoder (the source
//! `S`, or the merge node `X` when there are several sources) and the node `B`
//! that fans out to the terminals. On the ring the source feeds two half-paths
//! of `N/2` nodes each; every node decodes, keeps one copy for its cluster and
//! re-encodes the rest for the next hop.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::combinatorics::{ln_multiset_count_big, multiset_count, qudit_equivalents};
use crate::error::{Error, Result};
use crate::heterogeneous::{
    bandwidth_table, detect_family, hetero_homo_decode, hetero_homo_encode, homo_hetero_decode,
    homo_hetero_encode, homo_hetero_encode_copies, CoefficientFamily, Scheme,
};
use crate::homogeneous::{decode_homogeneous, encode_homogeneous};
use crate::state::{Capacity, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Star,
    MultiSourceStar,
    Ring,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Star => "star",
            Topology::MultiSourceStar => "multi_source_star",
            Topology::Ring => "ring",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Topology::Star, Topology::MultiSourceStar, Topology::Ring]
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown topology {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkSpec {
    pub topology: Topology,
    /// Terminals (star) or clusters (ring).
    pub n: usize,
    /// States per source set, or terminals per cluster.
    pub m: usize,
    pub d: usize,
    pub scheme: Scheme,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidParameter(format!(
                "N and m must be positive, got N={} m={}",
                self.n, self.m
            )));
        }
        if self.d < 2 {
            return Err(Error::InvalidParameter(format!(
                "d must be at least 2, got {}",
                self.d
            )));
        }
        if self.topology == Topology::Ring {
            check_ring(self.n)?;
            if self.scheme == Scheme::HeteroHomo {
                return Err(Error::InvalidParameter(
                    "the ring protocol is defined for direct, homogeneous and homo_hetero".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkUsage {
    pub link: String,
    /// Exact dimension of everything sent over the link in one use.
    pub dimension: BigUint,
    pub qudits: f64,
}

impl LinkUsage {
    fn new(link: String, dimension: BigUint, d: usize) -> Self {
        let qudits = qudit_equivalents(&dimension, d);
        LinkUsage {
            link,
            dimension,
            qudits,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthReport {
    pub spec: NetworkSpec,
    pub links: Vec<LinkUsage>,
    pub total: f64,
}

/// One CSV row of a [`BandwidthReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub topology: String,
    pub scheme: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub link_id: String,
    pub dimension: String,
    pub qudit_equivalents: f64,
}

impl BandwidthReport {
    fn new(spec: NetworkSpec, links: Vec<LinkUsage>) -> Self {
        let total = links.iter().map(|l| l.qudits).sum();
        BandwidthReport { spec, links, total }
    }

    pub fn rows(&self) -> Vec<ReportRow> {
        self.links
            .iter()
            .map(|l| ReportRow {
                topology: self.spec.topology.to_string(),
                scheme: self.spec.scheme.to_string(),
                n: self.spec.n,
                m: self.spec.m,
                d: self.spec.d,
                link_id: l.link.clone(),
                dimension: l.dimension.to_string(),
                qudit_equivalents: l.qudits,
            })
            .collect()
    }
}

fn bottleneck_link(topology: Topology) -> &'static str {
    match topology {
        Topology::MultiSourceStar => "X->B",
        _ => "S->B",
    }
}

fn check_star(spec: &NetworkSpec) -> Result<()> {
    spec.validate()?;
    if spec.topology == Topology::Ring {
        return Err(Error::InvalidParameter(
            "star model requested for a ring".into(),
        ));
    }
    Ok(())
}

pub fn star_bandwidth(spec: &NetworkSpec) -> Result<BandwidthReport> {
    check_star(spec)?;
    let table = bandwidth_table(spec.d, spec.m, spec.n)?;
    let entry = table.get(spec.scheme);
    let link = LinkUsage {
        link: bottleneck_link(spec.topology).into(),
        dimension: entry.dimension.clone(),
        qudits: entry.qudits,
    };
    Ok(BandwidthReport::new(*spec, vec![link]))
}

fn product_dimension(states: &[PureState]) -> BigUint {
    states
        .iter()
        .flat_map(|s| s.dims().iter())
        .fold(BigUint::one(), |acc, &d| acc * BigUint::from(d))
}

fn check_members(phis: &[PureState], spec: &NetworkSpec) -> Result<()> {
    if phis.len() != spec.m || phis.iter().any(|p| p.dims() != [spec.d]) {
        return Err(Error::ShapeMismatch(format!(
            "expected {} single-factor states of dimension {}",
            spec.m, spec.d
        )));
    }
    Ok(())
}

/// Fidelity of each delivered state, `[terminal][member]`.
pub type DeliveryMatrix = Vec<Vec<f64>>;

/// Encodes at the source, sends one payload over the bottleneck, decodes at `B`
/// and hands member `i` to every terminal.
pub fn simulate_star(
    spec: &NetworkSpec,
    phis: &[PureState],
    cap: Capacity,
) -> Result<(BandwidthReport, DeliveryMatrix)> {
    check_star(spec)?;
    check_members(phis, spec)?;
    let (n, m, d) = (spec.n, spec.m, spec.d);
    let link = bottleneck_link(spec.topology).to_string();

    // received[i] holds the N copies of member i after decoding at B
    let (usage, received): (LinkUsage, Vec<Vec<PureState>>) = match spec.scheme {
        Scheme::Direct => {
            let blocks = phis
                .iter()
                .map(|p| p.power(n, cap))
                .collect::<Result<Vec<_>>>()?;
            let usage = LinkUsage::new(link, product_dimension(&blocks), d);
            (
                usage,
                blocks
                    .iter()
                    .map(|b| b.factorize(cap))
                    .collect::<Result<_>>()?,
            )
        }
        Scheme::Homogeneous => {
            let payload = phis
                .iter()
                .map(|p| encode_homogeneous(&p.power(n, cap)?, d, n, cap))
                .collect::<Result<Vec<_>>>()?;
            let sent: Vec<PureState> = payload.iter().map(|c| c.to_state()).collect();
            let usage = LinkUsage::new(link, product_dimension(&sent), d);
            let received = payload
                .iter()
                .map(|c| decode_homogeneous(c, cap)?.factorize(cap))
                .collect::<Result<_>>()?;
            (usage, received)
        }
        Scheme::HomoHetero => {
            let (omega, meta) = homo_hetero_encode(phis, n, cap)?;
            let usage = LinkUsage::new(link, product_dimension(std::slice::from_ref(&omega)), d);
            let received = homo_hetero_decode(&omega, &meta, cap)?
                .iter()
                .map(|b| b.factorize(cap))
                .collect::<Result<_>>()?;
            (usage, received)
        }
        Scheme::HeteroHomo => {
            let (omega, meta) = hetero_homo_encode(phis, n, cap)?;
            let usage = LinkUsage::new(link, product_dimension(std::slice::from_ref(&omega)), d);
            let copies = hetero_homo_decode(&omega, &meta, cap)?
                .iter()
                .map(|c| c.factorize(cap))
                .collect::<Result<Vec<_>>>()?;
            let received = (0..m)
                .map(|i| copies.iter().map(|c| c[i].clone()).collect())
                .collect();
            (usage, received)
        }
    };

    let mut fidelities = vec![vec![0.0; m]; n];
    for (i, copies) in received.iter().enumerate() {
        for (t, copy) in copies.iter().enumerate() {
            fidelities[t][i] = copy.fidelity(&phis[i])?;
        }
    }
    Ok((BandwidthReport::new(*spec, vec![usage]), fidelities))
}

fn check_ring(n: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::OddRing { n });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TotalMode {
    Exact,
    /// Leading-order asymptotic form.
    Approx,
}

/// `2m sum_{k=1}^{N/2} k = m (N/2)(N/2 + 1)`.
pub fn ring_total_direct(n: usize, m: usize) -> Result<f64> {
    check_ring(n)?;
    let half = (n / 2) as f64;
    Ok(m as f64 * half * (half + 1.0))
}

/// Exact: `2m sum_{k=1}^{N/2} log_d H^k_d`. Approx: `m N d log_d(N/2)`.
pub fn ring_total_homogeneous(n: usize, m: usize, d: usize, mode: TotalMode) -> Result<f64> {
    check_ring(n)?;
    let ln_d = (d as f64).ln();
    Ok(match mode {
        TotalMode::Exact => {
            let mut sum = 0.0;
            for k in 1..=n / 2 {
                sum += qudit_equivalents(&multiset_count(k as u64, d)?, d);
            }
            2.0 * m as f64 * sum
        }
        TotalMode::Approx => (m * n * d) as f64 * ((n / 2) as f64).ln() / ln_d,
    })
}

/// Exact: `2 sum_{k=1}^{N/2} log_d H^m_{H^k_d}`. Approx: `(m-1) N d log_d(N/2)`.
pub fn ring_total_heterogeneous(n: usize, m: usize, d: usize, mode: TotalMode) -> Result<f64> {
    check_ring(n)?;
    let ln_d = (d as f64).ln();
    Ok(match mode {
        TotalMode::Exact => {
            let mut sum = 0.0;
            for k in 1..=n / 2 {
                let h = multiset_count(k as u64, d)?;
                sum += ln_multiset_count_big(m as u64, &h) / ln_d;
            }
            2.0 * sum
        }
        TotalMode::Approx => ((m - 1) * n * d) as f64 * ((n / 2) as f64).ln() / ln_d,
    })
}

fn ring_link_ids(n: usize) -> [Vec<String>; 2] {
    let half = n / 2;
    let name = |i: usize| {
        if i == 0 {
            "S".to_string()
        } else {
            format!("B{i}")
        }
    };
    let cw = (0..half)
        .map(|j| format!("cw:{}->{}", name(j), name(j + 1)))
        .collect();
    let ccw = (0..half)
        .map(|j| {
            let from = if j == 0 {
                "S".to_string()
            } else {
                name(n + 1 - j)
            };
            format!("ccw:{}->{}", from, name(n - j))
        })
        .collect();
    [cw, ccw]
}

/// Node label served at hop `hop` of the clockwise (`0`) or counterclockwise (`1`) path.
fn ring_node(n: usize, side: usize, hop: usize) -> usize {
    if side == 0 {
        hop + 1
    } else {
        n - hop
    }
}

fn ring_link_dimension(scheme: Scheme, k: usize, m: usize, d: usize) -> Result<BigUint> {
    Ok(match scheme {
        Scheme::Direct => BigUint::from(d).pow((k * m) as u32),
        Scheme::Homogeneous => multiset_count(k as u64, d)?.pow(m as u32),
        Scheme::HomoHetero => {
            crate::combinatorics::multiset_count_big(m as u64, &multiset_count(k as u64, d)?)
        }
        Scheme::HeteroHomo => {
            return Err(Error::InvalidParameter(
                "hetero_homo is not a ring scheme".into(),
            ));
        }
    })
}

/// Per-link ledger of the ring protocol from exact counts, without simulating states.
pub fn ring_report(spec: &NetworkSpec) -> Result<BandwidthReport> {
    spec.validate()?;
    if spec.topology != Topology::Ring {
        return Err(Error::InvalidParameter(
            "ring ledger requested for a star".into(),
        ));
    }
    let half = spec.n / 2;
    let mut links = Vec::with_capacity(spec.n);
    for ids in ring_link_ids(spec.n) {
        for (hop, id) in ids.into_iter().enumerate() {
            let dim = ring_link_dimension(spec.scheme, half - hop, spec.m, spec.d)?;
            links.push(LinkUsage::new(id, dim, spec.d));
        }
    }
    Ok(BandwidthReport::new(*spec, links))
}

/// One state handed to a terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    /// Ring node label, `1..=N`.
    pub node: usize,
    pub member: usize,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RingTrace {
    /// Clockwise path first, in hop order.
    pub deliveries: Vec<Delivery>,
}

impl RingTrace {
    pub fn min_fidelity(&self) -> f64 {
        self.deliveries
            .iter()
            .map(|d| d.fidelity)
            .fold(1.0, f64::min)
    }

    pub fn clusters_served(&self) -> usize {
        let mut nodes: Vec<usize> = self.deliveries.iter().map(|d| d.node).collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes.len()
    }
}

type HalfPath = (Vec<LinkUsage>, Vec<Delivery>);

fn simulate_half_path(
    spec: &NetworkSpec,
    phis: &[PureState],
    family: Option<&CoefficientFamily>,
    side: usize,
    ids: Vec<String>,
    cap: Capacity,
) -> Result<HalfPath> {
    let (d, half) = (spec.d, spec.n / 2);
    let mut blocks = phis
        .iter()
        .map(|p| p.power(half, cap))
        .collect::<Result<Vec<_>>>()?;
    let mut links = Vec::with_capacity(half);
    let mut deliveries = Vec::with_capacity(half * spec.m);

    for (hop, id) in ids.into_iter().enumerate() {
        let remaining = half - hop;
        // Encode at the sender, transmit, decode at the receiving node.
        let (sent, received): (BigUint, Vec<PureState>) = match spec.scheme {
            Scheme::Direct => (product_dimension(&blocks), blocks),
            Scheme::Homogeneous => {
                let payload = blocks
                    .iter()
                    .map(|b| encode_homogeneous(b, d, remaining, cap))
                    .collect::<Result<Vec<_>>>()?;
                let states: Vec<PureState> = payload.iter().map(|c| c.to_state()).collect();
                let received = payload
                    .iter()
                    .map(|c| decode_homogeneous(c, cap))
                    .collect::<Result<_>>()?;
                (product_dimension(&states), received)
            }
            Scheme::HomoHetero => {
                let family = family.expect("family detected for homo_hetero");
                let (omega, meta) = homo_hetero_encode_copies(&blocks, remaining, family, cap)?;
                let dim = product_dimension(std::slice::from_ref(&omega));
                (dim, homo_hetero_decode(&omega, &meta, cap)?)
            }
            Scheme::HeteroHomo => unreachable!("rejected by validate"),
        };
        links.push(LinkUsage::new(id, sent, d));

        let node = ring_node(spec.n, side, hop);
        let mut forward = Vec::with_capacity(received.len());
        for (i, block) in received.into_iter().enumerate() {
            let (local, rest) = if remaining > 1 {
                let mut parts = block.split_groups(&[1, remaining - 1], cap)?;
                let rest = parts.pop().expect("two groups");
                (parts.pop().expect("two groups"), Some(rest))
            } else {
                (block, None)
            };
            deliveries.push(Delivery {
                node,
                member: i,
                fidelity: local.fidelity(&phis[i])?,
            });
            forward.extend(rest);
        }
        blocks = forward;
    }
    Ok((links, deliveries))
}

/// Runs the ring protocol on actual states. Both half-paths run concurrently;
/// the clockwise ledger comes first.
pub fn simulate_ring(
    n: usize,
    m: usize,
    d: usize,
    phis: &[PureState],
    scheme: Scheme,
    cap: Capacity,
) -> Result<(BandwidthReport, RingTrace)> {
    let spec = NetworkSpec {
        topology: Topology::Ring,
        n,
        m,
        d,
        scheme,
    };
    spec.validate()?;
    check_members(phis, &spec)?;
    let family = match scheme {
        Scheme::HomoHetero => Some(detect_family(phis)?),
        _ => None,
    };
    let [cw_ids, ccw_ids] = ring_link_ids(n);
    let (cw, ccw) = std::thread::scope(|s| {
        let ccw = s.spawn(|| simulate_half_path(&spec, phis, family.as_ref(), 1, ccw_ids, cap));
        let cw = simulate_half_path(&spec, phis, family.as_ref(), 0, cw_ids, cap);
        (cw, ccw.join().expect("counterclockwise path panicked"))
    });
    let (mut links, mut deliveries) = cw?;
    let (ccw_links, ccw_deliveries) = ccw?;
    links.extend(ccw_links);
    deliveries.extend(ccw_deliveries);
    Ok((BandwidthReport::new(spec, links), RingTrace { deliveries }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn q(amps: &[f64]) -> PureState {
        PureState::qudit(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect()).unwrap()
    }

    fn star(scheme: Scheme, n: usize, m: usize, d: usize) -> NetworkSpec {
        NetworkSpec {
            topology: Topology::Star,
            n,
            m,
            d,
            scheme,
        }
    }

    #[test]
    fn star_examples() {
        assert_eq!(
            star_bandwidth(&star(Scheme::Direct, 3, 2, 2))
                .unwrap()
                .total,
            6.0
        );
        let r = star_bandwidth(&star(Scheme::Homogeneous, 4, 1, 2)).unwrap();
        assert!((r.total - 5f64.log2()).abs() < 1e-12);
        let r = star_bandwidth(&star(Scheme::HomoHetero, 2, 2, 2)).unwrap();
        assert!((r.total - 6f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn multi_source_matches_star() {
        for scheme in Scheme::ALL {
            let a = star_bandwidth(&star(scheme, 5, 3, 3)).unwrap();
            let mut spec = star(scheme, 5, 3, 3);
            spec.topology = Topology::MultiSourceStar;
            let b = star_bandwidth(&spec).unwrap();
            assert_eq!(a.total, b.total);
            assert_eq!(b.links[0].link, "X->B");
        }
    }

    #[test]
    fn simulate_star_homogeneous() {
        let phi = q(&[0.6, 0.8]);
        let (r, f) = simulate_star(
            &star(Scheme::Homogeneous, 3, 1, 2),
            &[phi],
            Capacity::DEFAULT,
        )
        .unwrap();
        assert!((r.total - 2.0).abs() < 1e-12);
        assert_eq!(f.len(), 3);
        assert!(f.iter().flatten().all(|&x| x >= 1.0 - 1e-9));
    }

    #[test]
    fn simulate_star_hetero_homo() {
        let phis = [q(&[0.6, 0.8]), q(&[0.8, 0.6])];
        let (r, f) =
            simulate_star(&star(Scheme::HeteroHomo, 2, 2, 2), &phis, Capacity::DEFAULT).unwrap();
        assert!((r.total - 6f64.log2()).abs() < 1e-12);
        assert_eq!(f.iter().flatten().count(), 4);
        assert!(f.iter().flatten().all(|&x| x >= 1.0 - 1e-9));
    }

    #[test]
    fn ring_direct_examples() {
        assert_eq!(ring_total_direct(4, 2).unwrap(), 12.0);
        assert_eq!(ring_total_direct(2, 5).unwrap(), 10.0);
        assert_eq!(ring_total_direct(8, 1).unwrap(), 20.0);
        assert_eq!(ring_total_direct(5, 1), Err(Error::OddRing { n: 5 }));
    }

    #[test]
    fn ring_exact_examples() {
        let h = ring_total_homogeneous(4, 2, 2, TotalMode::Exact).unwrap();
        assert!((h - 4.0 * (1.0 + 3f64.log2())).abs() < 1e-12);
        assert_eq!(
            ring_total_homogeneous(2, 1, 2, TotalMode::Exact).unwrap(),
            2.0
        );
        let x = ring_total_heterogeneous(4, 2, 2, TotalMode::Exact).unwrap();
        assert!((x - 2.0 * (3f64.log2() + 6f64.log2())).abs() < 1e-12);
        assert!(ring_total_heterogeneous(3, 2, 2, TotalMode::Exact).is_err());
    }

    #[test]
    fn ring_single_member_heterogeneous_is_homogeneous() {
        for n in [2, 6, 20] {
            let a = ring_total_heterogeneous(n, 1, 3, TotalMode::Exact).unwrap();
            let b = ring_total_homogeneous(n, 1, 3, TotalMode::Exact).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn ring_link_names() {
        let [cw, ccw] = ring_link_ids(4);
        assert_eq!(cw, vec!["cw:S->B1", "cw:B1->B2"]);
        assert_eq!(ccw, vec!["ccw:S->B4", "ccw:B4->B3"]);
    }

    #[test]
    fn ring_rejects_hetero_homo() {
        let phis = [q(&[0.6, 0.8])];
        assert!(simulate_ring(4, 1, 2, &phis, Scheme::HeteroHomo, Capacity::DEFAULT).is_err());
    }

    #[test]
    fn ring_ledger_matches_totals() {
        let spec = NetworkSpec {
            topology: Topology::Ring,
            n: 6,
            m: 2,
            d: 3,
            scheme: Scheme::HomoHetero,
        };
        let r = ring_report(&spec).unwrap();
        assert_eq!(r.links.len(), 6);
        let exact = ring_total_heterogeneous(6, 2, 3, TotalMode::Exact).unwrap();
        assert!((r.total - exact).abs() < 1e-9);
    }

    #[test]
    fn ring_simulation_homogeneous_small() {
        let phis = [q(&[0.6, 0.8])];
        let (r, trace) =
            simulate_ring(4, 1, 2, &phis, Scheme::Homogeneous, Capacity::DEFAULT).unwrap();
        assert!((r.total - 2.0 * (1.0 + 3f64.log2())).abs() < 1e-9);
        assert_eq!(trace.clusters_served(), 4);
        assert!(trace.min_fidelity() >= 1.0 - 1e-9);
    }

    #[test]
    fn ring_simulation_direct() {
        let phis = [q(&[0.6, 0.8]), q(&[0.8, 0.6])];
        let (r, trace) = simulate_ring(2, 2, 2, &phis, Scheme::Direct, Capacity::DEFAULT).unwrap();
        assert_eq!(r.total, 4.0);
        assert_eq!(trace.clusters_served(), 2);
        assert_eq!(trace.deliveries.len(), 4);
    }
}
