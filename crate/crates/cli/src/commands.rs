use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use qmcast_core::heterogeneous::{
    self, decode_heterogeneous, detect_family, encode_heterogeneous, hetero_homo_decode,
    hetero_homo_encode, homo_hetero_decode, homo_hetero_encode, homo_hetero_encode_copies,
};
use qmcast_core::homogeneous::{
    decode_homogeneous, encode_homogeneous, plan_recursion, recursive_decode,
    recursive_encode_state, tradeoff_point,
};
use qmcast_core::io::{read_family, read_state};
use qmcast_core::network::{
    ring_report, ring_total_direct, ring_total_heterogeneous, ring_total_homogeneous,
    simulate_ring, NetworkSpec, ReportRow, Topology, TotalMode,
};
use qmcast_core::{Capacity, CoefficientFamily, Error, PureState, Result, Scheme};

use crate::output::emit;
use crate::{parse_range, parse_scheme, RingArgs, RoundtripArgs, TableArgs, TradeoffArgs};

#[derive(Serialize)]
struct TradeoffRow {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    k: usize,
    #[serde(rename = "L_exact")]
    l_exact: Option<f64>,
    output_dimension: Option<String>,
    #[serde(rename = "logD_exact")]
    log_d_exact: Option<f64>,
    #[serde(rename = "D")]
    complexity_dimension: Option<String>,
    #[serde(rename = "L_closed")]
    l_closed: f64,
    #[serde(rename = "logD_closed")]
    log_d_closed: f64,
    /// The `_closed` columns are approximations.
    approx: bool,
}

pub fn tradeoff(args: &TradeoffArgs) -> Result<()> {
    let ks = match args.k {
        Some(k) => vec![k],
        None => parse_range(&args.k_range)?,
    };
    let rows = ks
        .par_iter()
        .map(|&k| {
            let p = tradeoff_point(args.d, args.n, k)?;
            let exact = p.exact.as_ref();
            Ok(TradeoffRow {
                d: args.d,
                n: args.n,
                k,
                l_exact: exact.map(|s| s.bandwidth()),
                output_dimension: exact.map(|s| s.output_dimension().to_string()),
                log_d_exact: exact.and_then(|s| s.log_complexity()),
                complexity_dimension: exact
                    .and_then(|s| s.complexity_dimension())
                    .map(|x| x.to_string()),
                l_closed: p.l_closed,
                log_d_closed: p.log_d_closed,
                approx: true,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(&rows, &args.common)
}

#[derive(Serialize)]
struct TableRow {
    scheme: Scheme,
    #[serde(rename = "N")]
    n: usize,
    m: usize,
    d: usize,
    dimension: String,
    bandwidth: f64,
}

pub fn bandwidth_table(args: &TableArgs) -> Result<()> {
    let ms = match (args.m, &args.m_range) {
        (Some(m), _) => vec![m],
        (None, Some(r)) => parse_range(r)?,
        (None, None) => vec![3, 20],
    };
    let ns = match args.n {
        Some(n) => vec![n],
        None => parse_range(&args.n_range)?,
    };
    let grid: Vec<(usize, usize)> = ms
        .iter()
        .flat_map(|&m| ns.iter().map(move |&n| (m, n)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(m, n)| {
            let t = heterogeneous::bandwidth_table(args.d, m, n)?;
            Ok(Scheme::ALL
                .iter()
                .map(|&scheme| {
                    let b = t.get(scheme);
                    TableRow {
                        scheme,
                        n,
                        m,
                        d: args.d,
                        dimension: b.dimension.to_string(),
                        bandwidth: b.qudits,
                    }
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    emit(
        &rows.into_iter().flatten().collect::<Vec<_>>(),
        &args.common,
    )
}

#[derive(Serialize)]
struct RingRow {
    scheme: Scheme,
    #[serde(rename = "N")]
    n: usize,
    m: usize,
    d: usize,
    exact: f64,
    approx: f64,
    rel_gap: f64,
    simulated: Option<f64>,
}

/// `alpha_j ~ sqrt(j+1)` with cyclic shifts as members.
fn default_family(d: usize, m: usize) -> Result<CoefficientFamily> {
    let total = (d * (d + 1) / 2) as f64;
    let reference = (0..d)
        .map(|j| Complex64::new(((j + 1) as f64 / total).sqrt(), 0.0))
        .collect();
    let members = (0..m)
        .map(|i| (0..d).map(|j| (j + i) % d).collect())
        .collect();
    CoefficientFamily::new(reference, members)
}

fn ring_totals(scheme: Scheme, n: usize, m: usize, d: usize) -> Result<(f64, f64)> {
    Ok(match scheme {
        Scheme::Direct => {
            let t = ring_total_direct(n, m)?;
            (t, t)
        }
        Scheme::Homogeneous => (
            ring_total_homogeneous(n, m, d, TotalMode::Exact)?,
            ring_total_homogeneous(n, m, d, TotalMode::Approx)?,
        ),
        Scheme::HomoHetero => (
            ring_total_heterogeneous(n, m, d, TotalMode::Exact)?,
            ring_total_heterogeneous(n, m, d, TotalMode::Approx)?,
        ),
        Scheme::HeteroHomo => {
            return Err(Error::InvalidParameter(
                "hetero_homo is not a ring scheme".into(),
            ));
        }
    })
}

pub fn ring(args: &RingArgs) -> Result<()> {
    let cap = args.common.capacity()?;
    let schemes = match &args.scheme {
        Some(s) => vec![parse_scheme(s)?],
        None => vec![Scheme::Direct, Scheme::Homogeneous, Scheme::HomoHetero],
    };
    for &scheme in &schemes {
        NetworkSpec {
            topology: Topology::Ring,
            n: args.n,
            m: args.m,
            d: args.d,
            scheme,
        }
        .validate()?;
    }
    let family = match &args.family {
        Some(path) => {
            let f = read_family(path)?;
            if f.d() != args.d || f.m() != args.m {
                return Err(Error::ShapeMismatch(format!(
                    "family has d={} m={}, ring asked for d={} m={}",
                    f.d(),
                    f.m(),
                    args.d,
                    args.m
                )));
            }
            f
        }
        None => default_family(args.d, args.m)?,
    };
    let phis: Vec<PureState> = (0..family.m()).map(|i| family.member_state(i)).collect();

    let simulate = |scheme: Scheme| match simulate_ring(args.n, args.m, args.d, &phis, scheme, cap)
    {
        Ok((report, _)) => Ok(Some(report)),
        Err(Error::Capacity { .. }) => Ok(None),
        Err(e) => Err(e),
    };

    if args.ledger {
        let rows = schemes
            .par_iter()
            .map(|&scheme| {
                let report = match simulate(scheme)? {
                    Some(r) => r,
                    None => ring_report(&NetworkSpec {
                        topology: Topology::Ring,
                        n: args.n,
                        m: args.m,
                        d: args.d,
                        scheme,
                    })?,
                };
                Ok(report.rows())
            })
            .collect::<Result<Vec<Vec<ReportRow>>>>()?;
        return emit(&rows.concat(), &args.common);
    }

    let rows = schemes
        .par_iter()
        .map(|&scheme| {
            let (exact, approx) = ring_totals(scheme, args.n, args.m, args.d)?;
            let simulated = simulate(scheme)?.map(|r| r.total);
            if let Some(s) = simulated {
                if (s - exact).abs() > 1e-9 {
                    return Err(Error::ContractViolation(format!(
                        "{scheme}: simulated total {s} differs from exact {exact}"
                    )));
                }
            }
            Ok(RingRow {
                scheme,
                n: args.n,
                m: args.m,
                d: args.d,
                exact,
                approx,
                rel_gap: (exact - approx).abs() / exact,
                simulated,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(&rows, &args.common)
}

#[derive(Serialize)]
struct RoundtripRow {
    scheme: String,
    in_dim: String,
    out_dim: String,
    fidelity: f64,
}

fn dimension(state: &PureState) -> BigUint {
    state
        .dims()
        .iter()
        .fold(BigUint::from(1u32), |acc, &d| acc * d)
}

/// The encoder input: the file's state, or `n` copies of it when it is a single factor.
fn copies(state: &PureState, n: Option<usize>, cap: Capacity) -> Result<PureState> {
    match n {
        Some(n) if state.num_factors() == 1 => state.power(n, cap),
        Some(n) if n != state.num_factors() => Err(Error::ShapeMismatch(format!(
            "--n {n} but the state has {} factors",
            state.num_factors()
        ))),
        _ => Ok(state.clone()),
    }
}

fn min_fidelity(pairs: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    pairs.into_iter().try_fold(1.0f64, |acc, f| Ok(acc.min(f?)))
}

pub fn roundtrip(args: &RoundtripArgs) -> Result<()> {
    let cap = args.common.capacity()?;
    let state = read_state(&args.state)?;
    let family = args.family.as_deref().map(read_family).transpose()?;
    let scheme = args.scheme.replace('-', "_");

    let (in_dim, out_dim, fidelity) = match scheme.as_str() {
        "direct" => (dimension(&state), dimension(&state), 1.0),
        "homogeneous" | "recursive" => {
            let block = copies(&state, args.n, cap)?;
            let (d, n) = (block.dims()[0], block.num_factors());
            let (out, back) = if scheme == "homogeneous" {
                let c = encode_homogeneous(&block, d, n, cap)?;
                (c.to_state(), decode_homogeneous(&c, cap)?)
            } else {
                let k = args
                    .k
                    .ok_or_else(|| Error::InvalidParameter("recursive needs --k".into()))?;
                let schedule = plan_recursion(d, n, k)?;
                let out = recursive_encode_state(&block, &schedule, cap)?;
                let back = recursive_decode(&out, &schedule, cap)?;
                (out, back)
            };
            (dimension(&block), dimension(&out), back.fidelity(&block)?)
        }
        "heterogeneous" => {
            let members = state.factorize(cap)?;
            let family = match family {
                Some(f) => f,
                None => detect_family(&members)?,
            };
            let c = encode_heterogeneous(&members, &family, cap)?;
            let back = decode_heterogeneous(&c, cap)?;
            (
                dimension(&state),
                dimension(&c.to_state()),
                back.fidelity(&state)?,
            )
        }
        "homo_hetero" => {
            let members = state.factorize(cap)?;
            let n = args.n.unwrap_or(1);
            let blocks = members
                .iter()
                .map(|p| p.power(n, cap))
                .collect::<Result<Vec<_>>>()?;
            let (omega, meta) = match &family {
                Some(f) => homo_hetero_encode_copies(&blocks, n, f, cap)?,
                None => homo_hetero_encode(&members, n, cap)?,
            };
            let back = homo_hetero_decode(&omega, &meta, cap)?;
            let fidelity = min_fidelity(back.iter().zip(&blocks).map(|(a, b)| a.fidelity(b)))?;
            (dimension(&state).pow(n as u32), dimension(&omega), fidelity)
        }
        "hetero_homo" => {
            let members = state.factorize(cap)?;
            let n = args.n.unwrap_or(1);
            if let Some(f) = &family {
                encode_heterogeneous(&members, f, cap)?;
            }
            let (omega, meta) = hetero_homo_encode(&members, n, cap)?;
            let back = hetero_homo_decode(&omega, &meta, cap)?;
            let fidelity = min_fidelity(back.iter().map(|c| c.fidelity(&state)))?;
            (dimension(&state).pow(n as u32), dimension(&omega), fidelity)
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown roundtrip scheme {other:?}"
            )))
        }
    };

    let row = RoundtripRow {
        scheme,
        in_dim: in_dim.to_string(),
        out_dim: out_dim.to_string(),
        fidelity,
    };
    emit(&[row], &args.common)?;
    if fidelity < 1.0 - args.tol {
        return Err(Error::ContractViolation(format!(
            "fidelity {fidelity} below 1 - {}",
            args.tol
        )));
    }
    Ok(())
}
