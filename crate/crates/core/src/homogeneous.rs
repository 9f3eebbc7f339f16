//! Homogeneous compression of `N` identical copies, its recursive blocked
//! variant, and the bandwidth/complexity trade-off formulas.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::combinatorics::{multiset_count, multiset_count_big, qudit_equivalents};
use crate::error::{Error, Result};
use crate::state::{Capacity, PureState};
use crate::symmetric::{compress_block, expand_block};

/// Largest symmetric residual an encoder accepts.
pub const SYMMETRIC_TOL: f64 = 1e-8;

/// `N` copies of a `d`-level state compressed onto a single factor of dimension `H^N_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCompressed {
    pub d: usize,
    pub n: usize,
    /// Indexed by type index over `(n, d)`.
    pub amplitudes: Vec<Complex64>,
}

impl SymmetricCompressed {
    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    /// The transmitted single-factor state.
    pub fn to_state(&self) -> PureState {
        PureState::from_parts(vec![self.amplitudes.len()], self.amplitudes.clone())
    }

    /// Reinterprets a received single-factor state as a compressed `(d, n)` payload.
    pub fn from_state(state: &PureState, d: usize, n: usize) -> Result<Self> {
        let h = multiset_count(n as u64, d)?;
        if state.dims() != [h.to_usize().unwrap_or(usize::MAX)] {
            return Err(Error::ShapeMismatch(format!(
                "payload dims {:?}, expected [{h}] for {n} copies over {d} levels",
                state.dims()
            )));
        }
        Ok(SymmetricCompressed {
            d,
            n,
            amplitudes: state.amplitudes().to_vec(),
        })
    }
}

fn check_homogeneous(state: &PureState, d: usize, n: usize) -> Result<()> {
    if n == 0 || state.dims().len() != n || state.dims().iter().any(|&x| x != d) {
        return Err(Error::ShapeMismatch(format!(
            "expected {n} factors of dimension {d}, got {:?}",
            state.dims()
        )));
    }
    Ok(())
}

pub fn encode_homogeneous(
    state: &PureState,
    d: usize,
    n: usize,
    cap: Capacity,
) -> Result<SymmetricCompressed> {
    check_homogeneous(state, d, n)?;
    let (compressed, residual) = compress_block(state, 0, n, cap)?;
    if residual > SYMMETRIC_TOL {
        return Err(Error::NotSymmetric { residual });
    }
    Ok(SymmetricCompressed {
        d,
        n,
        amplitudes: compressed.into_amplitudes(),
    })
}

pub fn decode_homogeneous(c: &SymmetricCompressed, cap: Capacity) -> Result<PureState> {
    expand_block(&c.to_state(), 0, c.d, c.n, cap)
}

/// Dimensions and bandwidths of every level of a recursive encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionSchedule {
    pub d: usize,
    pub n: usize,
    /// Group size.
    pub k: usize,
    /// Number of recursion levels, `log_k n`.
    pub levels: usize,
    /// `y[0] = d`, `y[i+1] = H^k_{y[i]}`.
    pub y: Vec<BigUint>,
    /// `l[i] = log_d y[i]`.
    pub l: Vec<f64>,
    /// `log_d k!`
    pub c: f64,
}

impl RecursionSchedule {
    /// Output bandwidth in qudit-equivalents.
    pub fn bandwidth(&self) -> f64 {
        self.l[self.levels]
    }

    pub fn output_dimension(&self) -> &BigUint {
        &self.y[self.levels]
    }

    /// Input dimension of the last encoding unitary, `y[levels-1]^k`. `None` without levels.
    pub fn complexity_dimension(&self) -> Option<BigUint> {
        self.levels
            .checked_sub(1)
            .map(|i| self.y[i].pow(self.k as u32))
    }

    /// `log_d` of [`complexity_dimension`](Self::complexity_dimension).
    pub fn log_complexity(&self) -> Option<f64> {
        self.levels
            .checked_sub(1)
            .map(|i| self.k as f64 * self.l[i])
    }
}

/// Exact `t` with `k^t = n`.
fn exact_log(n: usize, k: usize) -> Option<usize> {
    let mut power = 1usize;
    let mut t = 0;
    while power < n {
        power = power.checked_mul(k)?;
        t += 1;
    }
    (power == n).then_some(t)
}

pub fn plan_recursion(d: usize, n: usize, k: usize) -> Result<RecursionSchedule> {
    if d < 2 || k < 2 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need d >= 2, k >= 2, N >= 1; got d={d}, k={k}, N={n}"
        )));
    }
    let levels = exact_log(n, k).ok_or(Error::NotAPower { n, k })?;
    let mut y = vec![BigUint::from(d)];
    for i in 0..levels {
        let next = multiset_count_big(k as u64, &y[i]);
        y.push(next);
    }
    let l = y.iter().map(|yi| qudit_equivalents(yi, d)).collect();
    let c = ln_factorial(k as f64) / (d as f64).ln();
    Ok(RecursionSchedule {
        d,
        n,
        k,
        levels,
        y,
        l,
        c,
    })
}

fn dim_usize(y: &BigUint, cap: Capacity) -> Result<usize> {
    y.to_usize()
        .filter(|&v| v <= cap.get())
        .ok_or_else(|| Error::Capacity {
            required: y.to_string(),
            cap: cap.get(),
        })
}

/// Groups `k` copies at a time, compresses each group, and repeats on the outputs.
pub fn recursive_encode(
    phi: &PureState,
    n: usize,
    k: usize,
    cap: Capacity,
) -> Result<(PureState, RecursionSchedule)> {
    if phi.num_factors() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "expected a single factor, got {:?}",
            phi.dims()
        )));
    }
    let schedule = plan_recursion(phi.dims()[0], n, k)?;
    let state = phi.power(n, cap)?;
    let out = recursive_encode_state(&state, &schedule, cap)?;
    Ok((out, schedule))
}

/// Recursive encoding of an arbitrary state on `n` factors of dimension `d`.
pub fn recursive_encode_state(
    state: &PureState,
    schedule: &RecursionSchedule,
    cap: Capacity,
) -> Result<PureState> {
    check_homogeneous(state, schedule.d, schedule.n)?;
    let mut state = state.clone();
    for _ in 0..schedule.levels {
        let groups = state.num_factors() / schedule.k;
        // Groups already compressed this level sit at positions 0..g.
        for g in 0..groups {
            let (next, residual) = compress_block(&state, g, schedule.k, cap)?;
            if residual > SYMMETRIC_TOL {
                return Err(Error::NotSymmetric { residual });
            }
            state = next;
        }
    }
    Ok(state)
}

pub fn recursive_decode(
    state: &PureState,
    schedule: &RecursionSchedule,
    cap: Capacity,
) -> Result<PureState> {
    let top = dim_usize(schedule.output_dimension(), cap)?;
    if state.dims() != [top] {
        return Err(Error::ScheduleMismatch(format!(
            "state dims {:?} do not match schedule output [{top}]",
            state.dims()
        )));
    }
    let mut state = state.clone();
    for level in (1..=schedule.levels).rev() {
        let alphabet = dim_usize(&schedule.y[level - 1], cap)?;
        // Expand right to left so unexpanded groups keep their positions.
        for g in (0..state.num_factors()).rev() {
            state = expand_block(&state, g, alphabet, schedule.k, cap)?;
        }
    }
    Ok(state)
}

fn ln_factorial(k: f64) -> f64 {
    libm::lgamma(k + 1.0)
}

/// `(c, L_2)` with `c = log_d k!` and `L_2 = log_d ((2k)!/(k!k!))`.
///
/// `L_2` is the second-level bandwidth for `d = 2` (where `y_1 = k + 1`); it is
/// used unchanged for other `d`. Real `k` goes through the gamma function.
pub fn closed_form_constants(d: usize, k: f64) -> (f64, f64) {
    let ln_d = (d as f64).ln();
    let ln_kf = ln_factorial(k);
    let c = ln_kf / ln_d;
    let l2 = (ln_factorial(2.0 * k) - 2.0 * ln_kf) / ln_d;
    (c, l2)
}

/// Approximate output bandwidth `L = (N/k^2) L_2 - (N/k^2 - 1) c/(k-1)`.
pub fn bandwidth_closed_form(d: usize, n: f64, k: f64) -> f64 {
    let (c, l2) = closed_form_constants(d, k);
    let ratio = n / (k * k);
    ratio * l2 - (ratio - 1.0) * c / (k - 1.0)
}

/// Approximate `log_d D = (N/k^2)(L_2 - c/(k-1)) + ck/(k-1)`.
pub fn complexity_closed_form(d: usize, n: f64, k: f64) -> f64 {
    let (c, l2) = closed_form_constants(d, k);
    n / (k * k) * (l2 - c / (k - 1.0)) + c * k / (k - 1.0)
}

/// One point of the bandwidth/complexity trade-off sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint {
    pub k: usize,
    pub l_closed: f64,
    pub log_d_closed: f64,
    /// Present only when `N` is an exact power of `k`.
    pub exact: Option<RecursionSchedule>,
}

pub fn tradeoff_point(d: usize, n: usize, k: usize) -> Result<TradeoffPoint> {
    if d < 2 || k < 2 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need d >= 2, k >= 2, N >= 1; got d={d}, k={k}, N={n}"
        )));
    }
    let exact = match plan_recursion(d, n, k) {
        Ok(s) => Some(s),
        Err(Error::NotAPower { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(TradeoffPoint {
        k,
        l_closed: bandwidth_closed_form(d, n as f64, k as f64),
        log_d_closed: complexity_closed_form(d, n as f64, k as f64),
        exact,
    })
}

/// `log_d H^N_d`, the single-shot homogeneous bandwidth.
pub fn single_shot_bandwidth(d: usize, n: usize) -> Result<f64> {
    Ok(qudit_equivalents(&multiset_count(n as u64, d)?, d))
}
