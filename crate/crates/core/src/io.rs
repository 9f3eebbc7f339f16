//! Text formats for states and coefficient families.
//!
//! ```text
//! {"factor_dims": [2, 2], "amplitudes": [[0.5, 0.0], [0.5, 0.0], [0.5, 0.0], [0.5, 0.0]]}
//! {"reference": [[0.6, 0.0], [0.8, 0.0]], "members": [[0, 1], [1, 0]]}
//! ```
//!
//! Amplitudes are written with 17 significant digits so a write/read cycle is exact.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::heterogeneous::CoefficientFamily;
use crate::state::PureState;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    factor_dims: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    reference: Vec<[f64; 2]>,
    members: Vec<Vec<usize>>,
}

fn complex(pairs: Vec<[f64; 2]>) -> Vec<Complex64> {
    pairs
        .into_iter()
        .map(|[re, im]| Complex64::new(re, im))
        .collect()
}

fn write_amplitudes(out: &mut String, amps: &[Complex64]) {
    out.push('[');
    for (i, a) in amps.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "[{:.16e}, {:.16e}]", a.re, a.im);
    }
    out.push(']');
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn parse_state(text: &str) -> Result<PureState> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state file: {e}")))?;
    if file.factor_dims.iter().any(|&d| d < 2) {
        return Err(Error::Parse(format!(
            "factor_dims must all be at least 2, got {:?}",
            file.factor_dims
        )));
    }
    let expected = file
        .factor_dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Parse("factor_dims product overflows".into()))?;
    if file.amplitudes.len() != expected {
        return Err(Error::Parse(format!(
            "{} amplitudes for factor_dims {:?} (expected {expected})",
            file.amplitudes.len(),
            file.factor_dims
        )));
    }
    PureState::new(file.factor_dims, complex(file.amplitudes))
}

pub fn format_state(state: &PureState) -> String {
    let mut out = format!(
        "{{\"factor_dims\": [{}], \"amplitudes\": ",
        join(state.dims())
    );
    write_amplitudes(&mut out, state.amplitudes());
    out.push_str("}\n");
    out
}

pub fn parse_family(text: &str) -> Result<CoefficientFamily> {
    let file: FamilyFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("family file: {e}")))?;
    CoefficientFamily::new(complex(file.reference), file.members)
}

pub fn format_family(family: &CoefficientFamily) -> String {
    let mut out = String::from("{\"reference\": ");
    write_amplitudes(&mut out, family.reference());
    let members: Vec<String> = family
        .permutations()
        .iter()
        .map(|p| format!("[{}]", join(p)))
        .collect();
    let _ = write!(out, ", \"members\": [{}]}}", members.join(", "));
    out.push('\n');
    out
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_state(path: &Path) -> Result<PureState> {
    parse_state(&read(path)?)
}

pub fn read_family(path: &Path) -> Result<CoefficientFamily> {
    parse_family(&read(path)?)
}
