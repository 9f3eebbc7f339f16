use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol {symbol} out of range for alphabet of size {d}")]
    SymbolOutOfRange { symbol: usize, d: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: String, bound: String },

    #[error("capacity exceeded: {required} amplitudes requested, cap is {cap}")]
    Capacity { required: String, cap: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("input is outside the symmetric subspace (residual norm {residual:.3e})")]
    NotSymmetric { residual: f64 },

    #[error("state {member} is not a coefficient permutation of the reference")]
    NotInFamily { member: usize },

    #[error("{n} is not an integer power of group size {k}")]
    NotAPower { n: usize, k: usize },

    #[error("ring needs an even node count, got {n}")]
    OddRing { n: usize },

    #[error("schedule mismatch: {0}")]
    ScheduleMismatch(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ContractViolation(_)
            | Error::ShapeMismatch(_)
            | Error::ScheduleMismatch(_)
            | Error::NotSymmetric { .. }
            | Error::NotInFamily { .. } => 2,
            Error::Capacity { .. } => 3,
            _ => 4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Error::NotSymmetric { residual: 1.0 }.exit_code(), 2);
        assert_eq!(Error::NotInFamily { member: 0 }.exit_code(), 2);
        assert_eq!(Error::ShapeMismatch(String::new()).exit_code(), 2);
        assert_eq!(
            Error::Capacity {
                required: "2".into(),
                cap: 1
            }
            .exit_code(),
            3
        );
        assert_eq!(Error::Parse(String::new()).exit_code(), 4);
        assert_eq!(Error::OddRing { n: 3 }.exit_code(), 4);
    }
}
