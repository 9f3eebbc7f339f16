//! Lossless compression of repeated and related qudit states for quantum
//! multicast, and bandwidth accounting on star and ring networks.
//!
//! States are dense amplitude vectors over a tensor product of qudits, indexed
//! big-endian. Every simulation is bounded by a [`Capacity`] on the number of
//! amplitudes; analytic quantities (dimensions, bandwidths) are exact integers
//! or logarithms of them and have no such limit.

pub mod combinatorics;
pub mod error;
pub mod heterogeneous;
pub mod homogeneous;
pub mod io;
pub mod network;
pub mod state;
pub mod symmetric;

pub use error::{Error, Result};
pub use heterogeneous::{CoefficientFamily, Scheme};
pub use state::{Capacity, PureState};
