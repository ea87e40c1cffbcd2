//! Leading-order joint state of two Unruh-DeWitt-type detectors coupled to
//! massless scalar vacua in 3+1 dimensions.
//!
//! The matrix elements L and M of the detector X-state are computed in momentum
//! space and cross-checked against a literal position-space Monte Carlo
//! evaluation; entanglement measures and ε-sweep diagnostics sit on top.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod divergence;
pub mod elements;
pub mod measures;
pub mod quadrature;
pub mod scenario;
pub mod wick;
pub mod wightman;

pub use elements::{compute_elements, compute_l, compute_m, oracle_position_space, ElementSet};
pub use quadrature::{Estimate, McSettings, QuadSettings};
pub use scenario::{DetectorParams, Label, ModelKind, Scenario, SmearingMode};
