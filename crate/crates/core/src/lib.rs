//! Fusion-operator certification and pentagon-template rewriting for
//! quantum circuits.
//!
//! A two-qubit gate `T` solving the pentagon equation `T₂₃T₁₂ = T₁₂T₁₃T₂₃`
//! lets a five-gate, SWAP-mediated sub-circuit collapse to two local gates,
//! and lets two local gates expand back. This crate builds the gates,
//! evaluates the equations, certifies candidates, and applies the rewrite
//! with full-unitary verification.

pub mod certify;
pub mod circuit;
pub mod equations;
pub mod error;
pub mod gates;
pub mod rewrite;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{ComplexMatrix, WireSet, C64};

/// Comparison tolerance used by the CLI when none is given.
pub const DEFAULT_TOL: f64 = 1e-10;
