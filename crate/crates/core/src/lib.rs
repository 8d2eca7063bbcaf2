//! Simulator core for quantum circuits threaded through closed timelike curves.
//!
//! Given a gate-level circuit whose wires are split into chronology-respecting
//! (CR) and CTC roles, this crate builds the CR-input-parameterized channel
//! `N(ρ) = Tr_CR[U(ρ_in ⊗ ρ)U†]` induced on the CTC carrier, solves and
//! characterizes its density-operator fixed points (the self-consistency
//! requirement of the Deutsch model), computes chronology-respecting outputs,
//! evaluates the rival post-selection semantics on the same circuit, and
//! detects whether the circuit contains a closed path for information.
//!
//! Modules:
//! - [`qlin`] — dense complex linear algebra, Jacobi eigensolver, diagnostics
//! - [`circuit`] — gate-level circuit model and unitary assembly
//! - [`dsl`] — circuit text format and structured result reports
//! - [`dctc`] — Deutsch-model channel, fixed-point solvers, classical oracle
//! - [`pctc`] — post-selection semantics
//! - [`infoflow`] — closed-information-path detection and permutation unrolling

pub mod circuit;
pub mod dctc;
pub mod dsl;
pub mod error;
pub mod infoflow;
pub mod pctc;
pub mod qlin;

pub use circuit::{Circuit, Gate, GateKind, Wire, WireRole};
pub use dctc::{CtcChannel, FixedPointSet, SolveReport};
pub use error::{Error, Result};
pub use qlin::{ComplexMatrix, Complex64, DensityMatrix};

/// Numerical tolerances, fixed globally. Dims stay at or below 2^6 in
/// practice, so double precision leaves plenty of headroom.
pub mod tol {
    /// Max |M − M†| entry allowed when a matrix must be Hermitian.
    pub const HERMITIAN: f64 = 1e-10;
    /// Allowed |Tr ρ − 1|.
    pub const TRACE: f64 = 1e-10;
    /// Eigenvalues may dip to −PSD_SLACK and still count as positive.
    pub const PSD_SLACK: f64 = 1e-10;
    /// Max |U†U − I| entry for matrices that must be unitary.
    pub const UNITARY: f64 = 1e-10;
    /// Default fixed-point solver residual target.
    pub const SOLVER_TARGET: f64 = 1e-10;
    /// Residual above which a claimed fixed point is rejected.
    pub const RESIDUAL_ACCEPT: f64 = 1e-8;
    /// Channel trace-preservation / Choi-positivity check tolerance.
    pub const CHANNEL_CHECK: f64 = 1e-9;
    /// Constancy defect above which a closed information path is declared.
    pub const CLOSED_PATH: f64 = 1e-9;
    /// Post-selection weights at or below this count as annihilation.
    pub const ZERO_WEIGHT: f64 = 1e-12;
    /// Parser normalizes state vectors whose norm is within this of 1.
    pub const NORM_FIXUP: f64 = 1e-6;
}
