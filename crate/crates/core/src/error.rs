//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the simulator core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |M - M\u{2020}| entry = {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max |U\u{2020}U - I| entry = {0:.3e})")]
    NotUnitary(f64),

    #[error("not a valid density matrix: {}", .0.join("; "))]
    NotDensityMatrix(Vec<String>),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("circuit is not classical: {0}")]
    NotClassical(String),

    #[error("input state is not a computational basis state")]
    NotBasisInput,

    #[error("circuit is not a wire permutation: {0}")]
    NotWirePermutation(String),

    #[error("closed path present")]
    ClosedPathPresent,

    #[error("paradoxical input annihilated (post-selection weight {0:.3e})")]
    ZeroWeight(f64),

    #[error("solver did not converge: best residual {residual:.3e} after {iterations} iterations")]
    SolverNoConvergence { residual: f64, iterations: u64 },

    #[error("solver defect: {0}")]
    SolverDefect(String),

    #[error("channel invariant violated: {0}")]
    ChannelInvariant(String),

    #[error("non-finite values in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
