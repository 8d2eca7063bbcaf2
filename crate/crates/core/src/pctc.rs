//! Post-selected CTC semantics: the comparative model in which the effective
//! evolution on the CR system is C ρ C† / Tr(C ρ C†), with C the partial
//! trace of the interaction unitary over the CTC factor. Where the Deutsch
//! model breaks entanglement with stay-behind systems, this model preserves
//! it; inputs with zero post-selection weight are annihilated outright.

use crate::error::{Error, Result};
use crate::qlin::{kron, partial_trace, ComplexMatrix, DensityMatrix};
use crate::tol;

/// The (generally non-unitary) effective CR operator C = Tr_CTC U.
#[derive(Debug, Clone)]
pub struct PctcOperator {
    c: ComplexMatrix,
}

impl PctcOperator {
    /// Wrap an arbitrary CR-space operator. No unitarity requirement.
    pub fn new(c: ComplexMatrix) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::NotSquare(c.rows(), c.cols()));
        }
        Ok(Self { c })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.c.rows()
    }

    /// Attach an ancilla factor to the left: I_anc ⊗ C. The traveling
    /// subsystem keeps its operator; stay-behind systems ride through
    /// untouched.
    pub fn lift_left(&self, ancilla_dim: usize) -> Self {
        Self {
            c: kron(&ComplexMatrix::identity(ancilla_dim), &self.c),
        }
    }
}

/// C = Tr_CTC U for a unitary on CR ⊗ CTC.
pub fn pctc_operator(u: &ComplexMatrix, d_cr: usize, d_ctc: usize) -> Result<PctcOperator> {
    if !u.is_square() || u.rows() != d_cr * d_ctc {
        return Err(Error::DimensionMismatch(format!(
            "U is {}x{}, expected {}x{}",
            u.rows(),
            u.cols(),
            d_cr * d_ctc,
            d_cr * d_ctc
        )));
    }
    let defect = u.unitarity_defect();
    if defect > tol::UNITARY {
        return Err(Error::NotUnitary(defect));
    }
    let c = partial_trace(u, &[d_cr, d_ctc], &[0])?;
    Ok(PctcOperator { c })
}

/// Renormalized post-selection map: (CρC†/Tr(CρC†), weight = Tr(CρC†)).
///
/// A weight at or below the zero threshold means the input is post-selected
/// away entirely ("paradoxical input annihilated").
pub fn pctc_output(op: &PctcOperator, rho_in: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
    if op.dim() != rho_in.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator dim {} vs input dim {}",
            op.dim(),
            rho_in.dim()
        )));
    }
    let raw = op.c.matmul(rho_in.matrix()).matmul(&op.c.dagger());
    let weight = raw.trace().re;
    if weight <= tol::ZERO_WEIGHT {
        return Err(Error::ZeroWeight(weight));
    }
    let out = raw.scale_re(1.0 / weight).hermitize();
    Ok((DensityMatrix::new_unchecked(out), weight))
}
