//! Shared fixtures for the benchmark targets.

use ctcsim_core::circuit::{Circuit, Gate, Wire};
use ctcsim_core::qlin::DensityMatrix;

/// The two-CNOT-plus-SWAP network with the classically forbidden input.
pub fn grandfather_circuit() -> Circuit {
    Circuit::new(
        2,
        1,
        DensityMatrix::basis(4, 1),
        vec![
            Gate::cnot(Wire::ctc(0), Wire::cr(0)),
            Gate::cnot(Wire::ctc(0), Wire::cr(1)),
            Gate::swap(Wire::cr(1), Wire::ctc(0)),
        ],
    )
    .expect("valid circuit")
}
