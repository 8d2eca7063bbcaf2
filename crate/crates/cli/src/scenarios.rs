//! Built-in scenario catalog: the worked networks, each stored as circuit
//! source text (so loading them exercises the parser) together with golden
//! expected values the test suites pin down.

use ctcsim_core::dsl::parse_circuit;
use ctcsim_core::{Circuit, Result};

/// Golden expected values for a scenario under the default (maxent) policy.
/// Diagonal entries suffice here: every headline matrix in the catalog is
/// real-diagonal. `None` means "not applicable to this scenario".
#[derive(Debug, Clone, Copy)]
pub struct Golden {
    pub affine_dim: usize,
    pub closed_information_path: bool,
    pub rho_ctc_diag: &'static [f64],
    pub rho_out_diag: &'static [f64],
    /// Negativity of the D-CTC output across the cr[0] | rest split.
    pub dctc_output_negativity: Option<f64>,
    /// Negativity of the P-CTC output across the same split.
    pub pctc_output_negativity: Option<f64>,
    /// The post-selection model annihilates this input outright.
    pub pctc_annihilated: bool,
}

/// A named built-in circuit.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
    pub golden: Golden,
}

pub const SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "grandfather",
        summary: "two loop-controlled NOTs then a SWAP onto the loop; the classically \
                  forbidden input 01 is resolved by the maximally mixed loop state",
        source: "cr 2\nctc 1\nstate basis 01\n\
                 gate cnot ctc[0] cr[0]\ngate cnot ctc[0] cr[1]\ngate swap cr[1] ctc[0]\n",
        golden: Golden {
            affine_dim: 0,
            closed_information_path: true,
            rho_ctc_diag: &[0.5, 0.5],
            rho_out_diag: &[0.5, 0.0, 0.0, 0.5],
            dctc_output_negativity: Some(0.0),
            pctc_output_negativity: None,
            pctc_annihilated: true,
        },
    },
    Scenario {
        name: "grandfather_classical_input",
        summary: "same network with the classically allowed input 10; the fixed-point \
                  set is a whole segment, with basis extremes routing to 10 or 01",
        source: "cr 2\nctc 1\nstate basis 10\n\
                 gate cnot ctc[0] cr[0]\ngate cnot ctc[0] cr[1]\ngate swap cr[1] ctc[0]\n",
        golden: Golden {
            affine_dim: 1,
            closed_information_path: true,
            rho_ctc_diag: &[0.5, 0.5],
            rho_out_diag: &[0.0, 0.5, 0.5, 0.0],
            dctc_output_negativity: Some(0.0),
            pctc_output_negativity: Some(0.5),
            pctc_annihilated: false,
        },
    },
    Scenario {
        name: "wallace_single",
        summary: "a single carrier swapped onto the loop; the loop simply copies the \
                  incoming state and nothing depends on the loop's own state",
        source: "cr 1\nctc 1\nstate basis 1\ngate swap cr[0] ctc[0]\n",
        golden: Golden {
            affine_dim: 0,
            closed_information_path: false,
            rho_ctc_diag: &[0.0, 1.0],
            rho_out_diag: &[0.0, 1.0],
            dctc_output_negativity: None,
            pctc_output_negativity: None,
            pctc_annihilated: false,
        },
    },
    Scenario {
        name: "wallace_entangled",
        summary: "one half of an entangled pair travels the loop; the consistency \
                  condition forces the loop state mixed and severs the entanglement, \
                  while post-selection semantics preserve it",
        source: "cr 2\nctc 1\nstate bell cr[0] cr[1]\ngate swap cr[1] ctc[0]\n",
        golden: Golden {
            affine_dim: 0,
            closed_information_path: false,
            rho_ctc_diag: &[0.5, 0.5],
            rho_out_diag: &[0.25, 0.25, 0.25, 0.25],
            dctc_output_negativity: Some(0.0),
            pctc_output_negativity: Some(0.5),
            pctc_annihilated: false,
        },
    },
    Scenario {
        name: "trivial_identity",
        summary: "no gates at all; the loop state is completely unconstrained and the \
                  CR wire passes through untouched",
        source: "cr 1\nctc 1\nstate basis 0\n",
        golden: Golden {
            affine_dim: 3,
            closed_information_path: true,
            rho_ctc_diag: &[0.5, 0.5],
            rho_out_diag: &[1.0, 0.0],
            dctc_output_negativity: None,
            pctc_output_negativity: None,
            pctc_annihilated: false,
        },
    },
];

pub fn find(name: &str) -> Option<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name)
}

/// Parse a scenario's source text.
pub fn build(s: &Scenario) -> Result<Circuit> {
    parse_circuit(s.source)
}
