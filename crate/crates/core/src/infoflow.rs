//! Closed-information-path detection and negative-delay unrolling.
//!
//! Chronology violation makes no difference to a network's behavior unless
//! information actually loops: the state exiting the past mouth must depend
//! on the state entering the future mouth. That dependence is formalized
//! here as non-constancy of the induced CTC→CTC channel at the given CR
//! input (the defining prose criterion is not mathematical; this constancy
//! form is this artifact's formalization and reports label it as such).
//! For wire-permutation circuits without a closed path, the negative delay
//! is removed outright by rerouting the wires.

use crate::circuit::{assemble_unitary, Circuit, Gate, GateKind, Wire};
use crate::dctc::induced_channel;
use crate::error::{Error, Result};
use crate::qlin::{trace_norm, ComplexMatrix, Complex64, DensityMatrix, ZERO};
use crate::tol;

/// Outcome of information-flow analysis on one circuit.
#[derive(Debug, Clone)]
pub struct FlowReport {
    /// Whether the CTC output depends on the CTC input, at the declared
    /// CR input: constancy_defect > threshold.
    pub closed_path: bool,
    /// Max over a spanning family of CTC basis states ρᵢ of
    /// ‖N(ρᵢ) − N(ρ₀)‖₁, at the declared CR input.
    pub constancy_defect: f64,
    /// Same defect, maximized over all CR computational-basis inputs.
    pub constancy_defect_worst_cr: f64,
    /// A closed path that never feeds back into the CR output (the loop
    /// carries information around, but exchanges none with CR).
    pub cr_decoupled: bool,
    /// CTC-free replacement circuit, when the network is a wire permutation
    /// with no closed path.
    pub unrolled: Option<Circuit>,
    /// Short text verdict.
    pub narrative: String,
}

/// A spanning family of d² states: basis projectors plus the two off-diagonal
/// phases per pair. Constancy on these implies constancy on all states.
fn spanning_states(d: usize) -> Vec<DensityMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(DensityMatrix::basis(d, i));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            let mut ket = vec![ZERO; d];
            ket[i] = Complex64::new(r, 0.0);
            ket[j] = Complex64::new(r, 0.0);
            out.push(DensityMatrix::from_pure(&ket).expect("normalized"));
            let mut ket = vec![ZERO; d];
            ket[i] = Complex64::new(r, 0.0);
            ket[j] = Complex64::new(0.0, r);
            out.push(DensityMatrix::from_pure(&ket).expect("normalized"));
        }
    }
    out
}

fn constancy_defect_for(u: &ComplexMatrix, rho_in: &DensityMatrix) -> Result<f64> {
    let ch = induced_channel(u, rho_in)?;
    let probes = spanning_states(ch.d_ctc());
    let reference = ch.apply(probes[0].matrix());
    let mut defect = 0.0f64;
    for p in &probes[1..] {
        let img = ch.apply(p.matrix());
        defect = defect.max(trace_norm(&img.sub(&reference))?);
    }
    Ok(defect)
}

/// Decide whether the circuit carries a closed path for information at the
/// given CR input. Also reports the worst case over CR basis inputs and
/// whether a detected loop is decoupled from the CR output.
pub fn detect_closed_path(u: &ComplexMatrix, rho_in: &DensityMatrix) -> Result<FlowReport> {
    let d_cr = rho_in.dim();
    if !u.is_square() || u.rows() % d_cr != 0 {
        return Err(Error::DimensionMismatch(format!(
            "U dim {} vs CR dim {}",
            u.rows(),
            d_cr
        )));
    }
    let d_ctc = u.rows() / d_cr;
    let defect = constancy_defect_for(u, rho_in)?;
    let mut worst = defect;
    for b in 0..d_cr {
        worst = worst.max(constancy_defect_for(u, &DensityMatrix::basis(d_cr, b))?);
    }
    let closed_path = defect > tol::CLOSED_PATH;

    let mut cr_decoupled = false;
    if closed_path {
        // does the CR output react to the CTC state at all?
        let mut out_defect = 0.0f64;
        let probes = spanning_states(d_ctc);
        let reference = crate::dctc::ctc_output(u, rho_in, &probes[0])?;
        for p in &probes[1..] {
            let out = crate::dctc::ctc_output(u, rho_in, p)?;
            out_defect = out_defect.max(trace_norm(&out.matrix().sub(reference.matrix()))?);
        }
        cr_decoupled = out_defect <= tol::CLOSED_PATH;
    }

    let narrative = if !closed_path {
        "no closed path for information at the declared input; the negative delay is removable \
         (constancy criterion, an artifact formalization of the prose condition)"
            .to_string()
    } else if cr_decoupled {
        "closed path for information present, but benign: the loop never feeds back into the \
         CR output (constancy criterion, an artifact formalization)"
            .to_string()
    } else {
        "closed path for information present: the CTC output depends on the CTC input \
         (constancy criterion, an artifact formalization)"
            .to_string()
    };

    Ok(FlowReport {
        closed_path,
        constancy_defect: defect,
        constancy_defect_worst_cr: worst,
        cr_decoupled,
        unrolled: None,
        narrative,
    })
}

/// Where each input position's content ends up after the gate list, for
/// circuits whose gates are all SWAPs.
fn content_permutation(c: &Circuit) -> Result<Vec<usize>> {
    let n = c.n_wires();
    let mut cur: Vec<usize> = (0..n).collect();
    for (gi, gate) in c.gates.iter().enumerate() {
        if gate.kind != GateKind::Swap {
            return Err(Error::NotWirePermutation(format!(
                "gate {} is {}, only swap moves wires without mixing states",
                gi,
                gate.kind.name()
            )));
        }
        let a = gate.operands[0].position(c.n_cr);
        let b = gate.operands[1].position(c.n_cr);
        for slot in cur.iter_mut() {
            if *slot == a {
                *slot = b;
            } else if *slot == b {
                *slot = a;
            }
        }
    }
    Ok(cur)
}

/// Cut the CTC wires out of a wire-permutation circuit: contents reaching a
/// CTC future mouth re-emerge at that wire's past mouth, so each CR input
/// routes to a unique CR output. Refuses when a closed path is present.
pub fn unroll_permutation(c: &Circuit) -> Result<Circuit> {
    let u = assemble_unitary(c)?;
    let flow = detect_closed_path(&u, &c.input)?;
    if flow.closed_path {
        return Err(Error::ClosedPathPresent);
    }
    let sigma = content_permutation(c)?;
    let n = c.n_wires();

    // follow each CR wire through the loop until it lands on a CR output
    let mut pi_cr = vec![0usize; c.n_cr];
    for (p, slot) in pi_cr.iter_mut().enumerate() {
        let mut q = sigma[p];
        let mut steps = 0;
        while q >= c.n_cr {
            q = sigma[q];
            steps += 1;
            if steps > n {
                return Err(Error::SolverDefect(
                    "wire walk did not terminate; permutation bookkeeping is broken".into(),
                ));
            }
        }
        *slot = q;
    }

    // realize π as swaps, one cycle at a time
    let mut gates = Vec::new();
    let mut seen = vec![false; c.n_cr];
    for start in 0..c.n_cr {
        if seen[start] || pi_cr[start] == start {
            seen[start] = true;
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut next = pi_cr[start];
        while next != start {
            cycle.push(next);
            seen[next] = true;
            next = pi_cr[next];
        }
        for i in (0..cycle.len() - 1).rev() {
            gates.push(Gate::swap(Wire::cr(cycle[i]), Wire::cr(cycle[i + 1])));
        }
    }

    Circuit::new(c.n_cr, 0, c.input.clone(), gates)
}

/// Full information-flow analysis of a circuit: detection plus unrolling
/// when the circuit qualifies.
pub fn flow_analysis(c: &Circuit) -> Result<FlowReport> {
    let u = assemble_unitary(c)?;
    let mut report = detect_closed_path(&u, &c.input)?;
    if !report.closed_path {
        match unroll_permutation(c) {
            Ok(unrolled) => report.unrolled = Some(unrolled),
            Err(Error::NotWirePermutation(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
