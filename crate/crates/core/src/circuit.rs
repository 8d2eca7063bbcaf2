//! Gate-level model of a chronology-violating network and assembly of its
//! total interaction unitary.
//!
//! Wires split into chronology-respecting (CR) and CTC roles. The full space
//! is ordered (CR wires in declaration order) ⊗ (CTC wires in declaration
//! order), with wire 0 the most significant bits of basis labels; CTC wires
//! trail so traces over either group are contiguous. Qubits only.

use crate::error::{Error, Result};
use crate::qlin::{kron, ComplexMatrix, Complex64, DensityMatrix, ONE, ZERO};
use crate::tol;

/// Wire role: ordinary carrier or closed-loop carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WireRole {
    Cr,
    Ctc,
}

/// A wire reference: role plus index within that role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wire {
    pub role: WireRole,
    pub index: usize,
}

impl Wire {
    pub fn cr(index: usize) -> Self {
        Self {
            role: WireRole::Cr,
            index,
        }
    }

    pub fn ctc(index: usize) -> Self {
        Self {
            role: WireRole::Ctc,
            index,
        }
    }

    /// Global tensor-factor position: CR wires first, CTC wires trailing.
    pub fn position(&self, n_cr: usize) -> usize {
        match self.role {
            WireRole::Cr => self.index,
            WireRole::Ctc => n_cr + self.index,
        }
    }
}

impl std::fmt::Display for Wire {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.role {
            WireRole::Cr => write!(f, "cr[{}]", self.index),
            WireRole::Ctc => write!(f, "ctc[{}]", self.index),
        }
    }
}

/// Gate kind: a named generator or a caller-supplied unitary.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    Z,
    H,
    Cnot,
    Swap,
    Cz,
    Custom(ComplexMatrix),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::X | GateKind::Z | GateKind::H => 1,
            GateKind::Cnot | GateKind::Swap | GateKind::Cz => 2,
            GateKind::Custom(m) => {
                let mut k = 0usize;
                let mut d = 1usize;
                while d < m.rows() {
                    d *= 2;
                    k += 1;
                }
                k
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::Cnot => "cnot",
            GateKind::Swap => "swap",
            GateKind::Cz => "cz",
            GateKind::Custom(_) => "custom",
        }
    }

    /// The gate's unitary on its own 2^arity-dimensional space. First operand
    /// is the leftmost (most significant) local factor.
    pub fn matrix(&self) -> ComplexMatrix {
        match self {
            GateKind::X => ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]).unwrap(),
            GateKind::Z => ComplexMatrix::from_real(2, 2, &[1., 0., 0., -1.]).unwrap(),
            GateKind::H => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                ComplexMatrix::from_real(2, 2, &[r, r, r, -r]).unwrap()
            }
            GateKind::Cnot => ComplexMatrix::from_real(
                4,
                4,
                &[
                    1., 0., 0., 0., //
                    0., 1., 0., 0., //
                    0., 0., 0., 1., //
                    0., 0., 1., 0.,
                ],
            )
            .unwrap(),
            GateKind::Swap => ComplexMatrix::from_real(
                4,
                4,
                &[
                    1., 0., 0., 0., //
                    0., 0., 1., 0., //
                    0., 1., 0., 0., //
                    0., 0., 0., 1.,
                ],
            )
            .unwrap(),
            GateKind::Cz => ComplexMatrix::from_real(
                4,
                4,
                &[
                    1., 0., 0., 0., //
                    0., 1., 0., 0., //
                    0., 0., 1., 0., //
                    0., 0., 0., -1.,
                ],
            )
            .unwrap(),
            GateKind::Custom(m) => m.clone(),
        }
    }
}

/// A gate applied to an ordered list of wires.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub operands: Vec<Wire>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: Vec<Wire>) -> Self {
        Self { kind, operands }
    }

    pub fn x(w: Wire) -> Self {
        Self::new(GateKind::X, vec![w])
    }

    pub fn h(w: Wire) -> Self {
        Self::new(GateKind::H, vec![w])
    }

    pub fn cnot(control: Wire, target: Wire) -> Self {
        Self::new(GateKind::Cnot, vec![control, target])
    }

    pub fn swap(a: Wire, b: Wire) -> Self {
        Self::new(GateKind::Swap, vec![a, b])
    }
}

/// A circuit invariant violation, named by offending gate/wire.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub gate: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.gate {
            Some(g) => write!(f, "gate {}: {}", g, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// A chronology-violating network: declared CR/CTC wires, CR input state,
/// ordered gate list. Interactions happen only in gates; states do not change
/// while traveling between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_cr: usize,
    pub n_ctc: usize,
    pub input: DensityMatrix,
    pub gates: Vec<Gate>,
}

impl Circuit {
    /// Build and validate in one step.
    pub fn new(
        n_cr: usize,
        n_ctc: usize,
        input: DensityMatrix,
        gates: Vec<Gate>,
    ) -> Result<Self> {
        let c = Self {
            n_cr,
            n_ctc,
            input,
            gates,
        };
        let violations = c.validate();
        if violations.is_empty() {
            Ok(c)
        } else {
            Err(Error::InvalidCircuit(
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    pub fn n_wires(&self) -> usize {
        self.n_cr + self.n_ctc
    }

    pub fn dim_cr(&self) -> usize {
        1 << self.n_cr
    }

    pub fn dim_ctc(&self) -> usize {
        1 << self.n_ctc
    }

    pub fn dim_total(&self) -> usize {
        1 << self.n_wires()
    }

    /// Check every circuit/gate invariant; empty list iff all hold.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.input.dim() != self.dim_cr() {
            out.push(Violation {
                gate: None,
                message: format!(
                    "input dim {} != 2^n_cr = {}",
                    self.input.dim(),
                    self.dim_cr()
                ),
            });
        }
        for (gi, gate) in self.gates.iter().enumerate() {
            if gate.operands.len() != gate.kind.arity() {
                out.push(Violation {
                    gate: Some(gi),
                    message: format!(
                        "{} expects {} operands, got {}",
                        gate.kind.name(),
                        gate.kind.arity(),
                        gate.operands.len()
                    ),
                });
                continue;
            }
            for w in &gate.operands {
                let max = match w.role {
                    WireRole::Cr => self.n_cr,
                    WireRole::Ctc => self.n_ctc,
                };
                if w.index >= max {
                    out.push(Violation {
                        gate: Some(gi),
                        message: format!("undeclared wire {}", w),
                    });
                }
            }
            let mut seen = gate.operands.clone();
            seen.sort_by_key(|w| (w.role == WireRole::Ctc, w.index));
            seen.dedup();
            if seen.len() != gate.operands.len() {
                out.push(Violation {
                    gate: Some(gi),
                    message: "repeated operand wire".into(),
                });
            }
            if let GateKind::Custom(m) = &gate.kind {
                let expect = 1usize << gate.operands.len();
                if !m.is_square() || m.rows() != expect {
                    out.push(Violation {
                        gate: Some(gi),
                        message: format!(
                            "custom matrix is {}x{}, expected {}x{}",
                            m.rows(),
                            m.cols(),
                            expect,
                            expect
                        ),
                    });
                } else {
                    let defect = m.unitarity_defect();
                    if defect > tol::UNITARY {
                        out.push(Violation {
                            gate: Some(gi),
                            message: format!("non-unitary gate (defect {:.3e})", defect),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Embed a gate unitary into the full space at the given global positions.
fn lift_gate(g: &ComplexMatrix, positions: &[usize], n_total: usize) -> ComplexMatrix {
    let dim = 1usize << n_total;
    let mut op_mask = 0usize;
    for &p in positions {
        op_mask |= 1 << (n_total - 1 - p);
    }
    let spectator_mask = !op_mask & (dim - 1);
    let extract = |idx: usize| -> usize {
        let mut local = 0usize;
        for &p in positions {
            local = (local << 1) | ((idx >> (n_total - 1 - p)) & 1);
        }
        local
    };
    let mut out = ComplexMatrix::zeros(dim, dim);
    for row in 0..dim {
        let spect = row & spectator_mask;
        let g_row = extract(row);
        for g_col in 0..g.rows() {
            let v = g[(g_row, g_col)];
            if v == ZERO {
                continue;
            }
            // rebuild the column index with the same spectator bits
            let mut col = spect;
            for (t, &p) in positions.iter().enumerate() {
                let bit = (g_col >> (positions.len() - 1 - t)) & 1;
                col |= bit << (n_total - 1 - p);
            }
            out[(row, col)] = v;
        }
    }
    out
}

/// Total interaction unitary U = G_k···G_1 on (CR wires) ⊗ (CTC wires),
/// each gate lifted with identities elsewhere.
pub fn assemble_unitary(c: &Circuit) -> Result<ComplexMatrix> {
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidCircuit(
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    let n = c.n_wires();
    let mut u = ComplexMatrix::identity(1 << n);
    for gate in &c.gates {
        let positions: Vec<usize> = gate.operands.iter().map(|w| w.position(c.n_cr)).collect();
        let lifted = lift_gate(&gate.kind.matrix(), &positions, n);
        u = lifted.matmul(&u);
    }
    Ok(u)
}

/// If `u` is a permutation matrix within tolerance, return the column → row
/// map (u e_j = e_{π(j)}).
pub fn permutation_action(u: &ComplexMatrix) -> Option<Vec<usize>> {
    if !u.is_square() {
        return None;
    }
    let n = u.rows();
    let mut perm = vec![usize::MAX; n];
    let mut hit = vec![false; n];
    for j in 0..n {
        for i in 0..n {
            let z = u[(i, j)];
            let d0 = z.norm();
            let d1 = (z - ONE).norm();
            if d1 <= tol::UNITARY {
                if perm[j] != usize::MAX {
                    return None;
                }
                perm[j] = i;
            } else if d0 > tol::UNITARY {
                return None;
            }
        }
        if perm[j] == usize::MAX || hit[perm[j]] {
            return None;
        }
        hit[perm[j]] = true;
    }
    Some(perm)
}

/// True iff the assembled unitary permutes computational basis states.
pub fn is_classical(c: &Circuit) -> Result<bool> {
    let u = assemble_unitary(c)?;
    Ok(permutation_action(&u).is_some())
}

/// Evolve a CR-only circuit: U ρ U†. Used for unrolled (CTC-free) circuits.
pub fn evolve_unitary(c: &Circuit) -> Result<DensityMatrix> {
    if c.n_ctc != 0 {
        return Err(Error::InvalidCircuit(
            "direct evolution requires a CTC-free circuit".into(),
        ));
    }
    let u = assemble_unitary(c)?;
    let out = u.matmul(c.input.matrix()).matmul(&u.dagger());
    Ok(DensityMatrix::new_unchecked(out.hermitize()))
}

/// Ket |bits⟩ on `n` qubits, leftmost bit = wire 0.
pub fn basis_ket(bits: &[u8]) -> Vec<Complex64> {
    let n = bits.len();
    let mut idx = 0usize;
    for &b in bits {
        idx = (idx << 1) | (b as usize);
    }
    let mut ket = vec![ZERO; 1 << n];
    ket[idx] = ONE;
    ket
}

/// kron of a list, left to right.
pub fn kron_all(mats: &[ComplexMatrix]) -> ComplexMatrix {
    let mut it = mats.iter();
    let first = it.next().expect("kron_all of empty list").clone();
    it.fold(first, |acc, m| kron(&acc, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::trace_distance;

    /// Two CTC-controlled NOTs on the CR qubits, then a SWAP between cr[1]
    /// and the loop qubit.
    pub fn grandfather(input_bits: [u8; 2]) -> Circuit {
        let input = DensityMatrix::from_pure(&basis_ket(&input_bits)).unwrap();
        Circuit::new(
            2,
            1,
            input,
            vec![
                Gate::cnot(Wire::ctc(0), Wire::cr(0)),
                Gate::cnot(Wire::ctc(0), Wire::cr(1)),
                Gate::swap(Wire::cr(1), Wire::ctc(0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_circuit_assembles_to_identity() {
        let c = Circuit::new(1, 1, DensityMatrix::basis(2, 0), vec![]).unwrap();
        let u = assemble_unitary(&c).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn grandfather_basis_action() {
        // |x,y,z⟩ → |x⊕z, z, y⊕z⟩, checked on all 8 basis kets
        let c = grandfather([0, 1]);
        let u = assemble_unitary(&c).unwrap();
        for x in 0..2usize {
            for y in 0..2usize {
                for z in 0..2usize {
                    let col = (x << 2) | (y << 1) | z;
                    let row = ((x ^ z) << 2) | (z << 1) | (y ^ z);
                    assert!((u[(row, col)] - ONE).norm() < 1e-12, "({x},{y},{z})");
                }
            }
        }
        assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn single_swap_exchanges_wires() {
        let c = Circuit::new(
            1,
            1,
            DensityMatrix::basis(2, 0),
            vec![Gate::swap(Wire::cr(0), Wire::ctc(0))],
        )
        .unwrap();
        let u = assemble_unitary(&c).unwrap();
        // |a,b⟩ → |b,a⟩
        for a in 0..2usize {
            for b in 0..2usize {
                let col = (a << 1) | b;
                let row = (b << 1) | a;
                assert!((u[(row, col)] - ONE).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn validate_accepts_grandfather() {
        assert!(grandfather([0, 1]).validate().is_empty());
    }

    #[test]
    fn validate_catches_arity_violation() {
        let c = Circuit {
            n_cr: 2,
            n_ctc: 1,
            input: DensityMatrix::basis(4, 0),
            gates: vec![Gate::new(
                GateKind::Cnot,
                vec![Wire::cr(0), Wire::cr(1), Wire::ctc(0)],
            )],
        };
        let v = c.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].gate, Some(0));
        assert!(v[0].message.contains("expects 2 operands"));
    }

    #[test]
    fn validate_catches_non_unitary_custom_gate() {
        let m = ComplexMatrix::from_real(2, 2, &[1., 1., 0., 1.]).unwrap();
        let c = Circuit {
            n_cr: 1,
            n_ctc: 0,
            input: DensityMatrix::basis(2, 0),
            gates: vec![Gate::new(GateKind::Custom(m), vec![Wire::cr(0)])],
        };
        let v = c.validate();
        assert!(v.iter().any(|x| x.message.contains("non-unitary")));
    }

    #[test]
    fn validate_catches_undeclared_wire() {
        let c = Circuit {
            n_cr: 1,
            n_ctc: 1,
            input: DensityMatrix::basis(2, 0),
            gates: vec![Gate::x(Wire::cr(3))],
        };
        let v = c.validate();
        assert!(v[0].message.contains("undeclared wire cr[3]"));
    }

    #[test]
    fn classicality() {
        assert!(is_classical(&grandfather([0, 1])).unwrap());
        let with_h = Circuit::new(
            1,
            1,
            DensityMatrix::basis(2, 0),
            vec![Gate::h(Wire::cr(0))],
        )
        .unwrap();
        assert!(!is_classical(&with_h).unwrap());
        let empty = Circuit::new(1, 1, DensityMatrix::basis(2, 0), vec![]).unwrap();
        assert!(is_classical(&empty).unwrap());
    }

    #[test]
    fn gate_order_law() {
        let g1 = Gate::h(Wire::cr(0));
        let g2 = Gate::cnot(Wire::cr(0), Wire::cr(1));
        let input = DensityMatrix::basis(4, 0);
        let c1 = Circuit::new(2, 0, input.clone(), vec![g1.clone()]).unwrap();
        let c2 = Circuit::new(2, 0, input.clone(), vec![g2.clone()]).unwrap();
        let c12 = Circuit::new(2, 0, input, vec![g1, g2]).unwrap();
        let u1 = assemble_unitary(&c1).unwrap();
        let u2 = assemble_unitary(&c2).unwrap();
        let u12 = assemble_unitary(&c12).unwrap();
        assert!(u2.matmul(&u1).max_abs_diff(&u12) < 1e-12);
    }

    #[test]
    fn disjoint_gates_commute() {
        let ga = Gate::h(Wire::cr(0));
        let gb = Gate::x(Wire::ctc(0));
        let input = DensityMatrix::basis(4, 0);
        let ab = Circuit::new(2, 1, input.clone(), vec![ga.clone(), gb.clone()]).unwrap();
        let ba = Circuit::new(2, 1, input, vec![gb, ga]).unwrap();
        let uab = assemble_unitary(&ab).unwrap();
        let uba = assemble_unitary(&ba).unwrap();
        assert!(uab.max_abs_diff(&uba) < 1e-12);
    }

    #[test]
    fn random_circuits_assemble_to_unitaries() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let wires = [Wire::cr(0), Wire::cr(1), Wire::ctc(0), Wire::ctc(1)];
        for _ in 0..40 {
            let mut gates = Vec::new();
            for _ in 0..rng.gen_range(0..8) {
                let a = wires[rng.gen_range(0..wires.len())];
                let mut b = wires[rng.gen_range(0..wires.len())];
                while b == a {
                    b = wires[rng.gen_range(0..wires.len())];
                }
                gates.push(match rng.gen_range(0..6) {
                    0 => Gate::x(a),
                    1 => Gate::h(a),
                    2 => Gate::new(GateKind::Z, vec![a]),
                    3 => Gate::cnot(a, b),
                    4 => Gate::swap(a, b),
                    _ => Gate::new(GateKind::Cz, vec![a, b]),
                });
            }
            let c = Circuit::new(2, 2, DensityMatrix::basis(4, 0), gates).unwrap();
            let u = assemble_unitary(&c).unwrap();
            assert!(u.unitarity_defect() <= 1e-9);
        }
    }

    #[test]
    fn bell_preparation_evolves_correctly() {
        // H then CNOT on |00⟩ gives the Bell state
        let c = Circuit::new(
            2,
            0,
            DensityMatrix::basis(4, 0),
            vec![Gate::h(Wire::cr(0)), Gate::cnot(Wire::cr(0), Wire::cr(1))],
        )
        .unwrap();
        let out = evolve_unitary(&c).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::from_pure(&[
            Complex64::new(r, 0.0),
            ZERO,
            ZERO,
            Complex64::new(r, 0.0),
        ])
        .unwrap();
        assert!(trace_distance(out.matrix(), bell.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn permutation_action_detects_swap() {
        let swap = GateKind::Swap.matrix();
        assert_eq!(permutation_action(&swap), Some(vec![0, 2, 1, 3]));
        let h = GateKind::H.matrix();
        assert_eq!(permutation_action(&h), None);
    }
}
