//! Deutsch-model semantics for chronology-violating circuits.
//!
//! The CR input parameterizes a channel on the CTC carrier,
//! `N(ρ) = Tr_CR[U(ρ_in ⊗ ρ)U†]`, and the self-consistency requirement is
//! that the CTC-bound state be a fixed point of `N`. A density-operator fixed
//! point always exists, but need not be unique; non-uniqueness is surfaced as
//! the affine dimension of the fixed-point set, never silently resolved.
//!
//! Two independent solvers cross-validate each other: a spectral route
//! (nullspace of the superoperator minus identity, plus the exact ergodic
//! projection of the maximally mixed state) and an iterative route (averaged
//! fixed-point iteration, equivalent in the limit to Cesàro averaging of
//! channel iterates). A bit-level classical oracle covers permutation
//! circuits.

use crate::circuit::{assemble_unitary, permutation_action, Circuit};
use crate::error::{Error, Result};
use crate::qlin::{
    self, eig_hermitian, kron, negativity, partial_trace, solve_linear, trace_norm,
    von_neumann_entropy, ComplexMatrix, Complex64, DensityMatrix, ONE, ZERO,
};
use crate::tol;

/// Iteration cap for the averaged fixed-point iteration.
pub const ITERATION_CAP: u64 = 1_000_000;

/// Eigenvalue cutoff on (S−I)†(S−I) below which a vector counts as null.
const NULLSPACE_CUT: f64 = 1e-12;

/// 2-norm residual filter applied to candidate null vectors.
const NULLVEC_RESIDUAL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

/// The CR-input-parameterized channel on the CTC carrier, stored as a
/// superoperator matrix acting on column-vectorized operators.
#[derive(Debug, Clone)]
pub struct CtcChannel {
    d_ctc: usize,
    superoperator: ComplexMatrix,
    u: ComplexMatrix,
    rho_in: DensityMatrix,
}

/// `N(ρ) = Tr_CR[U(ρ_in ⊗ ρ)U†]`, realized by applying the map to the d²
/// matrix units. `rho_in` may be mixed (needed when the CR input is the
/// reduced half of an entangled pair).
pub fn induced_channel(u: &ComplexMatrix, rho_in: &DensityMatrix) -> Result<CtcChannel> {
    if !u.is_square() {
        return Err(Error::NotSquare(u.rows(), u.cols()));
    }
    let defect = u.unitarity_defect();
    if defect > tol::UNITARY {
        return Err(Error::NotUnitary(defect));
    }
    let d_cr = rho_in.dim();
    if u.rows() % d_cr != 0 {
        return Err(Error::DimensionMismatch(format!(
            "U dim {} not divisible by CR dim {}",
            u.rows(),
            d_cr
        )));
    }
    let d_ctc = u.rows() / d_cr;
    let mut superoperator = ComplexMatrix::zeros(d_ctc * d_ctc, d_ctc * d_ctc);
    for j in 0..d_ctc {
        for i in 0..d_ctc {
            let mut unit = ComplexMatrix::zeros(d_ctc, d_ctc);
            unit[(i, j)] = ONE;
            let image = apply_direct(u, rho_in, &unit)?;
            let col = j * d_ctc + i;
            for (row, &v) in image.vectorize().iter().enumerate() {
                superoperator[(row, col)] = v;
            }
        }
    }
    Ok(CtcChannel {
        d_ctc,
        superoperator,
        u: u.clone(),
        rho_in: rho_in.clone(),
    })
}

/// One application of the map by the defining formula, without going through
/// the superoperator.
fn apply_direct(
    u: &ComplexMatrix,
    rho_in: &DensityMatrix,
    rho_ctc: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let joint = kron(rho_in.matrix(), rho_ctc);
    let evolved = u.matmul(&joint).matmul(&u.dagger());
    partial_trace(&evolved, &[rho_in.dim(), rho_ctc.rows()], &[1])
}

impl CtcChannel {
    pub fn d_ctc(&self) -> usize {
        self.d_ctc
    }

    pub fn superoperator(&self) -> &ComplexMatrix {
        &self.superoperator
    }

    /// The (U, ρ_in) pair the channel was built from.
    pub fn provenance(&self) -> (&ComplexMatrix, &DensityMatrix) {
        (&self.u, &self.rho_in)
    }

    /// Apply the channel through the superoperator.
    pub fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = self.d_ctc;
        let v = m.vectorize();
        let mut out = vec![ZERO; d * d];
        for (row, slot) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (col, &vc) in v.iter().enumerate() {
                acc += self.superoperator[(row, col)] * vc;
            }
            *slot = acc;
        }
        ComplexMatrix::unvectorize(d, &out).expect("square by construction")
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::new_unchecked(self.apply(rho.matrix()).hermitize())
    }

    /// ‖N(ρ) − ρ‖₁.
    pub fn residual(&self, rho: &DensityMatrix) -> Result<f64> {
        trace_norm(&self.apply(rho.matrix()).sub(rho.matrix()))
    }

    /// Max |Tr N(B) − Tr B| over the matrix-unit basis.
    pub fn trace_preservation_defect(&self) -> f64 {
        let d = self.d_ctc;
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                let col = j * d + i;
                let mut tr = ZERO;
                for k in 0..d {
                    tr += self.superoperator[(k * d + k, col)];
                }
                let expected = if i == j { ONE } else { ZERO };
                worst = worst.max((tr - expected).norm());
            }
        }
        worst
    }

    /// Choi matrix Σ_ij E_ij ⊗ N(E_ij).
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let d = self.d_ctc;
        let mut choi = ComplexMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for i in 0..d {
                let col = j * d + i;
                for c in 0..d {
                    for r in 0..d {
                        choi[(i * d + r, j * d + c)] = self.superoperator[(c * d + r, col)];
                    }
                }
            }
        }
        choi
    }

    pub fn choi_min_eigenvalue(&self) -> Result<f64> {
        let w = qlin::eigvals_hermitian(&self.choi_matrix().hermitize())?;
        Ok(w.last().copied().unwrap_or(0.0))
    }

    /// Test hook: a copy with one superoperator entry perturbed, breaking
    /// trace preservation. Exercises failure paths in property harnesses.
    pub fn perturbed(&self, eps: f64) -> Self {
        let mut out = self.clone();
        out.superoperator[(0, 0)] += Complex64::new(eps, 0.0);
        out
    }

    /// Check trace preservation and complete positivity.
    pub fn validate(&self) -> Result<()> {
        let tp = self.trace_preservation_defect();
        if tp > tol::CHANNEL_CHECK {
            return Err(Error::ChannelInvariant(format!(
                "trace-preservation defect {:.3e}",
                tp
            )));
        }
        let min = self.choi_min_eigenvalue()?;
        if min < -tol::CHANNEL_CHECK {
            return Err(Error::ChannelInvariant(format!(
                "Choi matrix min eigenvalue {:.3e}",
                min
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Fixed-point set
// ---------------------------------------------------------------------------

/// Affine-space description of all density-operator fixed points:
/// `particular + Σ tᵢ·directions[i]`, intersected with the PSD cone.
#[derive(Debug, Clone)]
pub struct FixedPointSet {
    /// A fixed state, located in the PSD interior whenever one exists there.
    pub particular: DensityMatrix,
    /// Traceless Hermitian directions spanning the fixed subspace minus the
    /// trace constraint; orthonormal under the Hilbert-Schmidt inner product.
    pub directions: Vec<ComplexMatrix>,
    /// Number of directions; 0 iff the fixed point is unique.
    pub affine_dim: usize,
    /// Extreme points of the set. Exact for a single qubit with affine_dim
    /// ≤ 1; `None` when the extreme set is a continuum.
    pub extreme_points: Option<Vec<DensityMatrix>>,
}

impl FixedPointSet {
    /// The set member at the given affine coordinates (no PSD check).
    pub fn element(&self, t: &[f64]) -> ComplexMatrix {
        let mut m = self.particular.matrix().clone();
        for (coef, dir) in t.iter().zip(&self.directions) {
            m = m.add(&dir.scale_re(*coef));
        }
        m
    }
}

/// Characterize the whole fixed-point set of the channel: nullspace of
/// (S − I) on vectorized operators, intersected with the Hermitian trace-1
/// PSD cone.
pub fn fixed_point_space(ch: &CtcChannel) -> Result<FixedPointSet> {
    let d = ch.d_ctc;
    let dd = d * d;
    let s = &ch.superoperator;
    let m = s.sub(&ComplexMatrix::identity(dd));

    // right nullspace via the Hermitian form M†M
    let right = nullspace(&m)?;
    if right.is_empty() {
        return Err(Error::SolverDefect(
            "no fixed operator subspace found; every channel must have one".into(),
        ));
    }

    // Hermitian basis of the fixed subspace (it is closed under dagger)
    let mut herm: Vec<ComplexMatrix> = Vec::new();
    for v in &right {
        let mat = ComplexMatrix::unvectorize(d, v)?;
        for cand in [
            mat.add(&mat.dagger()).scale_re(0.5),
            mat.sub(&mat.dagger()).scale(Complex64::new(0.0, -0.5)),
        ] {
            if let Some(unit) = gram_schmidt_step(&herm, &cand) {
                herm.push(unit);
            }
        }
    }

    // particular: exact ergodic projection of I/d onto the fixed subspace
    let left = nullspace(&m.dagger())?;
    let particular = ergodic_projection(ch, &right, &left)?;
    let residual = ch.residual(&particular)?;
    if residual > tol::RESIDUAL_ACCEPT {
        return Err(Error::SolverDefect(format!(
            "spectral fixed point has residual {:.3e}",
            residual
        )));
    }

    // traceless directions: kill the trace against a pivot element
    let traces: Vec<f64> = herm.iter().map(|h| h.trace().re).collect();
    let (pivot, &tmax) = traces
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("nonempty");
    if tmax.abs() < 1e-9 {
        return Err(Error::SolverDefect(
            "fixed subspace contains no trace-1 element".into(),
        ));
    }
    let mut directions: Vec<ComplexMatrix> = Vec::new();
    for (b, h) in herm.iter().enumerate() {
        if b == pivot {
            continue;
        }
        let cand = h.sub(&herm[pivot].scale_re(traces[b] / tmax));
        if let Some(unit) = gram_schmidt_step(&directions, &cand) {
            directions.push(unit);
        }
    }
    let affine_dim = directions.len();

    let extreme_points = if affine_dim == 0 {
        Some(vec![particular.clone()])
    } else if d == 2 && affine_dim == 1 {
        Some(qubit_segment_extremes(&particular, &directions[0]))
    } else {
        None
    };

    Ok(FixedPointSet {
        particular,
        directions,
        affine_dim,
        extreme_points,
    })
}

/// Orthonormal basis of the (numerical) nullspace of `m`, via the Hermitian
/// eigenproblem on m†m with a residual filter on each candidate.
fn nullspace(m: &ComplexMatrix) -> Result<Vec<Vec<Complex64>>> {
    let h = m.dagger().matmul(m).hermitize();
    let (w, v) = eig_hermitian(&h)?;
    let n = h.rows();
    let mut out = Vec::new();
    for (k, &lam) in w.iter().enumerate() {
        if lam > NULLSPACE_CUT {
            continue;
        }
        let vec: Vec<Complex64> = (0..n).map(|i| v[(i, k)]).collect();
        let mut fit = 0.0f64;
        for i in 0..n {
            let mut acc = ZERO;
            for (j, &vj) in vec.iter().enumerate() {
                acc += m[(i, j)] * vj;
            }
            fit += acc.norm_sqr();
        }
        if fit.sqrt() <= NULLVEC_RESIDUAL {
            out.push(vec);
        }
    }
    Ok(out)
}

/// Project one vector against an orthonormal set (Hilbert-Schmidt inner
/// product) and return the normalized remainder, if any survives.
fn gram_schmidt_step(basis: &[ComplexMatrix], cand: &ComplexMatrix) -> Option<ComplexMatrix> {
    let mut rem = cand.clone();
    for _ in 0..2 {
        for b in basis {
            let coef = hs_inner(b, &rem);
            rem = rem.sub(&b.scale_re(coef));
        }
    }
    let norm = rem.frobenius_norm();
    if norm > 1e-8 {
        Some(rem.scale_re(1.0 / norm))
    } else {
        None
    }
}

/// Re Tr(A†B); real and symmetric on Hermitian matrices.
fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let mut acc = ZERO;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    acc.re
}

/// Spectral projection of I/d onto ker(S−I) along im(S−I): the state every
/// Cesàro mean of channel iterates converges to from the maximally mixed
/// start.
fn ergodic_projection(
    ch: &CtcChannel,
    right: &[Vec<Complex64>],
    left: &[Vec<Complex64>],
) -> Result<DensityMatrix> {
    let d = ch.d_ctc;
    if left.len() != right.len() {
        return Err(Error::SolverDefect(format!(
            "left/right fixed-space dimensions disagree: {} vs {}",
            left.len(),
            right.len()
        )));
    }
    let m = right.len();
    let target = DensityMatrix::maximally_mixed(d).matrix().vectorize();
    // x = Σ c_b right_b with ⟨left_a, target − x⟩ = 0 for all a
    let mut gram = ComplexMatrix::zeros(m, m);
    let mut rhs = vec![ZERO; m];
    for a in 0..m {
        for b in 0..m {
            let mut acc = ZERO;
            for i in 0..target.len() {
                acc += left[a][i].conj() * right[b][i];
            }
            gram[(a, b)] = acc;
        }
        let mut acc = ZERO;
        for i in 0..target.len() {
            acc += left[a][i].conj() * target[i];
        }
        rhs[a] = acc;
    }
    let coef = solve_linear(&gram, &rhs)?;
    let mut x = vec![ZERO; target.len()];
    for b in 0..m {
        for (i, slot) in x.iter_mut().enumerate() {
            *slot += coef[b] * right[b][i];
        }
    }
    let mat = ComplexMatrix::unvectorize(d, &x)?.hermitize();
    // scrub the trace; it is 1 up to solver roundoff
    let tr = mat.trace().re;
    if (tr - 1.0).abs() > 1e-6 {
        return Err(Error::SolverDefect(format!(
            "ergodic projection trace {:.6} far from 1",
            tr
        )));
    }
    Ok(DensityMatrix::new_unchecked(mat.scale_re(1.0 / tr)))
}

/// Extreme points of the qubit segment {P + tD : PSD}: the roots of
/// det(P + tD) = 0 in t, solved exactly. For trace-1 2×2 Hermitian matrices
/// PSD ⟺ det ≥ 0, and det D < 0 strictly for traceless D ≠ 0, so the
/// feasible set is exactly the closed interval between the roots.
fn qubit_segment_extremes(p: &DensityMatrix, dir: &ComplexMatrix) -> Vec<DensityMatrix> {
    let pm = p.matrix();
    let det_p = (pm[(0, 0)] * pm[(1, 1)] - pm[(0, 1)] * pm[(1, 0)]).re;
    let det_d = (dir[(0, 0)] * dir[(1, 1)] - dir[(0, 1)] * dir[(1, 0)]).re;
    let tr_pd = (pm[(0, 0)] * dir[(0, 0)]
        + pm[(0, 1)] * dir[(1, 0)]
        + pm[(1, 0)] * dir[(0, 1)]
        + pm[(1, 1)] * dir[(1, 1)])
        .re;
    // det(P + tD) = det_d·t² + tr_pd·t·(trace terms vanish) + det_p
    //             = det_d·t² − tr_pd·t + det_p   with Tr D = 0
    let disc = (tr_pd * tr_pd - 4.0 * det_d * det_p).max(0.0).sqrt();
    let t1 = (tr_pd + disc) / (2.0 * det_d);
    let t2 = (tr_pd - disc) / (2.0 * det_d);
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    [lo, hi]
        .iter()
        .map(|&t| DensityMatrix::new_unchecked(pm.add(&dir.scale_re(t)).hermitize()))
        .collect()
}

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

/// Fixed-point selection policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Averaged iteration from the maximally mixed state; converges to the
    /// same state as the Cesàro mean of channel iterates, but geometrically
    /// even when the channel has peripheral spectrum.
    Canonical,
    /// Maximum-entropy element of the fixed-point set. An artifact
    /// convention for picking a representative, not a physical prescription.
    MaxEnt,
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Policy::Canonical => write!(f, "canonical"),
            Policy::MaxEnt => write!(f, "maxent"),
        }
    }
}

/// A solved fixed point with its achieved residual.
#[derive(Debug, Clone)]
pub struct FixedPointSolution {
    pub rho: DensityMatrix,
    pub residual: f64,
    pub iterations: u64,
}

/// Find a density-operator fixed point of the channel under the given policy.
pub fn solve_fixed_point(
    ch: &CtcChannel,
    policy: Policy,
    target: f64,
) -> Result<FixedPointSolution> {
    match policy {
        Policy::Canonical => cesaro_solve(ch, target),
        Policy::MaxEnt => maxent_solve(ch, target),
    }
}

/// Iterate ρ ← ½(ρ + N(ρ)) from I/d. The iterates equal binomially weighted
/// Cesàro averages of N^k(I/d), so peripheral eigenvalues (e.g. the flip
/// N(|0⟩⟨0|) = |1⟩⟨1|) damp out instead of oscillating.
fn cesaro_solve(ch: &CtcChannel, target: f64) -> Result<FixedPointSolution> {
    let d = ch.d_ctc;
    let mut rho = DensityMatrix::maximally_mixed(d).into_matrix();
    let mut best = f64::INFINITY;
    for k in 0..ITERATION_CAP {
        let image = ch.apply(&rho).hermitize();
        // a map that is not trace-preserving can drive the iterates off to
        // infinity; bail out instead of feeding NaN downstream
        if !image.is_finite() || image.max_abs() > 1e9 {
            return Err(Error::SolverNoConvergence {
                residual: best,
                iterations: k,
            });
        }
        let residual = trace_norm(&image.sub(&rho))?;
        best = best.min(residual);
        if residual <= target {
            return Ok(FixedPointSolution {
                rho: DensityMatrix::new_unchecked(rho),
                residual,
                iterations: k,
            });
        }
        rho = rho.add(&image).scale_re(0.5);
    }
    Err(Error::SolverNoConvergence {
        residual: best,
        iterations: ITERATION_CAP,
    })
}

/// Maximize von Neumann entropy over the fixed-point set by coordinate
/// ascent along the affine directions, staying inside the PSD cone.
/// Entropy is concave, so each line search is unimodal; ascent starts from
/// the particular solution.
fn maxent_solve(ch: &CtcChannel, target: f64) -> Result<FixedPointSolution> {
    let fps = fixed_point_space(ch)?;
    let mut rho = fps.particular.matrix().clone();
    if fps.affine_dim > 0 {
        let mut entropy = entropy_of(&rho)?;
        for _sweep in 0..200 {
            for dir in &fps.directions {
                let (lo, hi) = psd_interval(&rho, dir);
                let t = golden_max(lo, hi, |t| {
                    entropy_of(&rho.add(&dir.scale_re(t))).unwrap_or(f64::NEG_INFINITY)
                });
                rho = rho.add(&dir.scale_re(t)).hermitize();
            }
            let now = entropy_of(&rho)?;
            if now - entropy < 1e-12 {
                break;
            }
            entropy = now;
        }
    }
    let rho = DensityMatrix::new_unchecked(rho);
    let residual = ch.residual(&rho)?;
    if residual > tol::RESIDUAL_ACCEPT.max(target) {
        return Err(Error::SolverDefect(format!(
            "maxent solution residual {:.3e}",
            residual
        )));
    }
    Ok(FixedPointSolution {
        rho,
        residual,
        iterations: 0,
    })
}

fn entropy_of(m: &ComplexMatrix) -> Result<f64> {
    von_neumann_entropy(&DensityMatrix::new_unchecked(m.hermitize()))
}

/// Feasible interval {t : ρ + tD PSD}, by bisection on the minimum
/// eigenvalue. Any trace-1 PSD matrix has Frobenius norm ≤ 1, so |t| ≤ 2
/// bounds the search for unit-norm D.
fn psd_interval(rho: &ComplexMatrix, dir: &ComplexMatrix) -> (f64, f64) {
    let min_eig = |t: f64| -> f64 {
        let m = rho.add(&dir.scale_re(t)).hermitize();
        qlin::eigvals_hermitian(&m)
            .map(|w| w.last().copied().unwrap_or(0.0))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let bound = |sign: f64| -> f64 {
        let (mut lo, mut hi) = (0.0f64, 2.0f64);
        if min_eig(sign * hi) >= 0.0 {
            return sign * hi;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if min_eig(sign * mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        sign * lo
    };
    (bound(-1.0), bound(1.0))
}

/// Golden-section maximum of a unimodal function on [lo, hi].
fn golden_max<F: Fn(f64) -> f64>(lo: f64, hi: f64, f: F) -> f64 {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..120 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

// ---------------------------------------------------------------------------
// Output and consistency
// ---------------------------------------------------------------------------

/// Chronology-respecting output `Tr_CTC[U(ρ_in ⊗ ρ_CTC)U†]`.
///
/// Does not require ρ_CTC to be self-consistent — counterfactual exploration
/// is allowed; check [`consistency_residual`] when that matters.
pub fn ctc_output(
    u: &ComplexMatrix,
    rho_in: &DensityMatrix,
    rho_ctc: &DensityMatrix,
) -> Result<DensityMatrix> {
    if u.rows() != rho_in.dim() * rho_ctc.dim() {
        return Err(Error::DimensionMismatch(format!(
            "U dim {} vs CR {} × CTC {}",
            u.rows(),
            rho_in.dim(),
            rho_ctc.dim()
        )));
    }
    let joint = kron(rho_in.matrix(), rho_ctc.matrix());
    let evolved = u.matmul(&joint).matmul(&u.dagger());
    let out = partial_trace(&evolved, &[rho_in.dim(), rho_ctc.dim()], &[0])?;
    Ok(DensityMatrix::new_unchecked(out.hermitize()))
}

/// ‖N(ρ_CTC) − ρ_CTC‖₁ for the channel induced by (U, ρ_in).
pub fn consistency_residual(
    u: &ComplexMatrix,
    rho_in: &DensityMatrix,
    rho_ctc: &DensityMatrix,
) -> Result<f64> {
    let image = apply_direct(u, rho_in, rho_ctc.matrix())?;
    trace_norm(&image.sub(rho_ctc.matrix()))
}

// ---------------------------------------------------------------------------
// Classical oracle
// ---------------------------------------------------------------------------

/// One row of the classical enumeration table.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalRow {
    /// CTC bit assignment, leftmost character = ctc[0].
    pub z: String,
    /// Whether the CTC bits exit equal to how they entered.
    pub consistent: bool,
    /// CR output bits, leftmost character = cr[0].
    pub output: String,
}

/// Brute-force classical consistency table: for each CTC bit assignment z,
/// push the bits through the gate list and mark z consistent iff the CTC
/// bits come back out unchanged.
///
/// Works at the bit level, gate by gate — independent of the unitary
/// assembly and channel machinery it serves as an oracle for.
pub fn classical_enumerate(c: &Circuit) -> Result<Vec<ClassicalRow>> {
    let input_idx = basis_index(&c.input).ok_or(Error::NotBasisInput)?;
    let gate_perms: Vec<(Vec<usize>, Vec<usize>)> = c
        .gates
        .iter()
        .enumerate()
        .map(|(gi, gate)| {
            let perm = permutation_action(&gate.kind.matrix()).ok_or_else(|| {
                Error::NotClassical(format!(
                    "gate {} ({}) does not permute basis states",
                    gi,
                    gate.kind.name()
                ))
            })?;
            let positions = gate
                .operands
                .iter()
                .map(|w| w.position(c.n_cr))
                .collect::<Vec<_>>();
            Ok((perm, positions))
        })
        .collect::<Result<_>>()?;

    let n = c.n_wires();
    let mut rows = Vec::with_capacity(c.dim_ctc());
    for z in 0..c.dim_ctc() {
        let mut bits: Vec<u8> = (0..n)
            .map(|p| {
                if p < c.n_cr {
                    ((input_idx >> (c.n_cr - 1 - p)) & 1) as u8
                } else {
                    ((z >> (c.n_ctc - 1 - (p - c.n_cr))) & 1) as u8
                }
            })
            .collect();
        for (perm, positions) in &gate_perms {
            let mut local = 0usize;
            for &p in positions {
                local = (local << 1) | bits[p] as usize;
            }
            let image = perm[local];
            for (t, &p) in positions.iter().enumerate() {
                bits[p] = ((image >> (positions.len() - 1 - t)) & 1) as u8;
            }
        }
        let z_out: usize = bits[c.n_cr..]
            .iter()
            .fold(0, |acc, &b| (acc << 1) | b as usize);
        rows.push(ClassicalRow {
            z: bitstring(z, c.n_ctc),
            consistent: z_out == z,
            output: bits[..c.n_cr]
                .iter()
                .map(|&b| char::from(b'0' + b))
                .collect(),
        });
    }
    Ok(rows)
}

/// If ρ is a computational basis projector, return its index.
pub fn basis_index(rho: &DensityMatrix) -> Option<usize> {
    let m = rho.matrix();
    let mut found = None;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m[(i, j)];
            if i == j && (v - ONE).norm() < 1e-9 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            } else if i != j && v.norm() > 1e-9 {
                return None;
            }
        }
    }
    found
}

fn bitstring(value: usize, width: usize) -> String {
    (0..width)
        .map(|p| char::from(b'0' + ((value >> (width - 1 - p)) & 1) as u8))
        .collect()
}

// ---------------------------------------------------------------------------
// Circuit-level pipeline
// ---------------------------------------------------------------------------

/// Complete solver results for one circuit under one policy.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub rho_ctc: DensityMatrix,
    pub residual: f64,
    pub policy: Policy,
    pub rho_out: DensityMatrix,
    pub fixed_space: FixedPointSet,
    /// Purity/entropy/negativity entries, in a fixed order.
    pub diagnostics: Vec<(String, f64)>,
}

/// Run the whole Deutsch-model pipeline on a circuit: assemble, build the
/// channel, characterize the fixed-point set, pick a fixed point under the
/// policy, and compute the CR output with diagnostics.
pub fn analyze_circuit(c: &Circuit, policy: Policy, target: f64) -> Result<SolveReport> {
    let u = assemble_unitary(c)?;
    let ch = induced_channel(&u, &c.input)?;
    ch.validate()?;
    let fixed_space = fixed_point_space(&ch)?;
    let solution = solve_fixed_point(&ch, policy, target)?;
    let rho_out = ctc_output(&u, &c.input, &solution.rho)?;

    let mut diagnostics = vec![
        ("input_purity".to_string(), c.input.purity()),
        ("output_purity".to_string(), rho_out.purity()),
        (
            "rho_ctc_entropy_bits".to_string(),
            von_neumann_entropy(&solution.rho)?,
        ),
        (
            "output_entropy_bits".to_string(),
            von_neumann_entropy(&rho_out)?,
        ),
    ];
    if c.n_cr >= 2 {
        let dims = vec![2usize; c.n_cr];
        diagnostics.push((
            "input_negativity_cr0_rest".to_string(),
            negativity(&c.input, &dims, &[0])?,
        ));
        diagnostics.push((
            "output_negativity_cr0_rest".to_string(),
            negativity(&rho_out, &dims, &[0])?,
        ));
    }

    Ok(SolveReport {
        rho_ctc: solution.rho,
        residual: solution.residual,
        policy,
        rho_out,
        fixed_space,
        diagnostics,
    })
}

/// Outputs attached to each extreme fixed point, for the all-extremes view.
pub fn extreme_outputs(
    c: &Circuit,
    fps: &FixedPointSet,
) -> Result<Vec<(DensityMatrix, DensityMatrix)>> {
    let u = assemble_unitary(c)?;
    let mut out = Vec::new();
    if let Some(points) = &fps.extreme_points {
        for p in points {
            out.push((p.clone(), ctc_output(&u, &c.input, p)?));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
