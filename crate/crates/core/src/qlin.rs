//! Dense complex linear algebra and quantum-information diagnostics.
//!
//! Everything here works on small dense matrices (dims well below 2^10), with
//! value semantics throughout. Subsystem ordering convention: index 0 is the
//! leftmost tensor factor, i.e. the most significant bits of basis labels.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::tol;

/// Complex scalar used across the crate.
pub type Complex64 = Complex<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

// ---------------------------------------------------------------------------
// ComplexMatrix
// ---------------------------------------------------------------------------

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dims must be >= 1");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Build from a row-major flat list.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {}x{} = {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build a square matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let data = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_flat(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-entry deviation from M = M†.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Max-entry deviation of U†U from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.dagger()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }

    /// (M + M†)/2, useful for scrubbing roundoff off Hermitian results.
    pub fn hermitize(&self) -> Self {
        self.add(&self.dagger()).scale_re(0.5)
    }

    /// Column-major vectorization.
    pub fn vectorize(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`ComplexMatrix::vectorize`] for square matrices.
    pub fn unvectorize(dim: usize, v: &[Complex64]) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "vectorized length {} != {}^2",
                v.len(),
                dim
            )));
        }
        let mut m = Self::zeros(dim, dim);
        for j in 0..dim {
            for i in 0..dim {
                m[(i, j)] = v[j * dim + i];
            }
        }
        Ok(m)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

// ---------------------------------------------------------------------------
// Kronecker product and partial operations
// ---------------------------------------------------------------------------

/// Kronecker (tensor) product; dims multiply.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let av = a[(ia, ja)];
            if av == ZERO {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = av * b[(ib, jb)];
                }
            }
        }
    }
    out
}

fn check_subsystems(total: usize, dims: &[usize], subset: &[usize]) -> Result<Vec<usize>> {
    let prod: usize = dims.iter().product();
    if prod != total {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {:?} multiply to {}, matrix dim is {}",
            dims, prod, total
        )));
    }
    let mut sel: Vec<usize> = subset.to_vec();
    sel.sort_unstable();
    sel.dedup();
    if sel.len() != subset.len() {
        return Err(Error::InvalidBipartition("duplicate subsystem index".into()));
    }
    if sel.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidBipartition(format!(
            "subsystem index out of range (have {} subsystems)",
            dims.len()
        )));
    }
    Ok(sel)
}

/// Decompose a flat index into mixed-radix digits (index 0 most significant).
fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

fn flat(digits: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for k in 0..dims.len() {
        idx = idx * dims[k] + digits[k];
    }
    idx
}

/// Trace out every subsystem not listed in `keep`; kept subsystems stay in
/// their original relative order. Trace is preserved.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let kept = check_subsystems(m.rows(), dims, keep)?;
    if kept.is_empty() {
        return Err(Error::InvalidBipartition("keep set is empty".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let dims_k: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let dims_t: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = dims_k.iter().product();
    let dt: usize = dims_t.iter().product::<usize>().max(1);

    let mut out = ComplexMatrix::zeros(dk, dk);
    let mut full = vec![0usize; dims.len()];
    for kr in 0..dk {
        let kr_d = digits(kr, &dims_k);
        for kc in 0..dk {
            let kc_d = digits(kc, &dims_k);
            let mut acc = ZERO;
            for t in 0..dt {
                let t_d = digits(t, &dims_t);
                for (pos, &sub) in kept.iter().enumerate() {
                    full[sub] = kr_d[pos];
                }
                for (pos, &sub) in traced.iter().enumerate() {
                    full[sub] = t_d[pos];
                }
                let row = flat(&full, dims);
                for (pos, &sub) in kept.iter().enumerate() {
                    full[sub] = kc_d[pos];
                }
                let col = flat(&full, dims);
                acc += m[(row, col)];
            }
            out[(kr, kc)] = acc;
        }
    }
    Ok(out)
}

/// Transpose the indices of the subsystems in `party` only.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: &[usize],
    party: &[usize],
) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let sel = check_subsystems(m.rows(), dims, party)?;
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for row in 0..n {
        let rd = digits(row, dims);
        for col in 0..n {
            let cd = digits(col, dims);
            let mut rd2 = rd.clone();
            let mut cd2 = cd.clone();
            for &k in &sel {
                rd2[k] = cd[k];
                cd2[k] = rd[k];
            }
            out[(flat(&rd2, dims), flat(&cd2, dims))] = m[(row, col)];
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvector
/// columns, so that `m = V diag(w) V†`.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("eigensolver input"));
    }
    let defect = m.hermiticity_defect();
    if defect > tol::HERMITIAN {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows();
    let mut a = m.hermitize();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm().max(1.0);
    let stop = 1e-14 * scale;
    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = a[(p, q)];
                let abs_beta = beta.norm();
                if abs_beta <= 1e-300 {
                    continue;
                }
                let phase = beta / abs_beta;
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                let tau = (gamma - alpha) / (2.0 * abs_beta);
                // smaller-magnitude root of t^2 - 2 tau t - 1 = 0
                let sgn = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = -sgn / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let u_pq = -phase * s; // U = [[c, -s e^{i phi}], [s e^{-i phi}, c]]
                let u_qp = phase.conj() * s;
                // columns: A <- A U, V <- V U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * c;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * c;
                }
                // rows: A <- U† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * u_qp.conj();
                    a[(q, k)] = apk * u_pq.conj() + aqk * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| evals[j].total_cmp(&evals[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let mut vs = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vs[(k, new_col)] = v[(k, old_col)];
        }
    }
    Ok((sorted, vs))
}

/// Eigenvalues only, descending.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(m)?.0)
}

/// Solve a small dense square system Ax = b by Gaussian elimination with
/// partial pivoting.
pub fn solve_linear(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.rows(), a.cols()));
    }
    let n = a.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} vs matrix dim {}",
            b.len(),
            n
        )));
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let (pivot, mag) = (k..n)
            .map(|i| (i, m[(i, k)].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if mag < 1e-300 {
            return Err(Error::SolverDefect("singular linear system".into()));
        }
        if pivot != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
            }
            x.swap(k, pivot);
        }
        for i in (k + 1)..n {
            let f = m[(i, k)] / m[(k, k)];
            if f == ZERO {
                continue;
            }
            for j in k..n {
                let sub = f * m[(k, j)];
                m[(i, j)] -= sub;
            }
            let sub = f * x[k];
            x[i] -= sub;
        }
    }
    for k in (0..n).rev() {
        let mut acc = x[k];
        for j in (k + 1)..n {
            acc -= m[(k, j)] * x[j];
        }
        x[k] = acc / m[(k, k)];
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

/// Hermitian, positive-semidefinite, trace-1 complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    mat: ComplexMatrix,
}

/// Check the density-matrix invariants; returns one message per failure.
pub fn is_density_matrix(m: &ComplexMatrix) -> Vec<String> {
    let mut failures = Vec::new();
    if !m.is_square() {
        failures.push(format!("not square: {}x{}", m.rows(), m.cols()));
        return failures;
    }
    let h = m.hermiticity_defect();
    if h > tol::HERMITIAN {
        failures.push(format!("not Hermitian (defect {:.3e})", h));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
        failures.push(format!("trace is {:.12} + {:.3e}i, expected 1", tr.re, tr.im));
    }
    if h <= tol::HERMITIAN {
        match eigvals_hermitian(&m.hermitize()) {
            Ok(w) => {
                let min = w.last().copied().unwrap_or(0.0);
                if min < -tol::PSD_SLACK {
                    failures.push(format!("not PSD (min eigenvalue {:.3e})", min));
                }
            }
            Err(e) => failures.push(format!("eigensolve failed: {e}")),
        }
    }
    failures
}

impl DensityMatrix {
    /// Validate and wrap a matrix as a density operator.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let failures = is_density_matrix(&mat);
        if !failures.is_empty() {
            return Err(Error::NotDensityMatrix(failures));
        }
        Ok(Self {
            dim: mat.rows(),
            mat,
        })
    }

    /// Wrap without validation. For matrices produced by operations that
    /// preserve validity up to roundoff (channel application, partial trace).
    pub fn new_unchecked(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.is_square());
        Self {
            dim: mat.rows(),
            mat,
        }
    }

    /// |ψ⟩⟨ψ| from a state vector; the vector is normalized first.
    pub fn from_pure(ket: &[Complex64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::DimensionMismatch("zero state vector".into()));
        }
        let dim = ket.len();
        let mut mat = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                mat[(i, j)] = ket[i] * ket[j].conj() / (norm * norm);
            }
        }
        Ok(Self { dim, mat })
    }

    /// Computational basis projector |idx⟩⟨idx|.
    pub fn basis(dim: usize, idx: usize) -> Self {
        assert!(idx < dim);
        let mut mat = ComplexMatrix::zeros(dim, dim);
        mat[(idx, idx)] = ONE;
        Self { dim, mat }
    }

    /// I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mat = ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64);
        Self { dim, mat }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.mat.matmul(&self.mat).trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvals_hermitian(&self.mat.hermitize())
    }
}

// ---------------------------------------------------------------------------
// Quantum-information diagnostics
// ---------------------------------------------------------------------------

/// Von Neumann entropy in bits, with 0·log 0 := 0.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let w = rho.eigenvalues()?;
    let mut s = 0.0;
    for &lam in &w {
        if lam > 1e-15 {
            s -= lam * lam.log2();
        }
    }
    Ok(s)
}

/// Entanglement negativity: sum of |negative eigenvalues| of the partial
/// transpose over `party_a`.
pub fn negativity(rho: &DensityMatrix, dims: &[usize], party_a: &[usize]) -> Result<f64> {
    if party_a.is_empty() {
        return Err(Error::InvalidBipartition("party A is empty".into()));
    }
    let sel = check_subsystems(rho.dim(), dims, party_a)?;
    if sel.len() == dims.len() {
        return Err(Error::InvalidBipartition(
            "party A must leave a nonempty complement".into(),
        ));
    }
    let pt = partial_transpose(rho.matrix(), dims, &sel)?;
    let w = eigvals_hermitian(&pt.hermitize())?;
    Ok(w.iter().filter(|&&x| x < 0.0).map(|x| -x).sum())
}

/// Trace norm ‖M‖₁ = Σ|λ| of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let w = eigvals_hermitian(&m.hermitize())?;
    Ok(w.iter().map(|x| x.abs()).sum())
}

/// ½‖A − B‖₁ for Hermitian A, B.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm(&a.sub(b))?)
}

/// ⟨ψ|ρ|ψ⟩ for a pure reference state.
pub fn fidelity_pure(ket: &[Complex64], rho: &DensityMatrix) -> Result<f64> {
    if ket.len() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ket dim {} vs rho dim {}",
            ket.len(),
            rho.dim()
        )));
    }
    let mut acc = ZERO;
    for i in 0..ket.len() {
        for j in 0..ket.len() {
            acc += ket[i].conj() * rho.matrix()[(i, j)] * ket[j];
        }
    }
    Ok(acc.re)
}

// ---------------------------------------------------------------------------
// Random instances (seeded; used by property suites and `check`)
// ---------------------------------------------------------------------------

/// Haar-random unitary: QR of a complex Gaussian matrix with the R-diagonal
/// phase fix, via modified Gram-Schmidt.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    Complex64::new(gaussian(rng), gaussian(rng))
                })
                .collect()
        })
        .collect();
    let mut q = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        for _pass in 0..2 {
            for k in 0..j {
                let mut proj = ZERO;
                for i in 0..dim {
                    proj += q[(i, k)].conj() * cols[j][i];
                }
                for i in 0..dim {
                    let sub = proj * q[(i, k)];
                    cols[j][i] -= sub;
                }
            }
        }
        // MGS leaves the R diagonal real and positive, which keeps Q Haar-distributed
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..dim {
            q[(i, j)] = cols[j][i] / norm;
        }
    }
    q
}

/// Random normalized state vector (Haar on the sphere).
pub fn random_pure_state<R: Rng>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut ket: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut ket {
        *z /= norm;
    }
    ket
}

/// Random full-rank density matrix GG†/Tr(GG†).
pub fn random_density_matrix<R: Rng>(dim: usize, rng: &mut R) -> DensityMatrix {
    let mut g = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = Complex64::new(gaussian(rng), gaussian(rng));
        }
    }
    let gg = g.matmul(&g.dagger());
    let tr = gg.trace().re;
    DensityMatrix::new_unchecked(gg.scale_re(1.0 / tr))
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; avoids log(0)
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn bell_state() -> DensityMatrix {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_pure(&[
            Complex64::new(r, 0.0),
            ZERO,
            ZERO,
            Complex64::new(r, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_basis_projectors() {
        let p0 = DensityMatrix::basis(2, 0);
        let p1 = DensityMatrix::basis(2, 1);
        let prod = kron(p0.matrix(), p1.matrix());
        // |01⟩⟨01| has its single 1 at index 1
        let expected = DensityMatrix::basis(4, 1);
        assert!(prod.max_abs_diff(expected.matrix()) < 1e-15);
    }

    #[test]
    fn kron_xx_flips_00_to_11() {
        let xx = kron(&pauli_x(), &pauli_x());
        let ket00 = [ONE, ZERO, ZERO, ZERO];
        let mut out = [ZERO; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += xx[(i, j)] * ket00[j];
            }
        }
        assert_eq!(out[3], ONE);
        assert!(out[..3].iter().all(|&z| z == ZERO));
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = kron(
            DensityMatrix::basis(2, 0).matrix(),
            DensityMatrix::basis(2, 1).matrix(),
        );
        let reduced = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!(reduced.max_abs_diff(DensityMatrix::basis(2, 0).matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_bell_half_is_maximally_mixed() {
        let reduced = partial_trace(bell_state().matrix(), &[2, 2], &[0]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(reduced.max_abs_diff(mixed.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_kron_recovers_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_density_matrix(2, &mut rng);
            let b = random_density_matrix(4, &mut rng);
            let joint = kron(a.matrix(), b.matrix());
            let back = partial_trace(&joint, &[2, 4], &[1]).unwrap();
            assert!(back.max_abs_diff(b.matrix()) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::identity(6);
        assert!(partial_trace(&m, &[2, 2], &[0]).is_err());
    }

    #[test]
    fn eig_identity() {
        let (w, _) = eig_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_pauli_x_spectrum() {
        let (w, v) = eig_hermitian(&pauli_x()).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12);
        assert!((w[1] + 1.0).abs() < 1e-12);
        // reconstruction
        let mut lam = ComplexMatrix::zeros(2, 2);
        lam[(0, 0)] = Complex64::new(w[0], 0.0);
        lam[(1, 1)] = Complex64::new(w[1], 0.0);
        let rec = v.matmul(&lam).matmul(&v.dagger());
        assert!(rec.max_abs_diff(&pauli_x()) < 1e-12);
    }

    #[test]
    fn eig_diagonal_readoff() {
        let m = ComplexMatrix::from_real(2, 2, &[0.8, 0.0, 0.0, 0.2]).unwrap();
        let (w, _) = eig_hermitian(&m).unwrap();
        assert!((w[0] - 0.8).abs() < 1e-14);
        assert!((w[1] - 0.2).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &n in &[2usize, 3, 8, 16] {
            let mut g = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    g[(i, j)] = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
                }
            }
            let h = g.hermitize();
            let (w, v) = eig_hermitian(&h).unwrap();
            let mut lam = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                lam[(i, i)] = Complex64::new(w[i], 0.0);
            }
            let rec = v.matmul(&lam).matmul(&v.dagger());
            assert!(rec.max_abs_diff(&h) <= 1e-9 * h.max_abs().max(1.0));
            assert!(v.unitarity_defect() < 1e-9);
        }
    }

    #[test]
    fn negativity_product_state_is_zero() {
        let rho = DensityMatrix::basis(4, 1); // |01⟩⟨01|
        let n = negativity(&rho, &[2, 2], &[0]).unwrap();
        assert!(n.abs() < 1e-12);
    }

    #[test]
    fn negativity_bell_is_half() {
        let n = negativity(&bell_state(), &[2, 2], &[0]).unwrap();
        assert!((n - 0.5).abs() < 1e-12);
    }

    #[test]
    fn negativity_classical_mixture_is_zero() {
        // ½(|00⟩⟨00| + |11⟩⟨11|): diagonal, PSD partial transpose
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(3, 3)] = Complex64::new(0.5, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        assert!(negativity(&rho, &[2, 2], &[0]).unwrap() < 1e-12);
    }

    #[test]
    fn negativity_rejects_bad_bipartition() {
        assert!(negativity(&bell_state(), &[2, 2], &[]).is_err());
        assert!(negativity(&bell_state(), &[2, 2], &[0, 1]).is_err());
        assert!(negativity(&bell_state(), &[2, 2], &[5]).is_err());
    }

    #[test]
    fn entropy_pure_state_is_zero() {
        let s = von_neumann_entropy(&DensityMatrix::basis(2, 0)).unwrap();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn entropy_maximally_mixed_qubit_is_one_bit() {
        let s = von_neumann_entropy(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_binary_distribution() {
        let m = ComplexMatrix::from_real(2, 2, &[0.8, 0.0, 0.0, 0.2]).unwrap();
        let rho = DensityMatrix::new(m).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        let expected = -(0.8f64 * 0.8f64.log2() + 0.2 * 0.2f64.log2());
        assert!((s - expected).abs() < 1e-12);
        assert!((s - 0.72193).abs() < 1e-5);
    }

    #[test]
    fn density_matrix_validation_reports_failures() {
        let not_trace_one = ComplexMatrix::identity(2);
        let failures = is_density_matrix(&not_trace_one);
        assert_eq!(failures.len(), 1);
        assert!(failures[0].contains("trace"));

        let mut neg = ComplexMatrix::zeros(2, 2);
        neg[(0, 0)] = Complex64::new(1.5, 0.0);
        neg[(1, 1)] = Complex64::new(-0.5, 0.0);
        let failures = is_density_matrix(&neg);
        assert!(failures.iter().any(|f| f.contains("PSD")));
    }

    #[test]
    fn trace_distance_orthogonal_projectors() {
        let d = trace_distance(
            DensityMatrix::basis(2, 0).matrix(),
            DensityMatrix::basis(2, 1).matrix(),
        )
        .unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &n in &[2usize, 4, 8] {
            let u = random_unitary(n, &mut rng);
            assert!(u.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn solve_linear_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for &n in &[1usize, 3, 8] {
            let mut a = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
                }
            }
            let x_true: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)))
                .collect();
            let mut b = vec![ZERO; n];
            for i in 0..n {
                for j in 0..n {
                    b[i] += a[(i, j)] * x_true[j];
                }
            }
            let x = solve_linear(&a, &b).unwrap();
            for i in 0..n {
                assert!((x[i] - x_true[i]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn purity_values() {
        assert!((DensityMatrix::basis(2, 0).purity() - 1.0).abs() < 1e-14);
        assert!((DensityMatrix::maximally_mixed(2).purity() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn fidelity_pure_matches_overlap() {
        let rho = DensityMatrix::maximally_mixed(2);
        let f = fidelity_pure(&[ONE, ZERO], &rho).unwrap();
        assert!((f - 0.5).abs() < 1e-14);
    }
}
