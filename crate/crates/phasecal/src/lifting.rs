//! Domain types and pure functions for lifting, measurement simulation,
//! support patterns, the sign matrix, and the objectives `f_λ` and `G`.
//!
//! Everything here is immutable after construction and safe to share across
//! workers. Complex scalars are `num_complex::Complex64` (explicit
//! real/imaginary pairs); a real-field mode is obtained by generating data
//! with zero imaginary parts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative threshold below which an entry counts as structurally zero.
/// Ground-truth signals are generated with exactly-zero off-support entries,
/// so this only guards float noise.
pub const SUPPORT_TOL: f64 = 1e-9;

/// Relative Hermitian-defect tolerance for validated matrices.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Unitarity tolerance for eigenbasis validation.
pub const UNITARY_TOL: f64 = 1e-12;

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The L ground-truth K-sparse complex signals `x_ℓ ∈ C^N` and their joint
/// stacking `x ∈ C^{LN}`.
#[derive(Debug, Clone)]
pub struct SignalSet {
    n: usize,
    l: usize,
    k: usize,
    signals: Vec<DVector<Complex64>>,
    joint: DVector<Complex64>,
}

impl SignalSet {
    /// Builds a signal set, checking that every signal has exactly `k`
    /// entries whose modulus exceeds [`SUPPORT_TOL`] relative to that
    /// signal's largest entry modulus.
    pub fn new(signals: Vec<DVector<Complex64>>, k: usize) -> Result<Self> {
        if signals.is_empty() {
            return Err(Error::EmptyInput("signal set"));
        }
        let n = signals[0].len();
        if n == 0 {
            return Err(Error::EmptyInput("signal"));
        }
        for (idx, s) in signals.iter().enumerate() {
            if s.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "signal {idx} has length {} but expected {n}",
                    s.len()
                )));
            }
            if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("signal entries"));
            }
            let max_mod = s.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            let thresh = SUPPORT_TOL * max_mod;
            let nnz = s.iter().filter(|z| z.norm() > thresh).count();
            if nnz != k {
                return Err(Error::InvalidParameter(format!(
                    "signal {idx} has {nnz} entries above threshold, expected sparsity {k}"
                )));
            }
        }
        let l = signals.len();
        let joint = DVector::from_iterator(l * n, signals.iter().flat_map(|s| s.iter().copied()));
        Ok(Self { n, l, k, signals, joint })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn signals(&self) -> &[DVector<Complex64>] {
        &self.signals
    }

    /// The stacked vector `[x_1; …; x_L]` of length `L·N`.
    pub fn joint(&self) -> &DVector<Complex64> {
        &self.joint
    }

    /// True when every entry of every signal has zero imaginary part.
    pub fn is_real_field(&self) -> bool {
        self.joint.iter().all(|z| z.im == 0.0)
    }
}

/// The M measurement vectors `m_i ∈ C^N` plus optional unknown phases `θ_i`.
#[derive(Debug, Clone)]
pub struct MeasurementEnsemble {
    vectors: Vec<DVector<Complex64>>,
    phases: Option<Vec<f64>>,
}

impl MeasurementEnsemble {
    pub fn new(vectors: Vec<DVector<Complex64>>, phases: Option<Vec<f64>>) -> Result<Self> {
        if let Some(first) = vectors.first() {
            let n = first.len();
            for (i, v) in vectors.iter().enumerate() {
                if v.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "measurement vector {i} has length {} but expected {n}",
                        v.len()
                    )));
                }
                if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::NonFinite("measurement vector"));
                }
                if v.iter().all(|z| z.norm() == 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "measurement vector {i} is the zero vector"
                    )));
                }
            }
        }
        if let Some(p) = &phases {
            if p.len() != vectors.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} phases for {} measurement vectors",
                    p.len(),
                    vectors.len()
                )));
            }
            if p.iter().any(|t| !t.is_finite()) {
                return Err(Error::NonFinite("phases"));
            }
        }
        Ok(Self { vectors, phases })
    }

    /// An ensemble with no measurement vectors at all (M = 0).
    pub fn empty() -> Self {
        Self { vectors: Vec::new(), phases: None }
    }

    pub fn m(&self) -> usize {
        self.vectors.len()
    }

    /// Ambient dimension N, or 0 for an empty ensemble.
    pub fn n(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    pub fn vectors(&self) -> &[DVector<Complex64>] {
        &self.vectors
    }

    pub fn phases(&self) -> Option<&[f64]> {
        self.phases.as_deref()
    }
}

/// The observed table `y_{i,ℓ}` (M rows, L columns).
#[derive(Debug, Clone)]
pub struct MeasurementTable {
    values: DMatrix<Complex64>,
}

impl MeasurementTable {
    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    pub fn m(&self) -> usize {
        self.values.nrows()
    }

    pub fn l(&self) -> usize {
        self.values.ncols()
    }
}

/// The cross-measurement tensor `g_{i,k,ℓ} = y_{i,k}·conj(y_{i,ℓ})`, stored
/// as M blocks of L×L matrices. Conjugate symmetry within each block and
/// real nonnegative diagonals hold exactly by construction.
#[derive(Debug, Clone)]
pub struct CrossMeasurements {
    l: usize,
    blocks: Vec<DMatrix<Complex64>>,
}

impl CrossMeasurements {
    /// Constructs from raw blocks, validating conjugate symmetry and
    /// nonnegative real diagonals.
    pub fn new(blocks: Vec<DMatrix<Complex64>>, l: usize) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if b.nrows() != l || b.ncols() != l {
                return Err(Error::DimensionMismatch(format!(
                    "cross-measurement block {i} is {}x{}, expected {l}x{l}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            for k in 0..l {
                if b[(k, k)].im != 0.0 || b[(k, k)].re < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "block {i} diagonal ({k},{k}) is not real nonnegative"
                    )));
                }
                for j in (k + 1)..l {
                    if b[(k, j)] != b[(j, k)].conj() {
                        return Err(Error::InvalidParameter(format!(
                            "block {i} is not conjugate-symmetric at ({k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(Self { l, blocks })
    }

    /// CPRL-style data: `g_{i,1,1} = |y_i|²` from magnitude measurements.
    pub fn from_magnitudes(magnitudes: &[f64]) -> Result<Self> {
        if magnitudes.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("magnitudes"));
        }
        if let Some(bad) = magnitudes.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidParameter(format!("negative magnitude {bad}")));
        }
        let blocks = magnitudes
            .iter()
            .map(|&v| DMatrix::from_element(1, 1, cplx(v, 0.0)))
            .collect();
        Ok(Self { l: 1, blocks })
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn value(&self, i: usize, k: usize, l: usize) -> Complex64 {
        self.blocks[i][(k, l)]
    }

    /// All-zero tensor of the given shape.
    pub fn zeros(m: usize, l: usize) -> Self {
        Self { l, blocks: (0..m).map(|_| DMatrix::zeros(l, l)).collect() }
    }
}

/// Dense D×D Hermitian matrix; carrier for X, Z and the certification
/// iterates.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    pub(crate) mat: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Validates the Hermitian invariant
    /// `max |Z_ij − conj(Z_ji)| ≤ tol · max(1, max |Z_ij|)`.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix is not square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let defect = hermitian_defect(&mat);
        let scale = mat.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { defect, tol: HERMITIAN_TOL * scale });
        }
        Ok(Self { mat })
    }

    /// Wraps without validation; the caller guarantees Hermitian symmetry.
    pub(crate) fn from_unchecked(mat: DMatrix<Complex64>) -> Self {
        Self { mat }
    }

    /// Replaces the matrix by its Hermitian part `(Z + Z')/2`.
    pub fn symmetrized(mat: DMatrix<Complex64>) -> Self {
        let sym = (&mat + mat.adjoint()) * cplx(0.5, 0.0);
        Self { mat: sym }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    /// Real part of the diagonal sum.
    pub fn trace_re(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    /// Entrywise ℓ1 norm `Σ |Z_ij|`.
    pub fn entry_l1(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.mat.norm()
    }

    pub fn max_modulus(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0f64, f64::max)
    }

    /// `max |Z_ij − conj(Z_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.mat)
    }

    pub fn is_finite(&self) -> bool {
        self.mat.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn hermitian_defect(mat: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..mat.nrows() {
        for j in i..mat.ncols() {
            worst = worst.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Boolean mask over matrix entries, true on the support Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPattern {
    mask: DMatrix<bool>,
}

impl SupportPattern {
    pub fn dim(&self) -> usize {
        self.mask.nrows()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.mask[(i, j)]
    }

    pub fn mask(&self) -> &DMatrix<bool> {
        &self.mask
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

/// Entrywise phases of the lifted ground truth: zero off-support,
/// unit-modulus on-support, Hermitian.
#[derive(Debug, Clone)]
pub struct SignMatrix {
    mat: DMatrix<Complex64>,
}

impl SignMatrix {
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }
}

/// Unitary basis whose first column is `x/‖x‖₂` up to a fixed deterministic
/// global phase; the remaining columns complete it to a unitary matrix.
#[derive(Debug, Clone)]
pub struct EigBasis {
    e: DMatrix<Complex64>,
}

impl EigBasis {
    pub fn dim(&self) -> usize {
        self.e.nrows()
    }

    pub fn columns(&self) -> &DMatrix<Complex64> {
        &self.e
    }

    /// `E' Z E`.
    pub fn to_reduced(&self, z: &HermitianMatrix) -> DMatrix<Complex64> {
        self.e.adjoint() * &z.mat * &self.e
    }

    /// `E W E'`.
    pub fn from_reduced(&self, w: &DMatrix<Complex64>) -> HermitianMatrix {
        HermitianMatrix::from_unchecked(&self.e * w * self.e.adjoint())
    }

    /// `max |(E'E − I)_ij|`, for validation.
    pub fn unitary_defect(&self) -> f64 {
        let d = self.dim();
        let g = self.e.adjoint() * &self.e;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { cplx(1.0, 0.0) } else { cplx(0.0, 0.0) };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }
}

/// Lifts a joint vector to its rank-one Hermitian PSD outer product
/// `X = x x'`.
pub fn lift(x: &DVector<Complex64>) -> Result<HermitianMatrix> {
    if x.is_empty() {
        return Err(Error::EmptyInput("lift"));
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("lift input"));
    }
    let mat = x * x.adjoint();
    Ok(HermitianMatrix::from_unchecked(mat))
}

/// Builds the unitary `E` with first column `x/‖x‖₂` (up to a deterministic
/// global phase) via a Householder reflector; reproducible bit-for-bit.
pub fn build_eigbasis(x: &DVector<Complex64>) -> Result<EigBasis> {
    let d = x.len();
    if d == 0 {
        return Err(Error::EmptyInput("eigbasis"));
    }
    let nrm = x.norm();
    if nrm == 0.0 || !nrm.is_finite() {
        return Err(Error::ZeroSignal);
    }
    let u = x / cplx(nrm, 0.0);
    // Rotate the global phase so the first component is real nonnegative,
    // then reflect through w = v + e1 (never cancels since v1 >= 0).
    let gamma = if u[0].norm() > 0.0 { u[0] / cplx(u[0].norm(), 0.0) } else { cplx(1.0, 0.0) };
    let v = &u * gamma.conj();
    let mut w = v.clone();
    w[0] += 1.0;
    let wsq = w.norm_squared();
    let mut e = DMatrix::identity(d, d);
    let scale = cplx(2.0 / wsq, 0.0);
    e -= (&w * w.adjoint()) * scale;
    // H maps e1 to -v; flip the first column so E e1 = v exactly.
    for i in 0..d {
        e[(i, 0)] = -e[(i, 0)];
    }
    Ok(EigBasis { e })
}

/// Like [`build_eigbasis`] but with the trailing columns drawn at random and
/// re-orthonormalized; the first column is unchanged. Used to check that
/// certification verdicts do not depend on the choice of completion.
pub fn build_eigbasis_randomized(
    x: &DVector<Complex64>,
    rng: &mut impl rand::Rng,
) -> Result<EigBasis> {
    let base = build_eigbasis(x)?;
    let d = base.dim();
    let mut cols: Vec<DVector<Complex64>> = Vec::with_capacity(d);
    cols.push(base.e.column(0).into_owned());
    let mut attempts = 0;
    while cols.len() < d {
        let mut c = DVector::from_fn(d, |_, _| {
            cplx(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        // Two Gram-Schmidt passes for orthogonality at working precision.
        for _ in 0..2 {
            for prev in &cols {
                let coef = prev.dotc(&c);
                c -= prev * coef;
            }
        }
        let nrm = c.norm();
        attempts += 1;
        if nrm > 1e-8 {
            cols.push(c / cplx(nrm, 0.0));
        } else if attempts > 16 * d {
            return Err(Error::SolverAbort("random basis completion failed".into()));
        }
    }
    let e = DMatrix::from_columns(&cols);
    Ok(EigBasis { e })
}

/// Support pattern of `X`: mask true where `|X_ij| > support_tol · max|X|`.
pub fn support_pattern(x: &HermitianMatrix, support_tol: f64) -> SupportPattern {
    let thresh = support_tol * x.max_modulus();
    let mask = DMatrix::from_fn(x.dim(), x.dim(), |i, j| x.mat[(i, j)].norm() > thresh);
    SupportPattern { mask }
}

/// Entrywise `X_ij/|X_ij|` on support, zero elsewhere (zero decided by
/// [`SUPPORT_TOL`] relative to the largest entry modulus).
pub fn sign_matrix(x: &HermitianMatrix) -> SignMatrix {
    let thresh = SUPPORT_TOL * x.max_modulus();
    let mat = DMatrix::from_fn(x.dim(), x.dim(), |i, j| {
        let z = x.mat[(i, j)];
        let m = z.norm();
        if m > thresh {
            z / cplx(m, 0.0)
        } else {
            cplx(0.0, 0.0)
        }
    });
    SignMatrix { mat }
}

/// The certification objective
/// `G(Z) = ‖Z_{Ω⊥}‖₁ + Re⟨S, Z_Ω⟩` with `⟨A,B⟩ = Σ conj(A_ij) B_ij`.
pub fn g_objective(z: &HermitianMatrix, omega: &SupportPattern, s: &SignMatrix) -> Result<f64> {
    let d = z.dim();
    if omega.dim() != d || s.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "g_objective: Z is {d}, Ω is {}, S is {}",
            omega.dim(),
            s.dim()
        )));
    }
    let mut acc = 0.0;
    for j in 0..d {
        for i in 0..d {
            let zij = z.mat[(i, j)];
            if omega.contains(i, j) {
                acc += (s.entry(i, j).conj() * zij).re;
            } else {
                acc += zij.norm();
            }
        }
    }
    Ok(acc)
}

/// The recovery objective `f_λ(Z) = Tr(Z) + λ‖Z‖₁` (trace as the real part
/// of the diagonal sum).
pub fn f_lambda(z: &HermitianMatrix, lambda: f64) -> Result<f64> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be >= 0")));
    }
    Ok(z.trace_re() + lambda * z.entry_l1())
}

/// Simulates `y_{i,ℓ} = e^{jθ_i} m_i' x_ℓ`; phases default to zero when the
/// ensemble carries none (the calibrated case).
pub fn simulate_measurements(
    signals: &SignalSet,
    ensemble: &MeasurementEnsemble,
) -> Result<MeasurementTable> {
    if ensemble.m() > 0 && ensemble.n() != signals.n() {
        return Err(Error::DimensionMismatch(format!(
            "ensemble dimension {} vs signal dimension {}",
            ensemble.n(),
            signals.n()
        )));
    }
    let m = ensemble.m();
    let l = signals.l();
    let mut values = DMatrix::zeros(m, l);
    for i in 0..m {
        let phase = ensemble
            .phases()
            .map_or(cplx(1.0, 0.0), |p| Complex64::from_polar(1.0, p[i]));
        for (ell, sig) in signals.signals().iter().enumerate() {
            values[(i, ell)] = phase * ensemble.vectors()[i].dotc(sig);
        }
    }
    Ok(MeasurementTable { values })
}

/// Builds `g_{i,k,ℓ} = y_{i,k}·conj(y_{i,ℓ})`; conjugate symmetry and real
/// diagonals are constructed exactly, not approximated.
pub fn cross_measure(table: &MeasurementTable) -> CrossMeasurements {
    let m = table.m();
    let l = table.l();
    let mut blocks = Vec::with_capacity(m);
    for i in 0..m {
        let mut b = DMatrix::zeros(l, l);
        for k in 0..l {
            b[(k, k)] = cplx(table.values[(i, k)].norm_sqr(), 0.0);
            for j in (k + 1)..l {
                let v = table.values[(i, k)] * table.values[(i, j)].conj();
                b[(k, j)] = v;
                b[(j, k)] = v.conj();
            }
        }
        blocks.push(b);
    }
    CrossMeasurements { l, blocks }
}

/// Applies the lifted measurement map: `out_{i,k,ℓ} = m_i' Z_{k,ℓ} m_i`
/// where `Z_{k,ℓ}` is the N×N sub-block at rows `kN..`, columns `ℓN..`.
pub fn measure_lifted(
    z: &HermitianMatrix,
    ensemble: &MeasurementEnsemble,
    l: usize,
) -> Result<Vec<DMatrix<Complex64>>> {
    let d = z.dim();
    if l == 0 || d % l != 0 {
        return Err(Error::DimensionMismatch(format!(
            "lifted dimension {d} is not divisible by L = {l}"
        )));
    }
    let n = d / l;
    if ensemble.m() > 0 && ensemble.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "ensemble dimension {} vs block dimension {n}",
            ensemble.n()
        )));
    }
    let mut out = Vec::with_capacity(ensemble.m());
    for mi in ensemble.vectors() {
        let mut block = DMatrix::zeros(l, l);
        // y_col = Z[:, cN..(c+1)N] * m_i, then block(r,c) = m_i' y_col[rN..].
        for c in 0..l {
            let ycol = z.mat.view((0, c * n), (d, n)) * mi;
            for r in 0..l {
                let mut acc = cplx(0.0, 0.0);
                for a in 0..n {
                    acc += mi[a].conj() * ycol[r * n + a];
                }
                block[(r, c)] = acc;
            }
        }
        out.push(block);
    }
    Ok(out)
}

/// Tests membership of `Dhat` in the rotated structure set with
/// `b ∈ range(C)`: writes `W = E' Dhat E = [a b'; b C]` and checks that
/// `a` is real, `C ⪰ 0`, and the component of `b` orthogonal to the
/// significant eigenvectors of `C` is negligible.
pub fn sd_membership(dhat: &HermitianMatrix, e: &EigBasis, rank_tol: f64) -> Result<bool> {
    let d = dhat.dim();
    if e.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {d} vs basis dimension {}",
            e.dim()
        )));
    }
    let w = e.to_reduced(dhat);
    let a = w[(0, 0)];
    if a.im.abs() > rank_tol {
        return Ok(false);
    }
    if d == 1 {
        return Ok(true);
    }
    let b = w.view((1, 0), (d - 1, 1)).into_owned();
    let c = w.view((1, 1), (d - 1, d - 1)).into_owned();
    let csym = (&c + c.adjoint()) * cplx(0.5, 0.0);
    let eig = csym.symmetric_eigen();
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -rank_tol {
        return Ok(false);
    }
    // b counts as zero (vacuously in range) relative to the matrix scale;
    // the certification programs are trace-normalized so that scale is ~1.
    let bnorm = b.norm();
    if bnorm <= rank_tol * dhat.frobenius().max(1.0) {
        return Ok(true);
    }
    let cnorm = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    let mut residual = b.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > rank_tol * cnorm {
            let vec = eig.eigenvectors.column(j);
            let coef = vec.dotc(&residual);
            residual -= DVector::from(vec.into_owned()) * coef;
        }
    }
    Ok(residual.norm() <= rank_tol * bnorm)
}

/// Complex soft threshold: shrinks the modulus by `t`, keeping the phase.
pub fn csoft(z: Complex64, t: f64) -> Complex64 {
    let m = z.norm();
    if m <= t {
        cplx(0.0, 0.0)
    } else {
        z * cplx(1.0 - t / m, 0.0)
    }
}

/// Real soft threshold.
pub fn soft(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    pub(crate) fn rand_cvec(d: usize, rng: &mut impl Rng) -> DVector<Complex64> {
        DVector::from_fn(d, |_, _| cplx(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
    }

    pub(crate) fn rand_hermitian(d: usize, rng: &mut impl Rng) -> HermitianMatrix {
        let a = DMatrix::from_fn(d, d, |_, _| {
            cplx(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        HermitianMatrix::symmetrized(a)
    }

    #[test]
    fn lift_unit_basis_vector() {
        let x = DVector::from_vec(vec![cplx(1.0, 0.0), cplx(0.0, 0.0)]);
        let xx = lift(&x).unwrap();
        assert_eq!(xx.entry(0, 0), cplx(1.0, 0.0));
        assert_eq!(xx.entry(0, 1), cplx(0.0, 0.0));
        assert_eq!(xx.entry(1, 0), cplx(0.0, 0.0));
        assert_eq!(xx.entry(1, 1), cplx(0.0, 0.0));
    }

    #[test]
    fn lift_outer_product_with_i() {
        let x = DVector::from_vec(vec![cplx(1.0, 0.0), cplx(0.0, 1.0)]);
        let xx = lift(&x).unwrap();
        assert_eq!(xx.entry(0, 0), cplx(1.0, 0.0));
        assert_eq!(xx.entry(0, 1), cplx(0.0, -1.0));
        assert_eq!(xx.entry(1, 0), cplx(0.0, 1.0));
        assert_eq!(xx.entry(1, 1), cplx(1.0, 0.0));
    }

    #[test]
    fn lift_trace_is_squared_norm() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = rand_cvec(7, &mut rng);
            let xx = lift(&x).unwrap();
            assert!((xx.trace_re() - x.norm_squared()).abs() <= 1e-12 * x.norm_squared().max(1.0));
        }
    }

    #[test]
    fn lift_rejects_empty() {
        assert!(lift(&DVector::from_vec(vec![])).is_err());
    }

    #[test]
    fn eigbasis_identity_for_e1() {
        let x = DVector::from_vec(vec![cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)]);
        let e = build_eigbasis(&x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v = if i == j { 1.0 } else { 0.0 };
                assert!((e.columns()[(i, j)] - cplx(v, 0.0)).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn eigbasis_unitary_and_diagonalizes_lift() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for trial in 0..20 {
            let d = 2 + trial % 9;
            let x = rand_cvec(d, &mut rng);
            let e = build_eigbasis(&x).unwrap();
            assert!(e.unitary_defect() <= 1e-12, "unitarity defect {}", e.unitary_defect());
            let first = e.columns().column(0).into_owned();
            let u = &x / cplx(x.norm(), 0.0);
            // first column equals u up to one global phase
            let phase = u.dotc(&first);
            assert!((phase.norm() - 1.0).abs() <= 1e-10);
            let diff = (&first - u * phase).norm();
            assert!(diff <= 1e-10, "first column off by {diff}");

            let xx = lift(&x).unwrap();
            let w = e.to_reduced(&xx);
            let nn = x.norm_squared();
            for i in 0..d {
                for j in 0..d {
                    let want = if i == 0 && j == 0 { cplx(nn, 0.0) } else { cplx(0.0, 0.0) };
                    assert!((w[(i, j)] - want).norm() <= 1e-10 * nn.max(1.0));
                }
            }
        }
    }

    #[test]
    fn eigbasis_rejects_zero_vector() {
        let x = DVector::from_vec(vec![cplx(0.0, 0.0); 4]);
        assert!(matches!(build_eigbasis(&x), Err(Error::ZeroSignal)));
    }

    #[test]
    fn randomized_eigbasis_is_unitary_with_same_first_column() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let x = rand_cvec(9, &mut rng);
        let det = build_eigbasis(&x).unwrap();
        let rnd = build_eigbasis_randomized(&x, &mut rng).unwrap();
        assert!(rnd.unitary_defect() <= 1e-12);
        let diff = (rnd.columns().column(0) - det.columns().column(0)).norm();
        assert!(diff <= 1e-12);
    }

    #[test]
    fn support_pattern_zero_matrix() {
        let z = HermitianMatrix::zeros(4);
        let p = support_pattern(&z, SUPPORT_TOL);
        assert_eq!(p.count(), 0);
    }

    #[test]
    fn support_pattern_of_sparse_lift() {
        let x = DVector::from_vec(vec![cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(2.0, 0.0)]);
        let xx = lift(&x).unwrap();
        let p = support_pattern(&xx, SUPPORT_TOL);
        for i in 0..3 {
            for j in 0..3 {
                let want = i != 1 && j != 1;
                assert_eq!(p.contains(i, j), want, "mask at ({i},{j})");
            }
        }
    }

    #[test]
    fn support_pattern_symmetry_random() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let h = rand_hermitian(8, &mut rng);
        let p = support_pattern(&h, 0.3);
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(p.contains(i, j), p.contains(j, i));
            }
        }
    }

    #[test]
    fn sign_matrix_values() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = cplx(3.0, 4.0);
        m[(1, 0)] = cplx(3.0, -4.0);
        let h = HermitianMatrix::new(m).unwrap();
        let s = sign_matrix(&h);
        assert!((s.entry(0, 1) - cplx(0.6, 0.8)).norm() <= 1e-15);
        assert_eq!(s.entry(0, 0), cplx(0.0, 0.0));
    }

    #[test]
    fn sign_matrix_of_lift_is_hermitian_unit_modulus() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let x = rand_cvec(6, &mut rng);
        let xx = lift(&x).unwrap();
        let s = sign_matrix(&xx);
        let p = support_pattern(&xx, SUPPORT_TOL);
        for i in 0..6 {
            for j in 0..6 {
                let v = s.entry(i, j);
                if p.contains(i, j) {
                    assert!((v.norm() - 1.0).abs() <= 1e-12);
                } else {
                    assert_eq!(v, cplx(0.0, 0.0));
                }
                assert!((v - s.entry(j, i).conj()).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn g_objective_on_lift_is_l1() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for _ in 0..10 {
            let x = rand_cvec(5, &mut rng);
            let xx = lift(&x).unwrap();
            let p = support_pattern(&xx, SUPPORT_TOL);
            let s = sign_matrix(&xx);
            let g = g_objective(&xx, &p, &s).unwrap();
            assert!((g - xx.entry_l1()).abs() <= 1e-10 * xx.entry_l1().max(1.0));
            let neg = HermitianMatrix::from_unchecked(-xx.mat.clone());
            let gneg = g_objective(&neg, &p, &s).unwrap();
            assert!((gneg + xx.entry_l1()).abs() <= 1e-10 * xx.entry_l1().max(1.0));
        }
    }

    #[test]
    fn g_objective_off_support_is_l1() {
        // X supported on {0,1}x{0,1}; Z supported entirely off Ω.
        let x = DVector::from_vec(vec![cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)]);
        let xx = lift(&x).unwrap();
        let p = support_pattern(&xx, SUPPORT_TOL);
        let s = sign_matrix(&xx);
        let mut zm = DMatrix::zeros(3, 3);
        zm[(2, 2)] = cplx(-2.0, 0.0);
        zm[(0, 2)] = cplx(0.0, 1.5);
        zm[(2, 0)] = cplx(0.0, -1.5);
        let z = HermitianMatrix::new(zm).unwrap();
        let g = g_objective(&z, &p, &s).unwrap();
        assert!((g - z.entry_l1()).abs() <= 1e-12);
    }

    #[test]
    fn g_objective_positively_homogeneous() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let x = rand_cvec(6, &mut rng);
        let xx = lift(&x).unwrap();
        let p = support_pattern(&xx, SUPPORT_TOL);
        let s = sign_matrix(&xx);
        for _ in 0..25 {
            let z = rand_hermitian(6, &mut rng);
            let c: f64 = rng.gen::<f64>() * 7.0 + 0.1;
            let zc = HermitianMatrix::from_unchecked(&z.mat * cplx(c, 0.0));
            let g1 = g_objective(&z, &p, &s).unwrap();
            let gc = g_objective(&zc, &p, &s).unwrap();
            assert!((gc - c * g1).abs() <= 1e-10 * (c * g1.abs()).max(1.0));
        }
    }

    #[test]
    fn f_lambda_examples() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let x = rand_cvec(4, &mut rng);
        let xx = lift(&x).unwrap();
        let v = f_lambda(&xx, 0.0).unwrap();
        assert!((v - x.norm_squared()).abs() <= 1e-12 * x.norm_squared());
        let id = HermitianMatrix::identity(3);
        assert!((f_lambda(&id, 1.0).unwrap() - 6.0).abs() <= 1e-14);
        let z = HermitianMatrix::zeros(3);
        assert_eq!(f_lambda(&z, 2.0).unwrap(), 0.0);
        assert!(f_lambda(&id, -1.0).is_err());
    }

    fn small_instance(
        rng: &mut impl Rng,
        n: usize,
        l: usize,
        m: usize,
    ) -> (SignalSet, MeasurementEnsemble) {
        let signals: Vec<_> = (0..l).map(|_| rand_cvec(n, rng)).collect();
        let set = SignalSet::new(signals, n).unwrap();
        let vectors: Vec<_> = (0..m).map(|_| rand_cvec(n, rng)).collect();
        let phases: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect();
        let ens = MeasurementEnsemble::new(vectors, Some(phases)).unwrap();
        (set, ens)
    }

    #[test]
    fn simulate_reduces_to_calibrated_when_phases_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let (set, ens) = small_instance(&mut rng, 5, 2, 4);
        let zero_phase =
            MeasurementEnsemble::new(ens.vectors().to_vec(), Some(vec![0.0; 4])).unwrap();
        let none_phase = MeasurementEnsemble::new(ens.vectors().to_vec(), None).unwrap();
        let y0 = simulate_measurements(&set, &zero_phase).unwrap();
        let yn = simulate_measurements(&set, &none_phase).unwrap();
        assert!((y0.values() - yn.values()).norm() <= 1e-15);
        for i in 0..4 {
            for ell in 0..2 {
                let want = zero_phase.vectors()[i].dotc(&set.signals()[ell]);
                assert!((y0.values()[(i, ell)] - want).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn measurement_magnitudes_invariant_to_phases() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let (set, ens) = small_instance(&mut rng, 5, 2, 6);
        let no_phase = MeasurementEnsemble::new(ens.vectors().to_vec(), None).unwrap();
        let ya = simulate_measurements(&set, &ens).unwrap();
        let yb = simulate_measurements(&set, &no_phase).unwrap();
        for i in 0..6 {
            for ell in 0..2 {
                assert!(
                    (ya.values()[(i, ell)].norm() - yb.values()[(i, ell)].norm()).abs() <= 1e-12
                );
            }
        }
    }

    #[test]
    fn zero_signal_gives_zero_table() {
        let signals = vec![DVector::from_vec(vec![cplx(0.0, 0.0); 4])];
        // sparsity 0: all entries are structural zeros
        let set = SignalSet::new(signals, 0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let vectors: Vec<_> = (0..3).map(|_| rand_cvec(4, &mut rng)).collect();
        let ens = MeasurementEnsemble::new(vectors, None).unwrap();
        let y = simulate_measurements(&set, &ens).unwrap();
        assert_eq!(y.values().norm(), 0.0);
    }

    #[test]
    fn cross_measure_small_block() {
        let values = DMatrix::from_row_slice(1, 2, &[cplx(2.0, 0.0), cplx(1.0, 1.0)]);
        let table = MeasurementTable { values };
        let g = cross_measure(&table);
        assert_eq!(g.value(0, 0, 0), cplx(4.0, 0.0));
        assert_eq!(g.value(0, 0, 1), cplx(2.0, -2.0));
        assert_eq!(g.value(0, 1, 0), cplx(2.0, 2.0));
        assert_eq!(g.value(0, 1, 1), cplx(2.0, 0.0));
    }

    #[test]
    fn cross_measure_phase_invariance() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let (set, ens) = small_instance(&mut rng, 6, 3, 5);
        let other_phases: Vec<f64> =
            (0..5).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect();
        let ens2 = MeasurementEnsemble::new(ens.vectors().to_vec(), Some(other_phases)).unwrap();
        let ga = cross_measure(&simulate_measurements(&set, &ens).unwrap());
        let gb = cross_measure(&simulate_measurements(&set, &ens2).unwrap());
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..5 {
            worst = worst.max((ga.blocks()[i].clone() - gb.blocks()[i].clone()).norm());
            scale = scale.max(ga.blocks()[i].norm());
        }
        assert!(worst <= 1e-12 * scale.max(1.0), "phase dependence {worst}");
    }

    #[test]
    fn cross_measure_l1_gives_cprl_magnitudes() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let (set, ens) = small_instance(&mut rng, 6, 1, 5);
        let y = simulate_measurements(&set, &ens).unwrap();
        let g = cross_measure(&y);
        for i in 0..5 {
            assert!((g.value(i, 0, 0).re - y.values()[(i, 0)].norm_sqr()).abs() <= 1e-12);
            assert_eq!(g.value(i, 0, 0).im, 0.0);
        }
    }

    #[test]
    fn measure_lifted_consistency_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let (set, ens) = small_instance(&mut rng, 4, 2, 6);
        let xx = lift(set.joint()).unwrap();
        let lifted = measure_lifted(&xx, &ens, 2).unwrap();
        let phaseless = MeasurementEnsemble::new(ens.vectors().to_vec(), None).unwrap();
        let g = cross_measure(&simulate_measurements(&set, &phaseless).unwrap());
        for i in 0..6 {
            let diff = (lifted[i].clone() - g.blocks()[i].clone()).norm();
            assert!(diff <= 1e-10 * g.blocks()[i].norm().max(1.0));
        }
    }

    #[test]
    fn measure_lifted_zero_matrix() {
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        let (_, ens) = small_instance(&mut rng, 4, 1, 3);
        let z = HermitianMatrix::zeros(8);
        let out = measure_lifted(&z, &ens, 2).unwrap();
        for b in out {
            assert_eq!(b.norm(), 0.0);
        }
    }

    #[test]
    fn measure_lifted_rejects_bad_block_count() {
        let mut rng = ChaCha20Rng::seed_from_u64(16);
        let (_, ens) = small_instance(&mut rng, 4, 1, 3);
        let z = HermitianMatrix::zeros(9);
        assert!(measure_lifted(&z, &ens, 2).is_err());
    }

    #[test]
    fn measure_lifted_adjoint_identity() {
        // Independent oracle: adjoint assembled explicitly as
        // sum_{i,k,l} w_{i,k,l} * (m_i m_i' placed in block (l,k))'.
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let (_, ens) = small_instance(&mut rng, 4, 2, 5);
        let d = 8;
        let z = rand_hermitian(d, &mut rng);
        let w: Vec<DMatrix<Complex64>> = (0..5)
            .map(|_| DMatrix::from_fn(2, 2, |_, _| cplx(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)))
            .collect();
        let gz = measure_lifted(&z, &ens, 2).unwrap();
        let mut lhs = 0.0;
        for i in 0..5 {
            for k in 0..2 {
                for l in 0..2 {
                    lhs += (gz[i][(k, l)].conj() * w[i][(k, l)]).re;
                }
            }
        }
        let mut adj = DMatrix::<Complex64>::zeros(d, d);
        for i in 0..5 {
            let mi = &ens.vectors()[i];
            let outer = mi * mi.adjoint();
            for k in 0..2 {
                for l in 0..2 {
                    // (outer placed at block (l,k)) adjointed lands at (k,l)
                    for a in 0..4 {
                        for b in 0..4 {
                            adj[(k * 4 + a, l * 4 + b)] +=
                                w[i][(k, l)] * outer[(b, a)].conj();
                        }
                    }
                }
            }
        }
        let mut rhs = 0.0;
        for a in 0..d {
            for b in 0..d {
                rhs += (z.mat[(a, b)].conj() * adj[(a, b)]).re;
            }
        }
        let scale = z.frobenius() * adj.norm();
        assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1.0), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn sd_membership_cases() {
        let mut rng = ChaCha20Rng::seed_from_u64(18);
        let x = rand_cvec(5, &mut rng);
        let e = build_eigbasis(&x).unwrap();
        let tol = 1e-9;

        // b = 0, C PSD: member
        let mut w = DMatrix::zeros(5, 5);
        w[(0, 0)] = cplx(-0.7, 0.0);
        for j in 1..5 {
            w[(j, j)] = cplx(j as f64, 0.0);
        }
        let dhat = e.from_reduced(&w);
        assert!(sd_membership(&dhat, &e, tol).unwrap());

        // C = 0, b != 0: range(0) = {0}, not a member
        let mut w2 = DMatrix::zeros(5, 5);
        w2[(0, 0)] = cplx(1.0, 0.0);
        w2[(1, 0)] = cplx(0.5, 0.2);
        w2[(0, 1)] = cplx(0.5, -0.2);
        let dhat2 = e.from_reduced(&w2);
        assert!(!sd_membership(&dhat2, &e, tol).unwrap());

        // diagonal with nonnegative trailing block: member
        let mut w3 = DMatrix::zeros(5, 5);
        w3[(0, 0)] = cplx(2.5, 0.0);
        for j in 1..5 {
            w3[(j, j)] = cplx(0.3 * j as f64, 0.0);
        }
        let dhat3 = e.from_reduced(&w3);
        assert!(sd_membership(&dhat3, &e, tol).unwrap());

        // b in range(C): member even with C singular
        let mut w4 = DMatrix::zeros(5, 5);
        w4[(0, 0)] = cplx(0.4, 0.0);
        w4[(1, 1)] = cplx(1.0, 0.0);
        w4[(2, 2)] = cplx(2.0, 0.0);
        // C has kernel in coordinates 3,4; put b inside span{e1,e2}
        w4[(1, 0)] = cplx(0.3, -0.1);
        w4[(0, 1)] = cplx(0.3, 0.1);
        let dhat4 = e.from_reduced(&w4);
        assert!(sd_membership(&dhat4, &e, tol).unwrap());

        // same C but b leaking into the kernel: not a member
        let mut w5 = w4.clone();
        w5[(4, 0)] = cplx(0.2, 0.0);
        w5[(0, 4)] = cplx(0.2, 0.0);
        let dhat5 = e.from_reduced(&w5);
        assert!(!sd_membership(&dhat5, &e, tol).unwrap());
    }

    #[test]
    fn lemma1_cone_sampling() {
        // Sampled characterization of the feasible-perturbation cone:
        // Delta = E [a b'; b C] E' with C PSD and b = C v stays PSD-shiftable
        // along X for some small c, while b orthogonal to range(C) never is.
        let mut rng = ChaCha20Rng::seed_from_u64(19);
        let d = 6;
        let grid: Vec<f64> = (0..=40).map(|k| 0.5f64.powi(k)).collect();
        for draw in 0..100 {
            let x = rand_cvec(d, &mut rng);
            let e = build_eigbasis(&x).unwrap();
            let xx = lift(&x).unwrap();

            // in-cone draw: C PSD of deficient rank, b = C v
            let r = 2 + draw % 2;
            let f = DMatrix::from_fn(d - 1, r, |_, _| {
                cplx(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let c = &f * f.adjoint();
            let v = rand_cvec(d - 1, &mut rng);
            let b = &c * &v;
            let a = 2.0 * (rng.gen::<f64>() - 0.5);
            let mut w = DMatrix::zeros(d, d);
            w[(0, 0)] = cplx(a, 0.0);
            for i in 0..d - 1 {
                w[(i + 1, 0)] = b[i];
                w[(0, i + 1)] = b[i].conj();
                for j in 0..d - 1 {
                    w[(i + 1, j + 1)] = c[(i, j)];
                }
            }
            let delta = e.from_reduced(&w);
            let mut ok = false;
            for &cstep in &grid {
                let m = &xx.mat + &delta.mat * cplx(cstep, 0.0);
                let eig = HermitianMatrix::symmetrized(m).mat.symmetric_eigen();
                let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
                if min >= -1e-9 {
                    ok = true;
                    break;
                }
            }
            assert!(ok, "draw {draw}: no feasible step found for in-cone direction");

            // out-of-cone draw: b orthogonal to range(C), scaled up so the
            // violation stays measurable across the whole grid
            let eigc = c.clone().symmetric_eigen();
            let raw = rand_cvec(d - 1, &mut rng);
            let mut bperp = raw.clone();
            for (j, &lam) in eigc.eigenvalues.iter().enumerate() {
                if lam > 1e-10 {
                    let col = eigc.eigenvectors.column(j);
                    let coef = col.dotc(&bperp);
                    bperp -= DVector::from(col.into_owned()) * coef;
                }
            }
            assert!(bperp.norm() > 1e-6, "degenerate orthogonal draw");
            bperp *= cplx((1 << 24) as f64 / bperp.norm(), 0.0);
            let mut w2 = w.clone();
            for i in 0..d - 1 {
                w2[(i + 1, 0)] = bperp[i];
                w2[(0, i + 1)] = bperp[i].conj();
            }
            let delta2 = e.from_reduced(&w2);
            for &cstep in &grid {
                let m = &xx.mat + &delta2.mat * cplx(cstep, 0.0);
                let eig = HermitianMatrix::symmetrized(m).mat.symmetric_eigen();
                let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
                assert!(min < 0.0, "draw {draw}: c = {cstep} should violate PSD, min {min}");
            }
        }
    }

    #[test]
    fn signal_set_validates_sparsity() {
        let good = vec![DVector::from_vec(vec![cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(2.0, 0.0)])];
        assert!(SignalSet::new(good.clone(), 2).is_ok());
        assert!(SignalSet::new(good, 1).is_err());
    }

    #[test]
    fn ensemble_rejects_zero_vector() {
        let vs = vec![DVector::from_vec(vec![cplx(0.0, 0.0); 3])];
        assert!(MeasurementEnsemble::new(vs, None).is_err());
    }

    #[test]
    fn hermitian_validation() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = cplx(1.0, 0.0);
        m[(1, 0)] = cplx(0.5, 0.0);
        assert!(HermitianMatrix::new(m.clone()).is_err());
        let s = HermitianMatrix::symmetrized(m);
        assert!(s.hermitian_defect() <= 1e-15);
    }

    #[test]
    fn csoft_behavior() {
        assert_eq!(csoft(cplx(3.0, 0.0), 1.0), cplx(2.0, 0.0));
        assert_eq!(csoft(cplx(0.5, 0.0), 1.0), cplx(0.0, 0.0));
        let z = cplx(3.0, 4.0);
        let out = csoft(z, 2.5);
        assert!((out.norm() - 2.5).abs() <= 1e-12);
        assert!((out / z).im.abs() <= 1e-12);
    }
}
