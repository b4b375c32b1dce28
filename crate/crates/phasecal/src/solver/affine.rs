//! Affine constraint set: the real-valued rows `Re/Im(m_i' Z_{k,ℓ} m_i)` for
//! `k ≤ ℓ` (only the real row when `k = ℓ`, the imaginary part being
//! identically zero on Hermitian matrices), plus an optional trace row.
//! Projection uses the pseudo-inverse of the Gram matrix `A A*` with a rank
//! tolerance, so inconsistent systems project onto the least-squares affine
//! manifold and are flagged.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lifting::{CrossMeasurements, HermitianMatrix, MeasurementEnsemble};

/// Relative rank tolerance for the Gram pseudo-inverse.
const GRAM_RANK_TOL: f64 = 1e-10;

/// Relative residual below which the least-squares solution is declared
/// consistent with the right-hand side.
const CONSISTENCY_TOL: f64 = 1e-9;

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone)]
pub struct AffineConstraintSet {
    vectors: Vec<DVector<Complex64>>,
    outers: Vec<DMatrix<Complex64>>,
    l: usize,
    n: usize,
    dim: usize,
    trace_target: Option<f64>,
    rhs: DVector<f64>,
    gram_vecs: DMatrix<f64>,
    gram_inv_eigs: DVector<f64>,
    consistent: bool,
    ls_residual: f64,
}

impl AffineConstraintSet {
    /// Builds the constraint set for an L-block lifted variable of dimension
    /// `L·n`, where `n` is the per-block dimension (needed explicitly because
    /// an empty ensemble carries none). `target` supplies the measurement
    /// right-hand sides (zeros when absent, as in the certification
    /// programs); `trace_target` appends the row `Tr(Z) = p`.
    pub fn new(
        ensemble: &MeasurementEnsemble,
        l: usize,
        n: usize,
        target: Option<&CrossMeasurements>,
        trace_target: Option<f64>,
    ) -> Result<Self> {
        if l == 0 || n == 0 {
            return Err(Error::InvalidParameter("L and N must be >= 1".into()));
        }
        let m = ensemble.m();
        if m > 0 && ensemble.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "ensemble dimension {} vs block dimension {n}",
                ensemble.n()
            )));
        }
        if let Some(g) = target {
            if g.m() != m || g.l() != l {
                return Err(Error::DimensionMismatch(format!(
                    "cross measurements are {}x{}x{}, ensemble has M = {m}, L = {l}",
                    g.m(),
                    g.l(),
                    g.l()
                )));
            }
        }
        let dim = l * n;
        let rows = m * l * l + usize::from(trace_target.is_some());
        let mut rhs = DVector::zeros(rows);
        let mut r = 0;
        for i in 0..m {
            for k in 0..l {
                for c in k..l {
                    let gv = target.map_or(cplx(0.0, 0.0), |g| g.value(i, k, c));
                    if k == c {
                        rhs[r] = gv.re;
                        r += 1;
                    } else {
                        rhs[r] = gv.re;
                        rhs[r + 1] = gv.im;
                        r += 2;
                    }
                }
            }
        }
        if let Some(p) = trace_target {
            rhs[r] = p;
        }
        let outers = ensemble.vectors().iter().map(|v| v * v.adjoint()).collect();
        let mut set = Self {
            vectors: ensemble.vectors().to_vec(),
            outers,
            l,
            n,
            dim,
            trace_target,
            rhs,
            gram_vecs: DMatrix::zeros(0, 0),
            gram_inv_eigs: DVector::zeros(0),
            consistent: true,
            ls_residual: 0.0,
        };
        set.factorize();
        Ok(set)
    }

    /// Constraint set holding only `Tr(Z) = p` on a D×D variable.
    pub fn trace_only(dim: usize, p: f64) -> Result<Self> {
        let mut set = Self {
            vectors: Vec::new(),
            outers: Vec::new(),
            l: 1,
            n: dim,
            dim,
            trace_target: Some(p),
            rhs: DVector::from_element(1, p),
            gram_vecs: DMatrix::zeros(0, 0),
            gram_inv_eigs: DVector::zeros(0),
            consistent: true,
            ls_residual: 0.0,
        };
        set.factorize();
        Ok(set)
    }

    /// An unconstrained set (projection is the identity).
    pub fn unconstrained(dim: usize) -> Self {
        Self {
            vectors: Vec::new(),
            outers: Vec::new(),
            l: 1,
            n: dim,
            dim,
            trace_target: None,
            rhs: DVector::zeros(0),
            gram_vecs: DMatrix::zeros(0, 0),
            gram_inv_eigs: DVector::zeros(0),
            consistent: true,
            ls_residual: 0.0,
        }
    }

    fn factorize(&mut self) {
        let rows = self.rows();
        if rows == 0 {
            return;
        }
        // Gram column s = A(A*(e_s)); assembled through the same operator
        // pair used at solve time so adjoint consistency is structural.
        let mut gram = DMatrix::zeros(rows, rows);
        for s in 0..rows {
            let mut e = DVector::zeros(rows);
            e[s] = 1.0;
            let col = self.apply(&self.adjoint(&e));
            gram.set_column(s, &col);
        }
        gram = (&gram + gram.transpose()) * 0.5;
        let eig = gram.symmetric_eigen();
        let max_eig = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
        let cut = GRAM_RANK_TOL * max_eig;
        let inv = eig.eigenvalues.map(|v| if v > cut { 1.0 / v } else { 0.0 });
        self.gram_vecs = eig.eigenvectors;
        self.gram_inv_eigs = inv;
        // Least-squares feasibility: the affine system is consistent iff the
        // least-norm solution reproduces the right-hand side.
        let zls = self.adjoint(&self.pinv_apply(&self.rhs));
        let resid = (self.apply(&zls) - &self.rhs).norm();
        self.ls_residual = resid;
        self.consistent = resid <= CONSISTENCY_TOL * (1.0 + self.rhs.norm());
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    /// Whether the affine system admits an exact solution.
    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Norm of `A(Z_ls) − b` for the least-squares solution.
    pub fn ls_residual(&self) -> f64 {
        self.ls_residual
    }

    /// Applies the forward operator `A(Z)`.
    pub fn apply(&self, z: &HermitianMatrix) -> DVector<f64> {
        debug_assert_eq!(z.dim(), self.dim);
        let rows = self.rows();
        let mut out = DVector::zeros(rows);
        let n = self.n;
        let mut r = 0;
        for (i, mi) in self.vectors.iter().enumerate() {
            let _ = i;
            // ycol(c) = Z[:, cN..] m_i, then value(k,c) = m_i' ycol[kN..]
            let mut vals = vec![cplx(0.0, 0.0); self.l * self.l];
            for c in 0..self.l {
                let ycol = z.mat.view((0, c * n), (self.dim, n)) * mi;
                for k in 0..self.l {
                    let mut acc = cplx(0.0, 0.0);
                    for a in 0..n {
                        acc += mi[a].conj() * ycol[k * n + a];
                    }
                    vals[k * self.l + c] = acc;
                }
            }
            for k in 0..self.l {
                for c in k..self.l {
                    let v = vals[k * self.l + c];
                    if k == c {
                        out[r] = v.re;
                        r += 1;
                    } else {
                        out[r] = v.re;
                        out[r + 1] = v.im;
                        r += 2;
                    }
                }
            }
        }
        if self.trace_target.is_some() {
            out[r] = z.trace_re();
        }
        out
    }

    /// Applies the adjoint `A*(w)`, returning a Hermitian matrix.
    pub fn adjoint(&self, w: &DVector<f64>) -> HermitianMatrix {
        debug_assert_eq!(w.len(), self.rows());
        let n = self.n;
        let mut out = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        let mut r = 0;
        for (i, outer) in self.outers.iter().enumerate() {
            let _ = i;
            for k in 0..self.l {
                for c in k..self.l {
                    if k == c {
                        let coef = cplx(w[r], 0.0);
                        r += 1;
                        if coef.norm() == 0.0 {
                            continue;
                        }
                        for b in 0..n {
                            for a in 0..n {
                                out[(k * n + a, k * n + b)] += coef * outer[(a, b)];
                            }
                        }
                    } else {
                        let coef = cplx(w[r] * 0.5, w[r + 1] * 0.5);
                        r += 2;
                        if coef.norm() == 0.0 {
                            continue;
                        }
                        for b in 0..n {
                            for a in 0..n {
                                let v = coef * outer[(a, b)];
                                out[(k * n + a, c * n + b)] += v;
                                out[(c * n + b, k * n + a)] += v.conj();
                            }
                        }
                    }
                }
            }
        }
        if self.trace_target.is_some() {
            let t = w[r];
            for d in 0..self.dim {
                out[(d, d)] += cplx(t, 0.0);
            }
        }
        HermitianMatrix::from_unchecked(out)
    }

    fn pinv_apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut coords = self.gram_vecs.transpose() * v;
        for (c, inv) in coords.iter_mut().zip(self.gram_inv_eigs.iter()) {
            *c *= inv;
        }
        &self.gram_vecs * coords
    }

    /// Exact affine projection `Z − A*((AA*)⁺ (A(Z) − b))`.
    pub fn project(&self, z: &HermitianMatrix) -> HermitianMatrix {
        if self.rows() == 0 {
            return z.clone();
        }
        let residual = self.apply(z) - &self.rhs;
        let w = self.pinv_apply(&residual);
        let corr = self.adjoint(&w);
        HermitianMatrix::from_unchecked(&z.mat - corr.mat)
    }

    /// Relative constraint violation `‖A(Z) − b‖ / (1 + ‖b‖)`.
    pub fn residual(&self, z: &HermitianMatrix) -> f64 {
        if self.rows() == 0 {
            return 0.0;
        }
        (self.apply(z) - &self.rhs).norm() / (1.0 + self.rhs.norm())
    }
}
