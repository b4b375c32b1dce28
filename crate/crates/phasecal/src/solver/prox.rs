//! Proximal maps: the PSD cone projection and the entrywise proximal
//! operators of the two objectives (`trace + λ·ℓ1` and the certification
//! objective `G`). All of them preserve Hermitian symmetry.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lifting::{csoft, f_lambda, g_objective, soft, HermitianMatrix, SignMatrix, SupportPattern};

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius-nearest PSD matrix: eigendecompose, clamp negative eigenvalues
/// to zero, reassemble. The input is Hermitian-symmetrized first.
pub fn prox_psd(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    if !h.is_finite() {
        return Err(Error::NonFinite("psd projection input"));
    }
    let sym = (&h.mat + h.mat.adjoint()) * cplx(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let d = h.dim();
    let mut scaled = eig.eigenvectors.clone();
    for j in 0..d {
        let lam = eig.eigenvalues[j].max(0.0);
        if lam == 0.0 {
            scaled.column_mut(j).fill(cplx(0.0, 0.0));
        } else {
            let c = cplx(lam, 0.0);
            for i in 0..d {
                scaled[(i, j)] *= c;
            }
        }
    }
    let out = scaled * eig.eigenvectors.adjoint();
    Ok(HermitianMatrix::symmetrized(out))
}

/// Entrywise prox of `t·(Tr(Z) + λ‖Z‖₁)`: off-diagonal entries are
/// complex-soft-thresholded by `tλ`; diagonal entries take the closed form
/// `soft(Re z − t, tλ)`.
pub fn prox_l1_trace(z: &HermitianMatrix, t: f64, lambda: f64) -> Result<HermitianMatrix> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("prox step t = {t} must be > 0")));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be >= 0")));
    }
    let d = z.dim();
    let tl = t * lambda;
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        out[(i, i)] = cplx(soft(z.mat[(i, i)].re - t, tl), 0.0);
        for j in (i + 1)..d {
            let sym = (z.mat[(i, j)] + z.mat[(j, i)].conj()) * cplx(0.5, 0.0);
            let v = csoft(sym, tl);
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    Ok(HermitianMatrix::from_unchecked(out))
}

/// Prox of `t·G(·)`: on-support entries shift by the linear term
/// (`z − t·S_ij`), off-support entries are complex-soft-thresholded by `t`.
pub fn prox_g(
    z: &HermitianMatrix,
    t: f64,
    omega: &SupportPattern,
    s: &SignMatrix,
) -> Result<HermitianMatrix> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("prox step t = {t} must be > 0")));
    }
    let d = z.dim();
    if omega.dim() != d || s.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "prox_g: Z is {d}, Ω is {}, S is {}",
            omega.dim(),
            s.dim()
        )));
    }
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let sym = if i == j {
                cplx(z.mat[(i, i)].re, 0.0)
            } else {
                (z.mat[(i, j)] + z.mat[(j, i)].conj()) * cplx(0.5, 0.0)
            };
            let v = if omega.contains(i, j) { sym - s.entry(i, j) * cplx(t, 0.0) } else { csoft(sym, t) };
            out[(i, j)] = v;
            if i != j {
                out[(j, i)] = v.conj();
            }
        }
    }
    Ok(HermitianMatrix::from_unchecked(out))
}

/// A separable nonsmooth objective with a closed-form, step-scaled prox.
#[derive(Debug, Clone)]
pub enum ProxSpec {
    /// `Tr(Z) + λ‖Z‖₁` — the recovery objective.
    L1PlusTrace { lambda: f64 },
    /// `‖Z_{Ω⊥}‖₁ + Re⟨S, Z_Ω⟩` — the certification objective.
    GObjective { omega: SupportPattern, sign: SignMatrix },
    /// Constant zero (feasibility problems).
    Zero,
}

impl ProxSpec {
    pub fn prox(&self, z: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
        match self {
            ProxSpec::L1PlusTrace { lambda } => prox_l1_trace(z, t, *lambda),
            ProxSpec::GObjective { omega, sign } => prox_g(z, t, omega, sign),
            ProxSpec::Zero => Ok(HermitianMatrix::symmetrized(z.mat.clone())),
        }
    }

    pub fn objective(&self, z: &HermitianMatrix) -> f64 {
        match self {
            ProxSpec::L1PlusTrace { lambda } => f_lambda(z, *lambda).unwrap_or(f64::NAN),
            ProxSpec::GObjective { omega, sign } => g_objective(z, omega, sign).unwrap_or(f64::NAN),
            ProxSpec::Zero => 0.0,
        }
    }
}
