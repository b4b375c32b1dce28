//! Projectable cone/structure sets: the PSD cone and the rotated structure
//! set `{E [a b'; b C] E' : a real, b free, C ⪰ 0}`, optionally intersected
//! with a centered Frobenius ball (both sets are cones, so the ball
//! projection composes exactly).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lifting::{EigBasis, HermitianMatrix};
use crate::solver::prox::prox_psd;

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Projection onto the structure set: rotate by `E`, force the (1,1) entry
/// real, clamp the trailing block onto the PSD cone, leave the `b` row and
/// column untouched, rotate back.
pub fn prox_structure(z: &HermitianMatrix, e: &EigBasis) -> Result<HermitianMatrix> {
    project_structure_impl(z, e, false, None)
}

fn project_structure_impl(
    z: &HermitianMatrix,
    e: &EigBasis,
    restrict_range: bool,
    range_tol: Option<f64>,
) -> Result<HermitianMatrix> {
    let d = z.dim();
    if e.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "structure projection: Z is {d}, basis is {}",
            e.dim()
        )));
    }
    if !z.is_finite() {
        return Err(Error::NonFinite("structure projection input"));
    }
    let sym = HermitianMatrix::symmetrized(z.mat.clone());
    let mut w = e.to_reduced(&sym);
    w[(0, 0)] = cplx(w[(0, 0)].re, 0.0);
    if d > 1 {
        let c = w.view((1, 1), (d - 1, d - 1)).into_owned();
        let csym = (&c + c.adjoint()) * cplx(0.5, 0.0);
        let eig = csym.symmetric_eigen();
        let mut scaled = eig.eigenvectors.clone();
        for j in 0..d - 1 {
            let lam = eig.eigenvalues[j].max(0.0);
            let coef = cplx(lam, 0.0);
            for i in 0..d - 1 {
                scaled[(i, j)] *= coef;
            }
        }
        let cplus = scaled * eig.eigenvectors.adjoint();
        for j in 0..d - 1 {
            for i in 0..d - 1 {
                w[(i + 1, j + 1)] = cplus[(i, j)];
            }
        }
        if restrict_range {
            // Heuristic tightening toward b in range(C): drop the component
            // of b orthogonal to the significant eigenvectors of the clamped
            // block. The restricted set is nonconvex; this is a projection
            // surrogate, used only for bound-direction diagnostics.
            let tol = range_tol.unwrap_or(1e-8);
            let max_eig = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
            let cut = tol * max_eig.max(1e-300);
            let b = w.view((1, 0), (d - 1, 1)).into_owned();
            let mut kept = nalgebra::DVector::<Complex64>::zeros(d - 1);
            for j in 0..d - 1 {
                if eig.eigenvalues[j] > cut {
                    let col = eig.eigenvectors.column(j);
                    let coef = col.dotc(&b);
                    kept += nalgebra::DVector::from(col.into_owned()) * coef;
                }
            }
            for i in 0..d - 1 {
                w[(i + 1, 0)] = kept[i];
                w[(0, i + 1)] = kept[i].conj();
            }
        }
    }
    Ok(e.from_reduced(&w))
}

/// The projectable set intersected with the affine set inside the solver.
#[derive(Debug, Clone)]
pub enum ConeSet {
    /// `Z ⪰ 0`.
    Psd,
    /// `Z = E [a b'; b C] E'` with `a` real, `b` free, `C ⪰ 0`; optionally
    /// intersected with `‖Z‖_F ≤ ball_radius`, and optionally with the
    /// heuristic `b ∈ range(C)` restriction.
    Structure { basis: EigBasis, ball_radius: Option<f64>, restrict_range: bool },
}

impl ConeSet {
    pub fn psd() -> Self {
        ConeSet::Psd
    }

    pub fn structure(basis: EigBasis) -> Self {
        ConeSet::Structure { basis, ball_radius: None, restrict_range: false }
    }

    pub fn structure_in_ball(basis: EigBasis, radius: f64) -> Self {
        ConeSet::Structure { basis, ball_radius: Some(radius), restrict_range: false }
    }

    pub fn project(&self, z: &HermitianMatrix) -> Result<HermitianMatrix> {
        match self {
            ConeSet::Psd => prox_psd(z),
            ConeSet::Structure { basis, ball_radius, restrict_range } => {
                let mut p = project_structure_impl(z, basis, *restrict_range, None)?;
                if let Some(r) = ball_radius {
                    let nrm = p.frobenius();
                    if nrm > *r {
                        p = HermitianMatrix::from_unchecked(&p.mat * cplx(r / nrm, 0.0));
                    }
                }
                Ok(p)
            }
        }
    }
}
