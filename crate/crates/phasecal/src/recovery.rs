//! Recovery-side programs: the multi-signal phase-calibration SDP, its
//! single-signal sparse phase-retrieval specialization, and the trace-only
//! variant, plus signal extraction and success metrics.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lifting::{lift, CrossMeasurements, HermitianMatrix, MeasurementEnsemble, SignalSet};
use crate::solver::{admm_solve, AffineConstraintSet, ConeSet, ProxSpec, SolveConfig, SolveReport};

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// An instance counts as recovered below this relative signal error.
pub const SUCCESS_ERROR: f64 = 1e-3;

/// Relative signal error above which an attempt counts as a clear failure.
pub const FAILURE_ERROR: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub xhat_matrix: HermitianMatrix,
    /// Extracted joint vector (leading eigenpair of the lifted estimate).
    pub xhat: DVector<Complex64>,
    /// `‖X̂ − X‖_F / ‖X‖_F` against the supplied ground truth.
    pub relative_matrix_error: Option<f64>,
    /// Phase-aligned relative signal error against the supplied ground truth.
    pub signal_error: Option<f64>,
    /// Ratio of the second to the leading eigenvalue of `X̂` (rank-gap
    /// diagnostic; 0 for exactly rank-one output).
    pub rank_gap: f64,
    pub report: SolveReport,
}

/// Solves the phase-calibration program: minimize `Tr(Z) + λ‖Z‖₁` subject to
/// `Z ⪰ 0` and the `M·L²` lifted cross-measurement equalities.
pub fn solve_phasecal(
    g: &CrossMeasurements,
    ensemble: &MeasurementEnsemble,
    l: usize,
    lambda: f64,
    config: &SolveConfig,
    truth: Option<&SignalSet>,
) -> Result<RecoveryResult> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be >= 0")));
    }
    if ensemble.m() == 0 {
        return Err(Error::EmptyInput("measurement ensemble"));
    }
    let n = ensemble.n();
    let affine = AffineConstraintSet::new(ensemble, l, n, Some(g), None)?;
    let objective = ProxSpec::L1PlusTrace { lambda };
    let (xhat_matrix, report) = admm_solve(&objective, &affine, &ConeSet::psd(), config, None)?;
    let (xhat, rank_gap) = extract_signals(&xhat_matrix, n, l)?;

    let mut result = RecoveryResult {
        xhat_matrix,
        xhat,
        relative_matrix_error: None,
        signal_error: None,
        rank_gap,
        report,
    };
    if let Some(t) = truth {
        result.score_against(t)?;
    }
    Ok(result)
}

impl RecoveryResult {
    /// Fills the error metrics from a known ground truth.
    pub fn score_against(&mut self, truth: &SignalSet) -> Result<()> {
        let x = truth.joint();
        let xx = lift(x)?;
        if xx.dim() != self.xhat_matrix.dim() {
            return Err(Error::DimensionMismatch(format!(
                "ground truth lifts to {}, estimate is {}",
                xx.dim(),
                self.xhat_matrix.dim()
            )));
        }
        let scale = xx.frobenius();
        let diff = (&self.xhat_matrix.mat - &xx.mat).norm();
        self.relative_matrix_error = Some(if scale > 0.0 { diff / scale } else { diff });
        self.signal_error = Some(recovery_error(x, &self.xhat)?);
        Ok(())
    }
}

/// Sparse phase retrieval from magnitude data: identical to the L = 1
/// phase-calibration program with `g_{i,1,1} = |y_i|²` (same code path).
pub fn solve_cprl(
    magnitudes: &[f64],
    ensemble: &MeasurementEnsemble,
    lambda: f64,
    config: &SolveConfig,
    truth: Option<&SignalSet>,
) -> Result<RecoveryResult> {
    let g = CrossMeasurements::from_magnitudes(magnitudes)?;
    solve_phasecal(&g, ensemble, 1, lambda, config, truth)
}

/// Trace-only phase retrieval: the λ = 0 specialization.
pub fn solve_phaselift(
    magnitudes: &[f64],
    ensemble: &MeasurementEnsemble,
    config: &SolveConfig,
    truth: Option<&SignalSet>,
) -> Result<RecoveryResult> {
    solve_cprl(magnitudes, ensemble, 0.0, config, truth)
}

/// Extracts the joint signal estimate from a lifted matrix: leading eigenpair
/// `(μ₁, v₁)` giving `√max(μ₁,0)·v₁`, phase-normalized so the
/// largest-modulus entry is real positive. Also returns the rank-gap
/// diagnostic `μ₂/μ₁`.
pub fn extract_signals(
    xhat: &HermitianMatrix,
    n: usize,
    l: usize,
) -> Result<(DVector<Complex64>, f64)> {
    let d = xhat.dim();
    if n * l != d {
        return Err(Error::DimensionMismatch(format!(
            "lifted dimension {d} vs N·L = {}",
            n * l
        )));
    }
    let sym = (&xhat.mat + xhat.mat.adjoint()) * cplx(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mu1 = eig.eigenvalues[order[0]];
    let mu2 = if d > 1 { eig.eigenvalues[order[1]] } else { 0.0 };
    let rank_gap = if mu1 > 0.0 { (mu2 / mu1).max(0.0) } else { 0.0 };
    if mu1 <= 0.0 {
        return Ok((DVector::from_element(d, cplx(0.0, 0.0)), 0.0));
    }
    let mut v = eig.eigenvectors.column(order[0]).into_owned() * cplx(mu1.sqrt(), 0.0);
    // Deterministic global phase: smallest index attaining the largest
    // modulus becomes real positive.
    let mut best = 0;
    let mut best_mod = 0.0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best_mod + 1e-15 {
            best_mod = z.norm();
            best = i;
        }
    }
    if best_mod > 0.0 {
        let phase = v[best] / cplx(best_mod, 0.0);
        v *= phase.conj();
    }
    Ok((v, rank_gap))
}

/// Relative recovery error modulo the inherent global phase:
/// `min_φ ‖x_true − e^{jφ} x_hat‖₂ / ‖x_true‖₂`, with the closed form
/// `e^{jφ} = sign(⟨x_hat, x_true⟩)`.
pub fn recovery_error(x_true: &DVector<Complex64>, x_hat: &DVector<Complex64>) -> Result<f64> {
    if x_true.len() != x_hat.len() {
        return Err(Error::DimensionMismatch(format!(
            "true signal has length {}, estimate {}",
            x_true.len(),
            x_hat.len()
        )));
    }
    let nrm = x_true.norm();
    if nrm == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let ip = x_hat.dotc(x_true);
    let phase = if ip.norm() > 0.0 { ip / cplx(ip.norm(), 0.0) } else { cplx(1.0, 0.0) };
    Ok((x_true - x_hat * phase).norm() / nrm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{cx, rand_cvec};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn extract_inverts_lift() {
        let mut rng = ChaCha20Rng::seed_from_u64(71);
        let x = rand_cvec(8, &mut rng);
        let xx = lift(&x).unwrap();
        let (xhat, gap) = extract_signals(&xx, 4, 2).unwrap();
        assert!(gap <= 1e-12);
        let err = recovery_error(&x, &xhat).unwrap();
        assert!(err <= 1e-10, "extraction error {err}");
    }

    #[test]
    fn extract_zero_matrix() {
        let z = HermitianMatrix::zeros(6);
        let (xhat, gap) = extract_signals(&z, 6, 1).unwrap();
        assert_eq!(xhat.norm(), 0.0);
        assert_eq!(gap, 0.0);
    }

    #[test]
    fn extract_perturbed_lift() {
        let mut rng = ChaCha20Rng::seed_from_u64(72);
        let x = rand_cvec(6, &mut rng);
        let xx = lift(&x).unwrap();
        let noisy = HermitianMatrix::from_unchecked(
            &xx.mat + DMatrix::identity(6, 6) * cx(1e-8, 0.0),
        );
        let (xhat, _) = extract_signals(&noisy, 6, 1).unwrap();
        let err = recovery_error(&x, &xhat).unwrap();
        assert!(err < 1e-3, "perturbed extraction error {err}");
    }

    #[test]
    fn recovery_error_phase_invariance() {
        let mut rng = ChaCha20Rng::seed_from_u64(73);
        let x = rand_cvec(7, &mut rng);
        let rotated = &x * Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        assert!(recovery_error(&x, &rotated).unwrap() <= 1e-12);
    }

    #[test]
    fn recovery_error_zero_estimate_is_one() {
        let mut rng = ChaCha20Rng::seed_from_u64(74);
        let x = rand_cvec(5, &mut rng);
        let zero = DVector::from_element(5, cx(0.0, 0.0));
        assert!((recovery_error(&x, &zero).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn recovery_error_orthogonal_equal_norm_is_sqrt2() {
        let x = DVector::from_vec(vec![cx(1.0, 0.0), cx(0.0, 0.0)]);
        let y = DVector::from_vec(vec![cx(0.0, 0.0), cx(0.0, 1.0)]);
        let err = recovery_error(&x, &y).unwrap();
        assert!((err - 2f64.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn recovery_error_rejects_zero_truth() {
        let zero = DVector::from_element(3, cx(0.0, 0.0));
        let y = DVector::from_element(3, cx(1.0, 0.0));
        assert!(recovery_error(&zero, &y).is_err());
    }

    #[test]
    fn zero_cross_measurements_give_zero_estimate() {
        let mut rng = ChaCha20Rng::seed_from_u64(75);
        let vectors: Vec<_> = (0..6).map(|_| rand_cvec(4, &mut rng)).collect();
        let ens = MeasurementEnsemble::new(vectors, None).unwrap();
        let g = CrossMeasurements::zeros(6, 1);
        let cfg = SolveConfig { max_iters: 4000, ..Default::default() };
        let r = solve_phasecal(&g, &ens, 1, 0.5, &cfg, None).unwrap();
        assert!(r.xhat_matrix.frobenius() <= 1e-6, "norm {}", r.xhat_matrix.frobenius());
        assert!(r.xhat.norm() <= 1e-3);
    }

    #[test]
    fn cprl_rejects_negative_magnitudes() {
        let mut rng = ChaCha20Rng::seed_from_u64(76);
        let vectors: Vec<_> = (0..3).map(|_| rand_cvec(4, &mut rng)).collect();
        let ens = MeasurementEnsemble::new(vectors, None).unwrap();
        let cfg = SolveConfig::default();
        assert!(solve_cprl(&[1.0, -0.5, 2.0], &ens, 0.1, &cfg, None).is_err());
    }

    #[test]
    fn phaselift_matches_cprl_at_lambda_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let vectors: Vec<_> = (0..8).map(|_| rand_cvec(3, &mut rng)).collect();
        let ens = MeasurementEnsemble::new(vectors, None).unwrap();
        let mags: Vec<f64> = (0..8).map(|_| rng.gen::<f64>()).collect();
        let cfg = SolveConfig { max_iters: 1500, ..Default::default() };
        let a = solve_phaselift(&mags, &ens, &cfg, None).unwrap();
        let b = solve_cprl(&mags, &ens, 0.0, &cfg, None).unwrap();
        assert_eq!(a.xhat_matrix.mat, b.xhat_matrix.mat);
        assert_eq!(a.report.iters, b.report.iters);
    }
}
