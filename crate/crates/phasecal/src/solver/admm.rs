//! Three-block consensus ADMM. Copies of the variable are maintained for the
//! objective prox, the affine projection, and the cone projection; each
//! iteration applies the three maps to `(consensus − dual)`, averages, and
//! updates the duals. The returned matrix is the cone-block iterate, which
//! satisfies the cone constraint exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifting::HermitianMatrix;
use crate::solver::affine::AffineConstraintSet;
use crate::solver::cone::ConeSet;
use crate::solver::prox::ProxSpec;

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Iterations between feasibility/objective checks and history samples.
const CHECK_EVERY: usize = 16;

/// Iterations between penalty-adaptation steps.
const ADAPT_EVERY: usize = 50;

/// Residual balancing: rescale ρ by √(r/s) when the ratio drifts past the
/// trigger, clamped per step and in total range.
const BALANCE_TRIGGER: f64 = 3.0;
const BALANCE_MAX_STEP: f64 = 4.0;

/// Objective divergence factor for the unboundedness heuristic.
const UNBOUNDED_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    /// Initial ADMM penalty ρ.
    pub step: f64,
    /// Relative primal residual tolerance.
    pub tol_primal: f64,
    /// Relative dual residual tolerance.
    pub tol_dual: f64,
    pub max_iters: usize,
    /// Objective level that triggers the early-negative exit (< 0).
    pub early_negative_threshold: f64,
    /// Maximum constraint violation allowed for the early exit.
    pub feas_tol_for_early_exit: f64,
    /// Window length for the infeasibility stall heuristic.
    pub infeasibility_stall_window: usize,
    /// Whether the early-negative exit is armed (disabled for solves whose
    /// negative objective value is itself the quantity of interest).
    pub enable_early_negative: bool,
    /// Whether the infeasibility stall heuristic is armed (disabled for
    /// problems known to be feasible, e.g. homogeneous ones containing 0).
    pub enable_infeasibility_detection: bool,
    /// Residual-balancing adaptation of ρ.
    pub adapt_step: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            step: 1.0,
            tol_primal: 1e-7,
            tol_dual: 1e-7,
            max_iters: 50_000,
            early_negative_threshold: -1e-4,
            feas_tol_for_early_exit: 1e-6,
            infeasibility_stall_window: 5000,
            enable_early_negative: true,
            enable_infeasibility_detection: true,
            adapt_step: true,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0)
            || !(self.tol_primal > 0.0)
            || !(self.tol_dual > 0.0)
            || !(self.feas_tol_for_early_exit > 0.0)
        {
            return Err(Error::InvalidParameter(
                "solver step and tolerances must be positive".into(),
            ));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.early_negative_threshold < 0.0) {
            return Err(Error::InvalidParameter(
                "early_negative_threshold must be negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    EarlyNegative,
    Infeasible,
    Unbounded,
    IterCap,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::EarlyNegative => "early-negative",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::IterCap => "iter-cap",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iters: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: f64,
    /// Final ADMM penalty after residual balancing.
    pub final_step: f64,
    /// Objective values sampled every few iterations.
    pub objective_history: Vec<f64>,
    /// Relative primal residuals sampled on the same grid.
    pub residual_history: Vec<f64>,
}

struct Blocks {
    z: [DMatrix<Complex64>; 3],
    y: [DMatrix<Complex64>; 3],
    u: DMatrix<Complex64>,
}

/// Solves `min h(Z) s.t. A(Z) = b, Z ∈ cone` by consensus splitting.
///
/// Termination: residual convergence, early-negative (a feasible point with
/// objective below the configured threshold — sufficient for the
/// certification no-recovery branches), infeasibility (declared immediately
/// when the affine system itself is inconsistent, or by a stall heuristic
/// with diverging duals), unboundedness, or the iteration cap.
pub fn admm_solve(
    objective: &ProxSpec,
    affine: &AffineConstraintSet,
    cone: &ConeSet,
    config: &SolveConfig,
    warm_start: Option<&HermitianMatrix>,
) -> Result<(HermitianMatrix, SolveReport)> {
    config.validate()?;
    let d = affine.dim();
    if let Some(w) = warm_start {
        if w.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "warm start is {}x{}, problem is {d}x{d}",
                w.dim(),
                w.dim()
            )));
        }
    }

    if !affine.is_consistent() {
        let report = SolveReport {
            status: SolveStatus::Infeasible,
            iters: 0,
            primal_residual: f64::INFINITY,
            dual_residual: f64::INFINITY,
            objective: f64::NAN,
            final_step: config.step,
            objective_history: Vec::new(),
            residual_history: Vec::new(),
        };
        return Ok((HermitianMatrix::zeros(d), report));
    }

    let u0 = warm_start.map_or_else(|| DMatrix::zeros(d, d), |w| w.mat.clone());
    let mut st = Blocks {
        z: [u0.clone(), u0.clone(), u0.clone()],
        y: [DMatrix::zeros(d, d), DMatrix::zeros(d, d), DMatrix::zeros(d, d)],
        u: u0,
    };
    let mut rho = config.step;

    let mut objective_history = Vec::new();
    let mut residual_history = Vec::new();
    let mut obj0: Option<f64> = None;

    // (iter, relative affine violation of the cone iterate, unscaled dual norm)
    let mut stall_window: Vec<(usize, f64, f64)> = Vec::new();

    let mut rel_primal = f64::INFINITY;
    let mut rel_dual = f64::INFINITY;
    let mut status = SolveStatus::IterCap;
    let mut iters = config.max_iters;

    for iter in 1..=config.max_iters {
        let t = 1.0 / rho;

        let in1 = HermitianMatrix::from_unchecked(&st.u - &st.y[0]);
        st.z[0] = objective.prox(&in1, t)?.into_matrix();
        let in2 = HermitianMatrix::from_unchecked(&st.u - &st.y[1]);
        st.z[1] = affine.project(&in2).into_matrix();
        let in3 = HermitianMatrix::from_unchecked(&st.u - &st.y[2]);
        st.z[2] = cone.project(&in3)?.into_matrix();

        let mut u_new = DMatrix::zeros(d, d);
        for i in 0..3 {
            u_new += &st.z[i] + &st.y[i];
        }
        u_new *= cplx(1.0 / 3.0, 0.0);

        let mut primal_sq = 0.0;
        for i in 0..3 {
            let diff = &st.z[i] - &u_new;
            primal_sq += diff.norm_squared();
            st.y[i] += diff;
        }
        let primal = primal_sq.sqrt();
        let dual = rho * 3f64.sqrt() * (&u_new - &st.u).norm();
        st.u = u_new;

        if !st.u.norm().is_finite() {
            return Err(Error::SolverAbort(format!("non-finite iterate at iteration {iter}")));
        }

        let znorm: f64 = st.z.iter().map(|z| z.norm_squared()).sum::<f64>().sqrt();
        let ynorm: f64 = st.y.iter().map(|y| y.norm_squared()).sum::<f64>().sqrt();
        rel_primal = primal / znorm.max(1.0);
        rel_dual = dual / (rho * ynorm).max(1.0);

        let converged = rel_primal <= config.tol_primal && rel_dual <= config.tol_dual;

        if iter % CHECK_EVERY == 0 || converged || iter == config.max_iters {
            let zc = HermitianMatrix::from_unchecked(st.z[2].clone());
            let obj = objective.objective(&zc);
            let feas = affine.residual(&zc);
            objective_history.push(obj);
            residual_history.push(rel_primal);
            if obj0.is_none() {
                obj0 = Some(obj);
            }

            if config.enable_early_negative
                && obj <= config.early_negative_threshold
                && feas <= config.feas_tol_for_early_exit
            {
                status = SolveStatus::EarlyNegative;
                iters = iter;
                let report = SolveReport {
                    status,
                    iters,
                    primal_residual: rel_primal,
                    dual_residual: rel_dual,
                    objective: obj,
                    final_step: rho,
                    objective_history,
                    residual_history,
                };
                return Ok((zc, report));
            }

            if obj < -UNBOUNDED_FACTOR * (1.0 + obj0.unwrap_or(0.0).abs())
                && feas <= 10.0 * config.feas_tol_for_early_exit
            {
                status = SolveStatus::Unbounded;
                iters = iter;
                let report = SolveReport {
                    status,
                    iters,
                    primal_residual: rel_primal,
                    dual_residual: rel_dual,
                    objective: obj,
                    final_step: rho,
                    objective_history,
                    residual_history,
                };
                return Ok((zc, report));
            }

            // Stall heuristic: fire only when the best constraint mismatch
            // seen makes no relative progress across a full window while the
            // duals grow decisively (the linear dual growth of an infeasible
            // splitting run), never on problems merely converging slowly.
            if config.enable_infeasibility_detection {
                stall_window.push((iter, feas.max(rel_primal), rho * ynorm));
                let horizon = iter.saturating_sub(config.infeasibility_stall_window);
                while stall_window.len() > 1 && stall_window[0].0 < horizon {
                    stall_window.remove(0);
                }
                if stall_window.last().unwrap().0 - stall_window[0].0
                    >= config.infeasibility_stall_window - CHECK_EVERY
                {
                    let first_feas = stall_window[0].1;
                    let min_feas =
                        stall_window.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
                    let first_dual = stall_window[0].2;
                    let last_dual = stall_window.last().unwrap().2;
                    let no_progress = min_feas > 0.9 * first_feas;
                    let duals_diverge =
                        last_dual > 2.0 * first_dual.max(1e-12) || last_dual > 1e10;
                    if no_progress
                        && duals_diverge
                        && min_feas > (100.0 * config.feas_tol_for_early_exit).max(1e-4)
                    {
                        status = SolveStatus::Infeasible;
                        iters = iter;
                        let report = SolveReport {
                            status,
                            iters,
                            primal_residual: rel_primal,
                            dual_residual: rel_dual,
                            objective: obj,
                            final_step: rho,
                            objective_history,
                            residual_history,
                        };
                        return Ok((zc, report));
                    }
                }
            }

            if converged {
                status = SolveStatus::Converged;
                iters = iter;
                let report = SolveReport {
                    status,
                    iters,
                    primal_residual: rel_primal,
                    dual_residual: rel_dual,
                    objective: obj,
                    final_step: rho,
                    objective_history,
                    residual_history,
                };
                return Ok((zc, report));
            }
        }

        if config.adapt_step && iter % ADAPT_EVERY == 0 && rel_dual > 0.0 {
            // Scaled duals must be rescaled whenever rho changes. The range
            // is clamped: runaway escalation freezes the iteration instead
            // of helping it.
            let factor = (rel_primal / rel_dual)
                .sqrt()
                .clamp(1.0 / BALANCE_MAX_STEP, BALANCE_MAX_STEP);
            if (factor > BALANCE_TRIGGER || factor < 1.0 / BALANCE_TRIGGER)
                && (rho * factor) >= 1e-3 * config.step
                && (rho * factor) <= 1e3 * config.step
            {
                rho *= factor;
                for y in &mut st.y {
                    *y *= cplx(1.0 / factor, 0.0);
                }
            }
        }
    }

    let zc = HermitianMatrix::from_unchecked(st.z[2].clone());
    let report = SolveReport {
        status,
        iters,
        primal_residual: rel_primal,
        dual_residual: rel_dual,
        objective: objective.objective(&zc),
        final_step: rho,
        objective_history,
        residual_history,
    };
    Ok((zc, report))
}
