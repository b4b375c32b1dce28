//! Recoverability certification: solve the relaxed programs `D̂_p` for
//! `p ∈ {0, −1, 1}` and turn their optimal values into a verdict — whether
//! perfect recovery of the given ground truth is possible at all, and the
//! admissible range `(λ_low, λ_up)` of the trade-off weight.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifting::{
    build_eigbasis, g_objective, lift, sd_membership, sign_matrix, support_pattern, EigBasis,
    HermitianMatrix, MeasurementEnsemble, SignalSet, SUPPORT_TOL,
};
use crate::solver::{admm_solve, AffineConstraintSet, ConeSet, ProxSpec, SolveConfig, SolveReport, SolveStatus};

/// Dead band around zero for the optimal values `G_p`. Values within the
/// band are treated as exact zeros, so comparisons that the exact algorithm
/// makes strictly cannot be flipped by solver noise.
pub const EPSILON_G: f64 = 1e-6;

/// Norm threshold separating "the minimizer is essentially the zero matrix"
/// from "a genuinely nonzero direction was found" in the ball-normalized
/// `p = 0` solve (ball radius 1, so the scales are unambiguous).
const P0_DIRECTION_NORM: f64 = 0.1;

/// Rank tolerance used for the per-p tightness check.
pub const TIGHTNESS_RANK_TOL: f64 = 1e-4;

/// Optimal value of one relaxed solve, or the reason there is none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GValue {
    Value(f64),
    UnboundedBelow,
    Infeasible,
    NotComputed,
}

impl GValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            GValue::Value(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_display(&self) -> String {
        match self {
            GValue::Value(v) => format!("{v}"),
            GValue::UnboundedBelow => "unbounded-below".into(),
            GValue::Infeasible => "infeasible".into(),
            GValue::NotComputed => "not-computed".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "unbounded-below" => Ok(GValue::UnboundedBelow),
            "infeasible" => Ok(GValue::Infeasible),
            "not-computed" => Ok(GValue::NotComputed),
            other => other
                .parse::<f64>()
                .map(GValue::Value)
                .map_err(|_| Error::Format(format!("unparseable G value: {other}"))),
        }
    }
}

/// Output of the certification algorithm.
#[derive(Debug, Clone)]
pub struct LambdaVerdict {
    pub recovery: bool,
    pub lambda_low: f64,
    /// `f64::INFINITY` when no upper bound exists.
    pub lambda_up: f64,
    pub g0: GValue,
    pub gm1: GValue,
    pub gp1: GValue,
    /// Per-p structure-set membership of the computed minimizer (`None`
    /// when that solve produced no usable matrix).
    pub tight_p0: Option<bool>,
    pub tight_pm1: Option<bool>,
    pub tight_pp1: Option<bool>,
    /// Set when the `p = 0` minimum was ~0 but attained at a clearly
    /// nonzero direction — classified conservatively as no-recovery.
    pub degenerate_zero_direction: bool,
    pub report_p0: Option<SolveReport>,
    pub report_pm1: Option<SolveReport>,
    pub report_pp1: Option<SolveReport>,
}

impl LambdaVerdict {
    fn empty() -> Self {
        Self {
            recovery: false,
            lambda_low: 0.0,
            lambda_up: f64::INFINITY,
            g0: GValue::NotComputed,
            gm1: GValue::NotComputed,
            gp1: GValue::NotComputed,
            tight_p0: None,
            tight_pm1: None,
            tight_pp1: None,
            degenerate_zero_direction: false,
            report_p0: None,
            report_pm1: None,
            report_pp1: None,
        }
    }

    pub fn iters_total(&self) -> usize {
        [&self.report_p0, &self.report_pm1, &self.report_pp1]
            .into_iter()
            .flatten()
            .map(|r| r.iters)
            .sum()
    }

    pub fn status_str(&self, p: i32) -> String {
        let rep = match p {
            0 => &self.report_p0,
            -1 => &self.report_pm1,
            1 => &self.report_pp1,
            _ => &None,
        };
        rep.as_ref().map_or_else(|| "not-run".into(), |r| r.status.as_str().to_string())
    }
}

/// One relaxed solve: minimizer, solver report, and the (possibly sentinel)
/// optimal value.
#[derive(Debug, Clone)]
pub struct DpSolve {
    pub minimizer: HermitianMatrix,
    pub report: SolveReport,
    pub g_value: GValue,
}

/// Precomputed per-instance context shared by the three relaxed solves.
struct Certification<'a> {
    signals: &'a SignalSet,
    ensemble: &'a MeasurementEnsemble,
    basis: EigBasis,
    omega: crate::lifting::SupportPattern,
    sign: crate::lifting::SignMatrix,
}

impl<'a> Certification<'a> {
    fn new(
        signals: &'a SignalSet,
        ensemble: &'a MeasurementEnsemble,
        basis: Option<EigBasis>,
    ) -> Result<Self> {
        let x = signals.joint();
        if x.norm() == 0.0 {
            return Err(Error::ZeroSignal);
        }
        let xx = lift(x)?;
        let omega = support_pattern(&xx, SUPPORT_TOL);
        let sign = sign_matrix(&xx);
        let basis = match basis {
            Some(b) => {
                if b.dim() != x.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "basis dimension {} vs lifted dimension {}",
                        b.dim(),
                        x.len()
                    )));
                }
                b
            }
            None => build_eigbasis(x)?,
        };
        Ok(Self { signals, ensemble, basis, omega, sign })
    }

    fn solve(&self, p: i32, config: &SolveConfig, restrict_range: bool) -> Result<DpSolve> {
        let l = self.signals.l();
        let n = self.signals.n();
        let affine =
            AffineConstraintSet::new(self.ensemble, l, n, None, Some(p as f64))?;
        let cone = ConeSet::Structure {
            basis: self.basis.clone(),
            // Normalization for the homogeneous p = 0 program: minimize over
            // the unit Frobenius ball so "a strictly negative direction
            // exists" becomes a well-posed question.
            ball_radius: if p == 0 { Some(1.0) } else { None },
            restrict_range,
        };
        let objective =
            ProxSpec::GObjective { omega: self.omega.clone(), sign: self.sign.clone() };
        let mut cfg = config.clone();
        if p == 1 {
            // For p = +1 the magnitude of a negative optimum is itself the
            // answer (it sets the upper bound), so never exit early on it.
            cfg.enable_early_negative = false;
        }
        if p == 0 {
            // The homogeneous program always contains 0; a stall there is
            // slow convergence, never infeasibility.
            cfg.enable_infeasibility_detection = false;
        }
        let (minimizer, report) = admm_solve(&objective, &affine, &cone, &cfg, None)?;
        let g_value = match report.status {
            SolveStatus::Infeasible => GValue::Infeasible,
            SolveStatus::EarlyNegative | SolveStatus::Unbounded => GValue::UnboundedBelow,
            SolveStatus::Converged | SolveStatus::IterCap => {
                GValue::Value(g_objective(&minimizer, &self.omega, &self.sign)?)
            }
        };
        Ok(DpSolve { minimizer, report, g_value })
    }

    fn tightness(&self, solve: &DpSolve) -> Option<bool> {
        match solve.report.status {
            SolveStatus::Converged | SolveStatus::IterCap | SolveStatus::EarlyNegative => {
                sd_membership(&solve.minimizer, &self.basis, TIGHTNESS_RANK_TOL).ok()
            }
            _ => None,
        }
    }
}

/// Solves the relaxed program `D̂_p` for one `p ∈ {−1, 0, 1}`.
pub fn solve_dp(
    signals: &SignalSet,
    ensemble: &MeasurementEnsemble,
    p: i32,
    config: &SolveConfig,
) -> Result<DpSolve> {
    if !matches!(p, -1 | 0 | 1) {
        return Err(Error::InvalidParameter(format!("p = {p} must be in {{-1, 0, 1}}")));
    }
    Certification::new(signals, ensemble, None)?.solve(p, config, false)
}

/// Like [`solve_dp`] with an explicit eigenbasis and optional range
/// restriction (used by the bound-direction diagnostics).
pub fn solve_dp_with_basis(
    signals: &SignalSet,
    ensemble: &MeasurementEnsemble,
    basis: &EigBasis,
    p: i32,
    config: &SolveConfig,
    restrict_range: bool,
) -> Result<DpSolve> {
    if !matches!(p, -1 | 0 | 1) {
        return Err(Error::InvalidParameter(format!("p = {p} must be in {{-1, 0, 1}}")));
    }
    Certification::new(signals, ensemble, Some(basis.clone()))?.solve(p, config, restrict_range)
}

/// The certification algorithm: three relaxed solves in fixed order with
/// short-circuit exits, then the λ bounds.
pub fn pcal_lambda(
    signals: &SignalSet,
    ensemble: &MeasurementEnsemble,
    config: &SolveConfig,
) -> Result<LambdaVerdict> {
    pcal_lambda_impl(signals, ensemble, None, config, false)
}

/// [`pcal_lambda`] with an explicit unitary completion of the eigenbasis.
pub fn pcal_lambda_with_basis(
    signals: &SignalSet,
    ensemble: &MeasurementEnsemble,
    basis: &EigBasis,
    config: &SolveConfig,
) -> Result<LambdaVerdict> {
    pcal_lambda_impl(signals, ensemble, Some(basis.clone()), config, false)
}

/// [`pcal_lambda`] solving over the heuristically range-restricted structure
/// set; by containment its certified interval can only be looser.
pub fn pcal_lambda_restricted(
    signals: &SignalSet,
    ensemble: &MeasurementEnsemble,
    config: &SolveConfig,
) -> Result<LambdaVerdict> {
    pcal_lambda_impl(signals, ensemble, None, config, true)
}

fn pcal_lambda_impl(
    signals: &SignalSet,
    ensemble: &MeasurementEnsemble,
    basis: Option<EigBasis>,
    config: &SolveConfig,
    restrict_range: bool,
) -> Result<LambdaVerdict> {
    let ctx = Certification::new(signals, ensemble, basis)?;
    let mut v = LambdaVerdict::empty();

    // p = 0: does any feasible direction make G strictly negative?
    let d0 = ctx.solve(0, config, restrict_range)?;
    v.g0 = d0.g_value;
    v.tight_p0 = ctx.tightness(&d0);
    let minimizer_norm = d0.minimizer.frobenius();
    v.report_p0 = Some(d0.report);
    match v.g0 {
        GValue::Infeasible => return Ok(v),
        GValue::UnboundedBelow => return Ok(v),
        GValue::NotComputed => return Ok(v),
        GValue::Value(g) => {
            if g < -EPSILON_G && minimizer_norm >= P0_DIRECTION_NORM {
                return Ok(v);
            }
            if g.abs() <= EPSILON_G && minimizer_norm >= 0.5 {
                v.degenerate_zero_direction = true;
                return Ok(v);
            }
        }
    }

    // p = -1: the lower bound.
    let dm1 = ctx.solve(-1, config, restrict_range)?;
    v.gm1 = dm1.g_value;
    v.tight_pm1 = ctx.tightness(&dm1);
    v.report_pm1 = Some(dm1.report);
    match v.gm1 {
        GValue::Infeasible => {
            // Empty constraint set: the condition is vacuous.
            v.lambda_low = 0.0;
        }
        GValue::UnboundedBelow => return Ok(v),
        GValue::NotComputed => return Ok(v),
        GValue::Value(g) => {
            if g <= EPSILON_G {
                return Ok(v);
            }
            v.lambda_low = 1.0 / g;
        }
    }

    // p = +1: the upper bound.
    let dp1 = ctx.solve(1, config, restrict_range)?;
    v.gp1 = dp1.g_value;
    v.tight_pp1 = ctx.tightness(&dp1);
    v.report_pp1 = Some(dp1.report);
    v.lambda_up = match v.gp1 {
        GValue::Infeasible => f64::INFINITY,
        GValue::UnboundedBelow => 0.0,
        GValue::NotComputed => f64::INFINITY,
        GValue::Value(g) => {
            if g < -EPSILON_G {
                -1.0 / g
            } else {
                f64::INFINITY
            }
        }
    };

    v.recovery = v.lambda_low < v.lambda_up;
    Ok(v)
}

/// Evaluates the four optimality conditions for a specific `λ` against a
/// computed verdict.
pub fn theorem1_check(lambda: f64, verdict: &LambdaVerdict) -> bool {
    // C4: no strictly negative direction at p = 0.
    let c4 = matches!(verdict.g0, GValue::Value(g) if g > -EPSILON_G)
        && !verdict.degenerate_zero_direction;

    // C2: G_{-1} strictly positive, or vacuous by infeasibility.
    // C3: lambda above the lower bound when applicable.
    let (c2, c3) = match verdict.gm1 {
        GValue::Value(g) if g > EPSILON_G => (true, lambda > 1.0 / g),
        GValue::Infeasible => (true, true),
        _ => (false, false),
    };

    // C1: lambda below the upper bound when G_1 is negative.
    let c1 = match verdict.gp1 {
        GValue::Value(g) if g < -EPSILON_G => lambda < -1.0 / g,
        GValue::Value(_) => true,
        GValue::Infeasible => true,
        GValue::UnboundedBelow | GValue::NotComputed => false,
    };

    c1 && c2 && c3 && c4
}

/// Reference interval `(√K·‖x‖₁ + 1, N²/4)` for real-valued single-signal
/// instances, after normalizing to `‖x‖₂ = 1`. Diagnostic only; no claim of
/// tightness.
pub fn li_reference_bounds(signals: &SignalSet) -> Result<(f64, f64)> {
    if signals.l() != 1 {
        return Err(Error::InvalidParameter(format!(
            "reference bounds are defined for L = 1, got L = {}",
            signals.l()
        )));
    }
    if !signals.is_real_field() {
        return Err(Error::InvalidParameter(
            "reference bounds are defined for real-valued signals".into(),
        ));
    }
    let x = &signals.signals()[0];
    let nrm = x.norm();
    if nrm == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let l1: f64 = x.iter().map(|z| z.norm()).sum::<f64>() / nrm;
    let n = signals.n() as f64;
    let lower = (signals.k() as f64).sqrt() * l1 + 1.0;
    let upper = n * n / 4.0;
    Ok((lower, upper))
}
