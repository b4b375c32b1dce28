//! Certifier-vs-solver consistency: per instance, compare the certification
//! verdict against direct recovery at a policy-chosen λ (or a fixed λ grid
//! when the certifier predicts failure), and aggregate agreement per cell.

use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::harness::gen::{gen_instance, InstanceDims};
use crate::harness::sweep::{CellSpec, ExperimentConfig, TrialRow};
use crate::lambda::pcal_lambda;
use crate::lifting::{cross_measure, simulate_measurements};
use crate::par::Parallelism;
use crate::recovery::{solve_phasecal, SUCCESS_ERROR};

/// λ grid probed when the certifier predicts no recovery.
pub const FAILURE_PROBE_GRID: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaPolicy {
    /// `2·λ_low` when there is no upper bound, geometric mean of the bounds
    /// otherwise.
    MultipleOfLow,
    /// Geometric mean of the bounds (`2·λ_low` when there is no upper
    /// bound).
    Mid,
}

impl LambdaPolicy {
    pub fn choose(&self, lambda_low: f64, lambda_up: f64) -> f64 {
        if lambda_up.is_infinite() {
            return 2.0 * lambda_low;
        }
        match self {
            LambdaPolicy::MultipleOfLow | LambdaPolicy::Mid => (lambda_low * lambda_up).sqrt(),
        }
    }
}

impl std::str::FromStr for LambdaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multiple-of-low" => Ok(LambdaPolicy::MultipleOfLow),
            "mid" => Ok(LambdaPolicy::Mid),
            other => Err(Error::Format(format!("unknown lambda policy: {other}"))),
        }
    }
}

/// One instance's certifier verdict next to the direct-solve outcome.
#[derive(Debug, Clone)]
pub struct ConsistencyRow {
    pub cell_index: usize,
    pub trial: usize,
    pub cert_recovery: bool,
    /// λ used for the direct solve (None when the failure grid was probed).
    pub lambda_used: Option<f64>,
    /// Best (smallest) relative signal error over the attempted solves.
    pub best_error: f64,
    pub solver_success: bool,
    pub agree: bool,
}

#[derive(Debug, Clone)]
pub struct AgreementCell {
    pub n: usize,
    pub l: usize,
    pub m: usize,
    pub k: usize,
    pub rho: f64,
    pub delta: f64,
    pub trials: usize,
    pub agreement: f64,
    pub both_recover: usize,
    pub both_fail: usize,
    pub cert_only: usize,
    pub solver_only: usize,
}

/// Everything a consistency run produces: the certifier rows (reusable for
/// sweep-style aggregation), the per-instance comparisons, and the per-cell
/// agreement table.
#[derive(Debug, Clone)]
pub struct ConsistencyRun {
    pub trial_rows: Vec<TrialRow>,
    pub rows: Vec<ConsistencyRow>,
    pub cells: Vec<AgreementCell>,
}

pub const AGREEMENT_CSV_HEADER: [&str; 12] = [
    "N", "L", "M", "K", "rho", "delta", "trials", "agreement", "both_recover", "both_fail",
    "cert_only", "solver_only",
];

/// Runs certification and direct recovery on every instance of the grid.
pub fn run_consistency(
    config: &ExperimentConfig,
    policy: LambdaPolicy,
    par: Parallelism,
    csv_path: Option<&Path>,
) -> Result<ConsistencyRun> {
    let cells = config.cells();
    let mut trial_rows = Vec::new();
    let mut rows = Vec::new();
    let mut agg = Vec::new();

    for cell in &cells {
        let outcomes = par.run(config.trials, |trial| run_one(config, cell, trial, policy));
        let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
        let mut both_recover = 0;
        let mut both_fail = 0;
        let mut cert_only = 0;
        let mut solver_only = 0;
        for (trow, crow) in &outcomes {
            match (crow.cert_recovery, crow.solver_success) {
                (true, true) => both_recover += 1,
                (false, false) => both_fail += 1,
                (true, false) => cert_only += 1,
                (false, true) => solver_only += 1,
            }
            trial_rows.push(trow.clone());
            rows.push(crow.clone());
        }
        let agreement = (both_recover + both_fail) as f64 / config.trials as f64;
        agg.push(AgreementCell {
            n: config.n,
            l: cell.l,
            m: cell.m,
            k: cell.k,
            rho: cell.rho,
            delta: cell.delta,
            trials: config.trials,
            agreement,
            both_recover,
            both_fail,
            cert_only,
            solver_only,
        });
    }

    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_writer(std::fs::File::create(path)?);
        w.write_record(AGREEMENT_CSV_HEADER)?;
        for c in &agg {
            w.write_record([
                c.n.to_string(),
                c.l.to_string(),
                c.m.to_string(),
                c.k.to_string(),
                format!("{}", c.rho),
                format!("{}", c.delta),
                c.trials.to_string(),
                format!("{}", c.agreement),
                c.both_recover.to_string(),
                c.both_fail.to_string(),
                c.cert_only.to_string(),
                c.solver_only.to_string(),
            ])?;
        }
        w.flush()?;
    }

    Ok(ConsistencyRun { trial_rows, rows, cells: agg })
}

fn run_one(
    config: &ExperimentConfig,
    cell: &CellSpec,
    trial: usize,
    policy: LambdaPolicy,
) -> Result<(TrialRow, ConsistencyRow)> {
    let index = (cell.cell_index * config.trials + trial) as u64;
    let dims = InstanceDims { n: config.n, k: cell.k, l: cell.l, m: cell.m };
    let (signals, ensemble) = gen_instance(dims, config.seed, index, config.field)?;

    let started = Instant::now();
    let verdict = pcal_lambda(&signals, &ensemble, &config.solver)?;
    let wall_ms = if config.wall_clock { started.elapsed().as_millis() as u64 } else { 0 };
    let trow = TrialRow::from_verdict(cell, config.n, trial, config.seed, &verdict, wall_ms);

    let g = cross_measure(&simulate_measurements(&signals, &ensemble)?);
    let (lambda_used, best_error) = if verdict.recovery {
        let lambda = policy.choose(verdict.lambda_low, verdict.lambda_up);
        let result =
            solve_phasecal(&g, &ensemble, cell.l, lambda, &config.solver, Some(&signals))?;
        (Some(lambda), result.signal_error.unwrap_or(f64::INFINITY))
    } else {
        let mut best = f64::INFINITY;
        for lambda in FAILURE_PROBE_GRID {
            let result =
                solve_phasecal(&g, &ensemble, cell.l, lambda, &config.solver, Some(&signals))?;
            best = best.min(result.signal_error.unwrap_or(f64::INFINITY));
            if best < SUCCESS_ERROR {
                break;
            }
        }
        (None, best)
    };

    let solver_success = best_error < SUCCESS_ERROR;
    let crow = ConsistencyRow {
        cell_index: cell.cell_index,
        trial,
        cert_recovery: verdict.recovery,
        lambda_used,
        best_error,
        solver_success,
        agree: verdict.recovery == solver_success,
    };
    Ok((trow, crow))
}
