//! Phase-transition sweeps: run the certifier over a (L, ρ, δ) grid of
//! seeded instances, append per-trial rows to a CSV (crash-safe, with a
//! completed-cell manifest for resumption), and aggregate per-cell results.

use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::harness::gen::{gen_instance, Field, InstanceDims};
use crate::lambda::{pcal_lambda, GValue, LambdaVerdict};
use crate::par::Parallelism;
use crate::solver::SolveConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub l_list: Vec<usize>,
    pub rho_list: Vec<f64>,
    pub delta_list: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub field: Field,
    #[serde(default)]
    pub solver: SolveConfig,
    /// Record wall-clock times in the CSV. Disable for byte-identical
    /// reruns; the timing column is the only nondeterministic output.
    #[serde(default = "default_true")]
    pub wall_clock: bool,
}

fn default_trials() -> usize {
    10
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    /// Grid cells in deterministic order: L-major, then δ, then ρ.
    pub fn cells(&self) -> Vec<CellSpec> {
        let mut cells = Vec::new();
        let mut cell_index = 0;
        for &l in &self.l_list {
            for &delta in &self.delta_list {
                for &rho in &self.rho_list {
                    let m = ((delta * self.n as f64).round() as usize).max(1);
                    let k = ((rho * m as f64).round() as usize).clamp(1, self.n);
                    cells.push(CellSpec { cell_index, l, rho, delta, m, k });
                    cell_index += 1;
                }
            }
        }
        cells
    }

    /// Stable fingerprint of the scientific configuration (used to refuse
    /// resuming a sweep under a different config).
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n.hash(&mut h);
        self.l_list.hash(&mut h);
        for v in self.rho_list.iter().chain(&self.delta_list) {
            v.to_bits().hash(&mut h);
        }
        self.trials.hash(&mut h);
        self.seed.hash(&mut h);
        self.field.as_str().hash(&mut h);
        serde_json::to_string(&self.solver).unwrap_or_default().hash(&mut h);
        h.finish()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub cell_index: usize,
    pub l: usize,
    pub rho: f64,
    pub delta: f64,
    pub m: usize,
    pub k: usize,
}

/// One certifier run on one seeded instance; a row of the sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub n: usize,
    pub l: usize,
    pub m: usize,
    pub k: usize,
    pub rho: f64,
    pub delta: f64,
    pub trial: usize,
    pub seed: u64,
    pub recovery: bool,
    pub lambda_low: f64,
    pub lambda_up: f64,
    pub g0: GValue,
    pub gm1: GValue,
    pub gp1: GValue,
    pub tight_p0: Option<bool>,
    pub tight_pm1: Option<bool>,
    pub tight_pp1: Option<bool>,
    pub status_p0: String,
    pub status_pm1: String,
    pub status_pp1: String,
    pub iters_total: usize,
    pub wall_ms: u64,
}

pub const SWEEP_CSV_HEADER: [&str; 22] = [
    "N", "L", "M", "K", "rho", "delta", "trial", "seed", "recovery", "lambda_low", "lambda_up",
    "G0", "Gm1", "Gp1", "tight_p0", "tight_pm1", "tight_pp1", "status_p0", "status_pm1",
    "status_pp1", "iters_total", "wall_ms",
];

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        other => other.parse().map_err(|_| Error::Format(format!("bad float: {other}"))),
    }
}

fn fmt_tight(t: Option<bool>) -> String {
    match t {
        Some(true) => "true".into(),
        Some(false) => "false".into(),
        None => "na".into(),
    }
}

fn parse_tight(s: &str) -> Result<Option<bool>> {
    match s {
        "true" => Ok(Some(true)),
        "false" => Ok(Some(false)),
        "na" => Ok(None),
        other => Err(Error::Format(format!("bad tightness flag: {other}"))),
    }
}

impl TrialRow {
    pub fn from_verdict(
        cell: &CellSpec,
        n: usize,
        trial: usize,
        seed: u64,
        verdict: &LambdaVerdict,
        wall_ms: u64,
    ) -> Self {
        Self {
            n,
            l: cell.l,
            m: cell.m,
            k: cell.k,
            rho: cell.rho,
            delta: cell.delta,
            trial,
            seed,
            recovery: verdict.recovery,
            lambda_low: verdict.lambda_low,
            lambda_up: verdict.lambda_up,
            g0: verdict.g0,
            gm1: verdict.gm1,
            gp1: verdict.gp1,
            tight_p0: verdict.tight_p0,
            tight_pm1: verdict.tight_pm1,
            tight_pp1: verdict.tight_pp1,
            status_p0: verdict.status_str(0),
            status_pm1: verdict.status_str(-1),
            status_pp1: verdict.status_str(1),
            iters_total: verdict.iters_total(),
            wall_ms,
        }
    }

    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.l.to_string(),
            self.m.to_string(),
            self.k.to_string(),
            fmt_f64(self.rho),
            fmt_f64(self.delta),
            self.trial.to_string(),
            self.seed.to_string(),
            self.recovery.to_string(),
            fmt_f64(self.lambda_low),
            fmt_f64(self.lambda_up),
            self.g0.as_display(),
            self.gm1.as_display(),
            self.gp1.as_display(),
            fmt_tight(self.tight_p0),
            fmt_tight(self.tight_pm1),
            fmt_tight(self.tight_pp1),
            self.status_p0.clone(),
            self.status_pm1.clone(),
            self.status_pp1.clone(),
            self.iters_total.to_string(),
            self.wall_ms.to_string(),
        ]
    }

    pub fn from_record(rec: &csv::StringRecord) -> Result<Self> {
        if rec.len() != SWEEP_CSV_HEADER.len() {
            return Err(Error::Format(format!(
                "sweep row has {} fields, expected {}",
                rec.len(),
                SWEEP_CSV_HEADER.len()
            )));
        }
        let f = |i: usize| rec.get(i).unwrap();
        let parse_usize = |i: usize| -> Result<usize> {
            f(i).parse().map_err(|_| Error::Format(format!("bad integer: {}", f(i))))
        };
        Ok(Self {
            n: parse_usize(0)?,
            l: parse_usize(1)?,
            m: parse_usize(2)?,
            k: parse_usize(3)?,
            rho: parse_f64(f(4))?,
            delta: parse_f64(f(5))?,
            trial: parse_usize(6)?,
            seed: f(7).parse().map_err(|_| Error::Format(format!("bad seed: {}", f(7))))?,
            recovery: match f(8) {
                "true" => true,
                "false" => false,
                other => return Err(Error::Format(format!("bad recovery flag: {other}"))),
            },
            lambda_low: parse_f64(f(9))?,
            lambda_up: parse_f64(f(10))?,
            g0: GValue::parse(f(11))?,
            gm1: GValue::parse(f(12))?,
            gp1: GValue::parse(f(13))?,
            tight_p0: parse_tight(f(14))?,
            tight_pm1: parse_tight(f(15))?,
            tight_pp1: parse_tight(f(16))?,
            status_p0: f(17).to_string(),
            status_pm1: f(18).to_string(),
            status_pp1: f(19).to_string(),
            iters_total: parse_usize(20)?,
            wall_ms: f(21).parse().map_err(|_| Error::Format("bad wall_ms".into()))?,
        })
    }

    /// All three solves certified tight (membership in the exact structure
    /// set), with unreached solves counting as not tight.
    pub fn all_tight(&self) -> bool {
        self.tight_p0 == Some(true)
            && self.tight_pm1 == Some(true)
            && self.tight_pp1 == Some(true)
    }
}

/// Aggregated results for one grid cell, following the protocol: highest
/// lower bound and lowest upper bound over the recovery-true trials.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub n: usize,
    pub l: usize,
    pub m: usize,
    pub k: usize,
    pub rho: f64,
    pub delta: f64,
    pub rows: Vec<TrialRow>,
    pub probability: f64,
    /// Max of `lambda_low` over recovered trials (None when none recovered).
    pub lambda_low_agg: Option<f64>,
    /// Min of `lambda_up` over recovered trials.
    pub lambda_up_agg: Option<f64>,
    /// Fraction of recovered trials with no upper bound.
    pub frac_no_upper: f64,
    /// Fraction of recovered trials with all-p tightness.
    pub frac_tight: f64,
    /// Trials excluded from the λ aggregates (recovery = false).
    pub excluded: usize,
}

impl CellResult {
    pub fn from_rows(rows: Vec<TrialRow>) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyInput("cell rows"))?.clone();
        let total = rows.len();
        let recovered: Vec<&TrialRow> = rows.iter().filter(|r| r.recovery).collect();
        let probability = recovered.len() as f64 / total as f64;
        let lambda_low_agg =
            recovered.iter().map(|r| r.lambda_low).fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.max(v)))
            });
        let lambda_up_agg =
            recovered.iter().map(|r| r.lambda_up).fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.min(v)))
            });
        let frac_no_upper = if recovered.is_empty() {
            0.0
        } else {
            recovered.iter().filter(|r| r.lambda_up.is_infinite()).count() as f64
                / recovered.len() as f64
        };
        let frac_tight = if recovered.is_empty() {
            0.0
        } else {
            recovered.iter().filter(|r| r.all_tight()).count() as f64 / recovered.len() as f64
        };
        let excluded = total - recovered.len();
        Ok(Self {
            n: first.n,
            l: first.l,
            m: first.m,
            k: first.k,
            rho: first.rho,
            delta: first.delta,
            rows,
            probability,
            lambda_low_agg,
            lambda_up_agg,
            frac_no_upper,
            frac_tight,
            excluded,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    fingerprint: u64,
    completed_cells: Vec<usize>,
}

/// Runs the certifier over the whole grid, appending rows per completed cell
/// (deterministic cell-then-trial order regardless of worker count) and
/// recording completed cells in the manifest. Re-running with identical
/// config resumes after the last completed cell.
pub fn run_transition(
    config: &ExperimentConfig,
    par: Parallelism,
    csv_path: &Path,
    manifest_path: &Path,
) -> Result<Vec<CellResult>> {
    let cells = config.cells();
    let fingerprint = config.fingerprint();

    let mut completed: Vec<usize> = Vec::new();
    if manifest_path.exists() {
        let text = std::fs::read_to_string(manifest_path)?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        if manifest.fingerprint != fingerprint {
            return Err(Error::InvalidParameter(format!(
                "manifest {} belongs to a different configuration; remove it or change paths",
                manifest_path.display()
            )));
        }
        if csv_path.exists() {
            completed = manifest.completed_cells;
        }
    }

    let fresh = completed.is_empty();
    let mut writer: csv::Writer<std::fs::File> = if fresh {
        let mut w = csv::Writer::from_writer(std::fs::File::create(csv_path)?);
        w.write_record(SWEEP_CSV_HEADER)?;
        w.flush()?;
        w
    } else {
        csv::Writer::from_writer(
            std::fs::OpenOptions::new().append(true).open(csv_path)?,
        )
    };

    for cell in &cells {
        if completed.contains(&cell.cell_index) {
            continue;
        }
        let rows = run_cell(config, cell, par);
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        for row in &rows {
            writer.write_record(row.to_record())?;
        }
        writer.flush()?;
        completed.push(cell.cell_index);
        let manifest = Manifest { fingerprint, completed_cells: completed.clone() };
        let mut f = std::fs::File::create(manifest_path)?;
        f.write_all(serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    }
    drop(writer);

    // Single source of truth for the aggregate view: parse the file back.
    let rows = parse_sweep_csv(csv_path)?;
    collect_cells(&cells, rows, config.trials)
}

fn run_cell(
    config: &ExperimentConfig,
    cell: &CellSpec,
    par: Parallelism,
) -> Vec<Result<TrialRow>> {
    par.run(config.trials, |trial| {
        let index = (cell.cell_index * config.trials + trial) as u64;
        let dims = InstanceDims { n: config.n, k: cell.k, l: cell.l, m: cell.m };
        let (signals, ensemble) = gen_instance(dims, config.seed, index, config.field)?;
        let started = Instant::now();
        let verdict = pcal_lambda(&signals, &ensemble, &config.solver)?;
        let wall_ms =
            if config.wall_clock { started.elapsed().as_millis() as u64 } else { 0 };
        Ok(TrialRow::from_verdict(cell, config.n, trial, config.seed, &verdict, wall_ms))
    })
}

fn collect_cells(
    cells: &[CellSpec],
    rows: Vec<TrialRow>,
    trials: usize,
) -> Result<Vec<CellResult>> {
    let mut out = Vec::with_capacity(cells.len());
    for cell in cells {
        let start = cell.cell_index * trials;
        let cell_rows: Vec<TrialRow> = rows
            .iter()
            .skip(start)
            .take(trials)
            .cloned()
            .collect();
        if cell_rows.len() != trials {
            return Err(Error::Format(format!(
                "cell {} has {} rows, expected {trials}",
                cell.cell_index,
                cell_rows.len()
            )));
        }
        out.push(CellResult::from_rows(cell_rows)?);
    }
    Ok(out)
}

/// Parses a sweep CSV back into trial rows (exact round trip of every
/// field).
pub fn parse_sweep_csv(path: &Path) -> Result<Vec<TrialRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    {
        let headers = reader.headers()?;
        let expected: Vec<&str> = SWEEP_CSV_HEADER.to_vec();
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Format("unexpected sweep CSV header".into()));
        }
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        rows.push(TrialRow::from_record(&rec?)?);
    }
    Ok(rows)
}
