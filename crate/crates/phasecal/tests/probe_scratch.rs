//! Scratch probe (will be replaced): measure solver behavior on key cases.

use phasecal::harness::{gen_instance, Field, InstanceDims};
use phasecal::lambda::pcal_lambda;
use phasecal::lifting::{cross_measure, lift, simulate_measurements};
use phasecal::recovery::solve_phasecal;
use phasecal::solver::SolveConfig;
use std::time::Instant;

#[test]
fn probe_phasecal_recovery() {
    let dims = InstanceDims { n: 8, k: 2, l: 1, m: 30 };
    for seed in 0..4u64 {
        let (signals, ensemble) = gen_instance(dims, seed, 0, Field::Complex).unwrap();
        let g = cross_measure(&simulate_measurements(&signals, &ensemble).unwrap());
        let cfg = SolveConfig::default();
        let t0 = Instant::now();
        let r = solve_phasecal(&g, &ensemble, 1, 10.0, &cfg, Some(&signals)).unwrap();
        println!(
            "seed {seed}: status {:?} iters {} matrix_err {:.3e} sig_err {:.3e} time {:.2?}",
            r.report.status,
            r.report.iters,
            r.relative_matrix_error.unwrap(),
            r.signal_error.unwrap(),
            t0.elapsed()
        );
    }
}

#[test]
fn probe_pcal_lambda() {
    let dims = InstanceDims { n: 8, k: 2, l: 1, m: 30 };
    for seed in 0..4u64 {
        let (signals, ensemble) = gen_instance(dims, seed, 0, Field::Complex).unwrap();
        let cfg = SolveConfig::default();
        let t0 = Instant::now();
        let v = pcal_lambda(&signals, &ensemble, &cfg).unwrap();
        println!(
            "seed {seed}: recovery {} low {:.4} up {} g0 {} gm1 {} gp1 {} tight ({:?},{:?},{:?}) iters {} time {:.2?}",
            v.recovery,
            v.lambda_low,
            v.lambda_up,
            v.g0.as_display(),
            v.gm1.as_display(),
            v.gp1.as_display(),
            v.tight_p0, v.tight_pm1, v.tight_pp1,
            v.iters_total(),
            t0.elapsed()
        );
        if v.recovery {
            let g = cross_measure(&simulate_measurements(&signals, &ensemble).unwrap());
            let lam = 2.0 * v.lambda_low;
            let r = solve_phasecal(&g, &ensemble, 1, lam, &cfg, Some(&signals)).unwrap();
            println!(
                "   cross-check at lambda {:.4}: err {:.3e} iters {}",
                lam,
                r.signal_error.unwrap(),
                r.report.iters
            );
        }
    }
}

#[test]
fn probe_nullspace_trivial() {
    let dims = InstanceDims { n: 4, k: 1, l: 1, m: 18 };
    for seed in 0..3u64 {
        let (signals, ensemble) = gen_instance(dims, seed, 0, Field::Complex).unwrap();
        let cfg = SolveConfig::default();
        let v = pcal_lambda(&signals, &ensemble, &cfg).unwrap();
        println!(
            "seed {seed}: recovery {} low {:.3e} up {} g0 {} gm1 {} gp1 {} statuses {}/{}/{}",
            v.recovery,
            v.lambda_low,
            v.lambda_up,
            v.g0.as_display(),
            v.gm1.as_display(),
            v.gp1.as_display(),
            v.status_str(0),
            v.status_str(-1),
            v.status_str(1),
        );
    }
}

#[test]
fn probe_m_zero() {
    let dims = InstanceDims { n: 8, k: 2, l: 1, m: 1 };
    let (signals, _) = gen_instance(dims, 5, 0, Field::Complex).unwrap();
    let ens = phasecal::lifting::MeasurementEnsemble::empty();
    let cfg = SolveConfig::default();
    let t0 = Instant::now();
    let v = pcal_lambda(&signals, &ens, &cfg).unwrap();
    println!(
        "M=0: recovery {} g0 {} status_p0 {} iters {} time {:.2?}",
        v.recovery,
        v.g0.as_display(),
        v.status_str(0),
        v.iters_total(),
        t0.elapsed()
    );
    assert!(!v.recovery);
    let _ = lift(signals.joint()).unwrap();
}
