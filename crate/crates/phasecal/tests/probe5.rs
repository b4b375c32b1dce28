//! Scratch probe: tuning matrix on the hardest solves.

use phasecal::harness::{gen_instance, Field, InstanceDims};
use phasecal::lambda::solve_dp;
use phasecal::lifting::{cross_measure, simulate_measurements};
use phasecal::recovery::solve_phasecal;
use phasecal::solver::SolveConfig;
use std::time::Instant;

fn set(alpha: f64, trigger: f64, every: usize) {
    std::env::set_var("PHASECAL_ALPHA", alpha.to_string());
    std::env::set_var("PHASECAL_TRIGGER", trigger.to_string());
    std::env::set_var("PHASECAL_ADAPT_EVERY", every.to_string());
}

#[test]
fn tuning_matrix() {
    let cfg = SolveConfig::default();
    let combos = [
        (1.0f64, 2.0f64, 100usize),
        (1.0, 3.0, 50),
        (1.0, 4.0, 100),
        (1.0, 3.0, 200),
    ];
    // hardest cases from probe4
    let l2 = gen_instance(InstanceDims { n: 16, k: 4, l: 2, m: 20 }, 1, 0, Field::Complex).unwrap();
    let rec = gen_instance(InstanceDims { n: 16, k: 1, l: 1, m: 12 }, 1, 0, Field::Complex).unwrap();
    let grec = cross_measure(&simulate_measurements(&rec.0, &rec.1).unwrap());
    let pm1 = gen_instance(InstanceDims { n: 16, k: 1, l: 1, m: 20 }, 1, 0, Field::Complex).unwrap();

    for (alpha, trigger, every) in combos {
        set(alpha, trigger, every);
        let t0 = Instant::now();
        let a = solve_dp(&l2.0, &l2.1, 0, &cfg).unwrap();
        let ta = t0.elapsed();
        let t0 = Instant::now();
        let b = solve_phasecal(&grec, &rec.1, 1, 0.6348, &cfg, Some(&rec.0)).unwrap();
        let tb = t0.elapsed();
        let t0 = Instant::now();
        let c = solve_dp(&pm1.0, &pm1.1, -1, &cfg).unwrap();
        let tc = t0.elapsed();
        println!(
            "alpha={alpha} trig={trigger} every={every}: p0L2 {:?}/{} ({ta:.0?}) | rec {:?}/{} err {:.1e} ({tb:.0?}) | pm1 {:?}/{} g={} ({tc:.0?})",
            a.report.status,
            a.report.iters,
            b.report.status,
            b.report.iters,
            b.signal_error.unwrap(),
            c.report.status,
            c.report.iters,
            c.g_value.as_display(),
        );
    }
}
