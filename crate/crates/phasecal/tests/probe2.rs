//! Scratch probe for the p = -1 infeasibility misfire.

use phasecal::harness::{gen_instance, Field, InstanceDims};
use phasecal::lambda::solve_dp;
use phasecal::lifting::lift;
use phasecal::solver::{AffineConstraintSet, SolveConfig};

#[test]
fn probe_dp_minus_one() {
    let dims = InstanceDims { n: 8, k: 2, l: 1, m: 30 };
    let (signals, ensemble) = gen_instance(dims, 1, 0, Field::Complex).unwrap();

    let aff = AffineConstraintSet::new(&ensemble, 1, 8, None, Some(-1.0)).unwrap();
    println!(
        "affine: rows {} consistent {} ls_residual {:.3e}",
        aff.rows(),
        aff.is_consistent(),
        aff.ls_residual()
    );

    let cfg = SolveConfig::default();
    let d = solve_dp(&signals, &ensemble, -1, &cfg).unwrap();
    println!(
        "p=-1: status {:?} iters {} obj {:.6e} primal {:.3e} dual {:.3e} g {}",
        d.report.status,
        d.report.iters,
        d.report.objective,
        d.report.primal_residual,
        d.report.dual_residual,
        d.g_value.as_display()
    );
    println!("minimizer norm {:.3e} trace {:.6}", d.minimizer.frobenius(), d.minimizer.trace_re());
    println!("affine residual of minimizer: {:.3e}", aff.residual(&d.minimizer));
    let hist: Vec<String> = d
        .report
        .objective_history
        .iter()
        .step_by((d.report.objective_history.len() / 20).max(1))
        .map(|v| format!("{v:.4}"))
        .collect();
    println!("objective history: {}", hist.join(" "));
    let rhist: Vec<String> = d
        .report
        .residual_history
        .iter()
        .step_by((d.report.residual_history.len() / 20).max(1))
        .map(|v| format!("{v:.2e}"))
        .collect();
    println!("residual history: {}", rhist.join(" "));

    let xx = lift(signals.joint()).unwrap();
    println!("X frob {:.4}", xx.frobenius());
}
