//! Scratch probe: how far is b from range(C) at converged D̂_p minimizers?

use phasecal::harness::{gen_instance, Field, InstanceDims};
use phasecal::lambda::solve_dp;
use phasecal::lifting::build_eigbasis;
use phasecal::solver::SolveConfig;

#[test]
fn tightness_ratios() {
    let cfg = SolveConfig::default();
    for (n, k, m, seed) in [(16usize, 1usize, 20usize, 1u64), (16, 1, 12, 2), (12, 2, 12, 2), (16, 2, 20, 3)] {
        let dims = InstanceDims { n, k, l: 1, m };
        let (signals, ensemble) = gen_instance(dims, seed, 0, Field::Complex).unwrap();
        let e = build_eigbasis(signals.joint()).unwrap();
        for p in [-1i32, 1] {
            let d = solve_dp(&signals, &ensemble, p, &cfg).unwrap();
            if d.g_value.value().is_none() {
                println!("N={n} K={k} M={m} seed={seed} p={p}: {}", d.g_value.as_display());
                continue;
            }
            let w = e.to_reduced(&d.minimizer);
            let dd = w.nrows();
            let b = w.view((1, 0), (dd - 1, 1)).into_owned();
            let c = w.view((1, 1), (dd - 1, dd - 1)).into_owned();
            let eig = c.clone().symmetric_eigen();
            let cnorm = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
            // orthogonal component of b vs eigen-tail of C at several cuts
            for cut in [1e-3, 1e-4, 1e-5, 1e-6] {
                let mut resid = b.clone();
                for (j, &lam) in eig.eigenvalues.iter().enumerate() {
                    if lam > cut * cnorm {
                        let col = eig.eigenvectors.column(j);
                        let coef = col.dotc(&resid);
                        resid -= nalgebra::DVector::from(col.into_owned()) * coef;
                    }
                }
                print!(" cut {cut:.0e}: {:.2e} |", resid.norm() / b.norm().max(1e-300));
            }
            println!(
                "  N={n} K={k} M={m} seed={seed} p={p} status {:?} bnorm {:.3e} eigs(min/max) {:.2e}/{:.2e}",
                d.report.status,
                b.norm(),
                eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min),
                cnorm
            );
        }
    }
}
