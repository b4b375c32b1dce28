//! Scratch probe: does the range-restricted program attain the same optimal
//! value as the relaxed one (i.e., are the bounds tight at desk scale)?

use phasecal::harness::{gen_instance, Field, InstanceDims};
use phasecal::lambda::{solve_dp, solve_dp_with_basis};
use phasecal::lifting::{build_eigbasis, sd_membership};
use phasecal::solver::SolveConfig;

#[test]
fn restricted_vs_relaxed_values() {
    let cfg = SolveConfig::default();
    for (n, k, m, seed) in [
        (16usize, 1usize, 20usize, 1u64),
        (16, 1, 12, 2),
        (12, 2, 12, 2),
        (16, 2, 20, 3),
        (16, 2, 20, 5),
        (12, 1, 14, 4),
    ] {
        let dims = InstanceDims { n, k, l: 1, m };
        let (signals, ensemble) = gen_instance(dims, seed, 0, Field::Complex).unwrap();
        let basis = build_eigbasis(signals.joint()).unwrap();
        for p in [-1i32, 1] {
            let relaxed = solve_dp(&signals, &ensemble, p, &cfg).unwrap();
            let restricted =
                solve_dp_with_basis(&signals, &ensemble, &basis, p, &cfg, true).unwrap();
            let member_relaxed = sd_membership(&relaxed.minimizer, &basis, 1e-4).unwrap();
            let member_restricted = sd_membership(&restricted.minimizer, &basis, 1e-4).unwrap();
            println!(
                "N={n} K={k} M={m} seed={seed} p={p:+}: G_hat {} ({:?}/{}) | G_restr {} ({:?}/{}) member {}/{}",
                relaxed.g_value.as_display(),
                relaxed.report.status,
                relaxed.report.iters,
                restricted.g_value.as_display(),
                restricted.report.status,
                restricted.report.iters,
                member_relaxed,
                member_restricted,
            );
        }
    }
}
