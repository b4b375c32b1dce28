//! Shared helpers for unit and integration tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::lifting::{HermitianMatrix, MeasurementEnsemble, SignalSet};

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rand_cvec(d: usize, rng: &mut impl Rng) -> DVector<Complex64> {
    DVector::from_fn(d, |_, _| cx(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
}

pub fn rand_hermitian(d: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let a = DMatrix::from_fn(d, d, |_, _| cx(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    HermitianMatrix::symmetrized(a)
}

/// Dense (K = N) random instance with random phases.
pub fn dense_instance(
    rng: &mut impl Rng,
    n: usize,
    l: usize,
    m: usize,
) -> (SignalSet, MeasurementEnsemble) {
    let signals: Vec<_> = (0..l).map(|_| rand_cvec(n, rng)).collect();
    let set = SignalSet::new(signals, n).unwrap();
    let vectors: Vec<_> = (0..m).map(|_| rand_cvec(n, rng)).collect();
    let phases: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect();
    let ens = MeasurementEnsemble::new(vectors, Some(phases)).unwrap();
    (set, ens)
}

/// K-sparse random instance with random phases.
pub fn sparse_instance(
    rng: &mut impl Rng,
    n: usize,
    k: usize,
    l: usize,
    m: usize,
) -> (SignalSet, MeasurementEnsemble) {
    let mut signals = Vec::with_capacity(l);
    for _ in 0..l {
        let idx = rand::seq::index::sample(rng, n, k);
        let mut s = DVector::from_element(n, cx(0.0, 0.0));
        for i in idx.iter() {
            s[i] = cx(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * cx(2.0, 0.0);
        }
        signals.push(s);
    }
    let set = SignalSet::new(signals, k).unwrap();
    let vectors: Vec<_> = (0..m).map(|_| rand_cvec(n, rng)).collect();
    let phases: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect();
    let ens = MeasurementEnsemble::new(vectors, Some(phases)).unwrap();
    (set, ens)
}
