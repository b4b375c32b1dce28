//! Seeded instance generation and the instance file format.
//!
//! Randomness is split into independent substreams (supports, signal values,
//! ensemble, phases) of a counter-based generator, so an instance is fully
//! determined by `(seed, instance index)` and insensitive to draw-count
//! changes in unrelated substreams.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lifting::{MeasurementEnsemble, SignalSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Complex,
    Real,
}

impl Field {
    pub fn as_str(&self) -> &'static str {
        match self {
            Field::Complex => "complex",
            Field::Real => "real",
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex" => Ok(Field::Complex),
            "real" => Ok(Field::Real),
            other => Err(Error::Format(format!("unknown field: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDims {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
}

const SUBSTREAM_SUPPORTS: u64 = 0;
const SUBSTREAM_VALUES: u64 = 1;
const SUBSTREAM_ENSEMBLE: u64 = 2;
const SUBSTREAM_PHASES: u64 = 3;

fn substream(seed: u64, index: u64, which: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_mul(4).wrapping_add(which));
    rng
}

fn draw_complex(rng: &mut ChaCha20Rng, field: Field) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    match field {
        Field::Complex => {
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        }
        Field::Real => Complex64::new(re, 0.0),
    }
}

/// Generates one instance: K-sparse signals with standard-normal nonzero
/// entries on uniformly random supports, a standard-normal measurement
/// ensemble, and phases uniform on `[0, 2π)`. Bit-identical for identical
/// `(dims, seed, index, field)`.
pub fn gen_instance(
    dims: InstanceDims,
    seed: u64,
    index: u64,
    field: Field,
) -> Result<(SignalSet, MeasurementEnsemble)> {
    let InstanceDims { n, k, l, m } = dims;
    if n == 0 || l == 0 {
        return Err(Error::InvalidParameter("N and L must be >= 1".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("K = {k} must satisfy 1 <= K <= N = {n}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("M must be >= 1".into()));
    }

    let mut rng_sup = substream(seed, index, SUBSTREAM_SUPPORTS);
    let mut rng_val = substream(seed, index, SUBSTREAM_VALUES);
    let mut rng_ens = substream(seed, index, SUBSTREAM_ENSEMBLE);
    let mut rng_ph = substream(seed, index, SUBSTREAM_PHASES);

    let mut signals = Vec::with_capacity(l);
    for _ in 0..l {
        let mut idx: Vec<usize> = rand::seq::index::sample(&mut rng_sup, n, k).into_vec();
        idx.sort_unstable();
        let mut s = DVector::from_element(n, Complex64::new(0.0, 0.0));
        for i in idx {
            s[i] = draw_complex(&mut rng_val, field);
        }
        signals.push(s);
    }
    let signals = SignalSet::new(signals, k)?;

    let vectors: Vec<DVector<Complex64>> = (0..m)
        .map(|_| DVector::from_fn(n, |_, _| draw_complex(&mut rng_ens, field)))
        .collect();
    let phases: Vec<f64> =
        (0..m).map(|_| rng_ph.gen::<f64>() * std::f64::consts::TAU).collect();
    let ensemble = MeasurementEnsemble::new(vectors, Some(phases))?;

    Ok((signals, ensemble))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub index: u64,
    pub field: Field,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ComplexArrays {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl ComplexArrays {
    fn from_vectors(vs: &[DVector<Complex64>]) -> Self {
        Self {
            re: vs.iter().map(|v| v.iter().map(|z| z.re).collect()).collect(),
            im: vs.iter().map(|v| v.iter().map(|z| z.im).collect()).collect(),
        }
    }

    fn to_vectors(&self) -> Result<Vec<DVector<Complex64>>> {
        if self.re.len() != self.im.len() {
            return Err(Error::Format("real/imaginary array count mismatch".into()));
        }
        self.re
            .iter()
            .zip(&self.im)
            .map(|(re, im)| {
                if re.len() != im.len() {
                    return Err(Error::Format("real/imaginary array length mismatch".into()));
                }
                Ok(DVector::from_iterator(
                    re.len(),
                    re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)),
                ))
            })
            .collect()
    }
}

/// On-disk instance representation: explicit real/imaginary arrays plus a
/// seed provenance block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub provenance: Provenance,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    signals: ComplexArrays,
    ensemble: ComplexArrays,
    pub phases: Option<Vec<f64>>,
}

pub const INSTANCE_FILE_VERSION: u32 = 1;

impl InstanceFile {
    pub fn from_instance(
        signals: &SignalSet,
        ensemble: &MeasurementEnsemble,
        provenance: Provenance,
    ) -> Self {
        Self {
            version: INSTANCE_FILE_VERSION,
            provenance,
            n: signals.n(),
            k: signals.k(),
            l: signals.l(),
            m: ensemble.m(),
            signals: ComplexArrays::from_vectors(signals.signals()),
            ensemble: ComplexArrays::from_vectors(ensemble.vectors()),
            phases: ensemble.phases().map(<[f64]>::to_vec),
        }
    }

    pub fn to_instance(&self) -> Result<(SignalSet, MeasurementEnsemble)> {
        if self.version != INSTANCE_FILE_VERSION {
            return Err(Error::Format(format!(
                "unsupported instance file version {}",
                self.version
            )));
        }
        let signals = SignalSet::new(self.signals.to_vectors()?, self.k)?;
        let ensemble = MeasurementEnsemble::new(self.ensemble.to_vectors()?, self.phases.clone())?;
        if signals.n() != self.n || signals.l() != self.l || ensemble.m() != self.m {
            return Err(Error::Format("instance file header disagrees with arrays".into()));
        }
        Ok((signals, ensemble))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
