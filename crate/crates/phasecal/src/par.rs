//! Execution strategy for embarrassingly parallel trial loops. With the
//! `parallel` feature (default) work runs on rayon; without it the same API
//! runs sequentially. Results are collected in index order either way, so
//! output is identical regardless of strategy or worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Parallelism::Rayon
    }

    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Parallelism::Sequential
    }
}

impl Parallelism {
    /// Maps `f` over `0..n`, collecting results in index order.
    pub fn run<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Parallelism::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Parallelism::Rayon => (0..n).into_par_iter().map(f).collect(),
        }
    }
}

/// Environment variable naming the worker count for parallel runs.
pub const WORKERS_ENV: &str = "PHASECAL_WORKERS";

/// Runs `f` inside a rayon pool sized from `PHASECAL_WORKERS` when that
/// variable is set (and the `parallel` feature is on); otherwise runs `f`
/// directly with the default pool.
pub fn with_configured_workers<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            if let Ok(workers) = v.trim().parse::<usize>() {
                if workers >= 1 {
                    if let Ok(pool) =
                        rayon::ThreadPoolBuilder::new().num_threads(workers).build()
                    {
                        return pool.install(f);
                    }
                }
            }
        }
    }
    f()
}
