use rayon::prelude::*;

use crate::error::{Error, Result};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "OPLIP_THREADS";

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(Error::Invalid(format!("{THREADS_ENV} must be a positive integer (got {s:?})"))),
        },
    }
}

/// Runs `trial(0..count)` on the worker pool and returns results in trial
/// order; the first error in trial order wins.
pub fn run_trials<X: Send>(count: usize, trial: impl Fn(usize) -> Result<X> + Sync) -> Result<Vec<X>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_cap()? {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| Error::Invalid(format!("worker pool: {e}")))?;
    let results: Vec<Result<X>> = pool.install(|| (0..count).into_par_iter().map(&trial).collect());
    results.into_iter().collect()
}
