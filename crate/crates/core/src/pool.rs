//! Sized worker pools for the parallel batch drivers.

use crate::error::{Error, Result};

/// Runs `op` inside a dedicated rayon pool of `workers` threads (at least 1).
pub fn install<R, F>(workers: usize, op: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::WorkerPool(e.to_string()))?;
    Ok(pool.install(op))
}
