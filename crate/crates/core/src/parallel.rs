//! Worker-count control for rayon.

use crate::error::{Error, Result};

/// Environment variable consulted when no explicit worker count is given.
pub const WORKERS_ENV: &str = "CARTAN_WORKERS";

/// Runs `f` on a pool of `workers` threads, or on the global pool when `None`.
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::config("mc.workers", "worker count must be positive")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::config("mc.workers", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
