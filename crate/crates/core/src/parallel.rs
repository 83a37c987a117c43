//! Deterministic parallel replication loop.

use rayon::prelude::*;

use crate::error::{LabError, Result};

/// Runs `job(r)` for `r in 0..reps` and returns results in index order.
///
/// Each job derives its randomness from its own index, so the output does
/// not depend on `threads`; `None` uses rayon's global pool.
pub fn replicate<T, F>(reps: usize, threads: Option<usize>, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let run = || {
        (0..reps as u64)
            .into_par_iter()
            .map(&job)
            .collect::<Result<Vec<T>>>()
    };
    match threads {
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| LabError::Domain(format!("cannot build thread pool: {e}")))?
            .install(run),
    }
}
