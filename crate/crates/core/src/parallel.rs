//! Worker-count control for row-parallel loops.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Workers {
    /// Run on the calling thread.
    Serial,
    /// Use the ambient rayon pool.
    #[default]
    Ambient,
    /// Use a dedicated pool of this many threads.
    Fixed(usize),
}

impl Workers {
    pub fn from_count(n: usize) -> Self {
        match n {
            0 => Workers::Ambient,
            1 => Workers::Serial,
            n => Workers::Fixed(n),
        }
    }
}

/// Evaluates `f(0..n)` and returns the results in index order. Stops at the
/// first error (lowest index wins in serial mode; any failing index in
/// parallel mode).
pub fn map_rows<T, F>(n: usize, workers: Workers, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match workers {
            Workers::Serial => (0..n).map(f).collect(),
            Workers::Ambient => (0..n).into_par_iter().map(f).collect(),
            Workers::Fixed(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| crate::Error::InvalidConfig(format!("thread pool: {e}")))?;
                pool.install(|| (0..n).into_par_iter().map(f).collect())
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        (0..n).map(f).collect()
    }
}
