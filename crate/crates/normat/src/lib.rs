//! Files, benchmarks and the command line around `normat-core`.
//!
//! - [`dataio`]: JSON dataset descriptors, headered CSV and sparse triplet
//!   files, loading into a [`NormalizedMatrix`](normat_core::NormalizedMatrix),
//!   and seeded synthetic PK-FK / M:N generators.
//! - [`bench`]: median-of-trials timing of standard vs factorized operators
//!   and training runs, with a built-in correctness check.
//! - [`train`]: training runs on a loaded dataset in a chosen execution mode.
//! - [`report`]: the JSON records written by the command line.

pub mod bench;
pub mod dataio;
mod error;
pub mod report;
pub mod train;

pub use error::{DataError, Result};

/// Configures the worker pool used by the parallel kernels. Returns the
/// effective thread count.
pub fn init_threads(threads: Option<usize>) -> usize {
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = threads.filter(|&n| n > 0) {
            // a pool that is already configured keeps its size
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        1
    }
}
