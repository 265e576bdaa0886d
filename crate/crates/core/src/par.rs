//! Data-parallel map with a sequential fallback, plus deterministic
//! reductions. The `parallel` feature (on by default) routes maps through
//! rayon; order of results is the input order either way, so downstream
//! sequential reductions are bit-stable.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over the inputs, in parallel when the `parallel` feature is
/// enabled. Output order always matches input order.
pub fn map_ordered<I, O, F>(inputs: Vec<I>, f: F) -> Vec<O>
where
    I: Send,
    O: Send,
    F: Fn(I) -> O + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        inputs.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        inputs.into_iter().map(f).collect()
    }
}

/// Fixed-order pairwise summation; deterministic and more accurate than a
/// running sum for long vectors.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Caps the global worker pool at `threads` (0 keeps all cores). A no-op
/// in sequential builds or if a pool already exists.
pub fn set_thread_cap(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        if threads > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
    }
}
