//! Data-parallel helpers. With the `parallel` feature (default) the work is
//! spread with rayon; without it the same closures run sequentially.
//! Results are always returned in index order, so reductions performed by the
//! caller are deterministic regardless of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(i)` for `i in 0..n`, preserving order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Maps over a slice, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Fixed chunk size for Monte Carlo work. Chunk `c` always consumes substream
/// `c`, which is what makes estimates independent of scheduling.
pub const MC_CHUNK: usize = 1 << 14;

/// Splits `n` samples into `(chunk_index, chunk_len)` pairs.
pub fn chunks(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(MC_CHUNK))
        .map(|c| (c, MC_CHUNK.min(n - c * MC_CHUNK)))
        .collect()
}
