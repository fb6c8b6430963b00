//! Data-parallel map over path indices with a sequential fallback.
//!
//! Results are collected in ascending path order, so reductions over the
//! returned vector are bitwise identical for any worker count. Building
//! without the `parallel` feature swaps in a plain sequential loop.

#[cfg(feature = "parallel")]
pub(crate) fn map_paths<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_paths<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
