//! Ordered map over an index range, parallel when the `parallel` feature is on.
//!
//! Results always come back in index order, so callers that reduce sequentially get
//! bit-identical output regardless of the worker count.

#[cfg(feature = "parallel")]
pub(crate) fn map_range<T, F>(range: std::ops::Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<T, F>(range: std::ops::Range<usize>, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    range.map(f).collect()
}
