//! Parallel driver helpers. Enumerations fan out over independent work
//! items (usually one per period length) and merge in item order, so output
//! stays canonical whether or not the `parallel` feature is enabled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over the items, preserving item order in the output.
/// Runs on the rayon pool when the `parallel` feature is enabled.
pub(crate) fn map_ordered<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Sequential reference version of [`map_ordered`]; always single-threaded.
/// Kept public-in-crate so benchmarks can compare both drivers.
pub(crate) fn map_ordered_serial<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}
