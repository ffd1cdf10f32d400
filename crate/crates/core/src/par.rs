//! Thin switch between rayon and plain iterators.
//!
//! Every kernel that fans out goes through these helpers so the crate builds
//! and behaves identically with `--no-default-features`. All reductions are
//! order-insensitive or pick the first hit in index order, so results do not
//! depend on scheduling.

use std::ops::Range;

/// First `Some` in ascending index order.
#[cfg(feature = "parallel")]
pub fn find_map_first<T, F>(range: Range<usize>, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().find_map_first(f)
}

#[cfg(not(feature = "parallel"))]
pub fn find_map_first<T, F>(range: Range<usize>, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    range.into_iter().find_map(f)
}

/// Ordered map over an index range.
#[cfg(feature = "parallel")]
pub fn map_collect<T, F>(range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, F>(range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    range.into_iter().map(f).collect()
}

/// Ordered map over a slice.
#[cfg(feature = "parallel")]
pub fn map_slice<'a, S, T, F>(items: &'a [S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&'a S) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<'a, S, T, F>(items: &'a [S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&'a S) -> T + Sync + Send,
{
    items.iter().map(f).collect()
}

/// True when `f` holds for every index.
pub fn all<F>(range: Range<usize>, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    find_map_first(range, |i| if f(i) { None } else { Some(()) }).is_none()
}
