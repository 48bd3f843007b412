//! Thin switch between rayon and sequential execution.
//!
//! Independent work units (structure-table entries, sample ranks, grid
//! points) go through [`run_map`]. With the `parallel` feature enabled the
//! closure runs on the rayon pool unless the caller asks for sequential
//! execution; without the feature everything is sequential. Output order
//! always matches input order, so results are deterministic either way.

/// Execution strategy for embarrassingly parallel maps.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Parallelism {
    #[default]
    Parallel,
    Sequential,
}

#[cfg(feature = "parallel")]
pub fn run_map<T, U, F>(items: Vec<T>, mode: Parallelism, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match mode {
        Parallelism::Parallel => items.into_par_iter().map(f).collect(),
        Parallelism::Sequential => items.into_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn run_map<T, U, F>(items: Vec<T>, _mode: Parallelism, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}
