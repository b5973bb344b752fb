//! Index-parallel execution hook.

use alloc::vec::Vec;

/// Maps a pure function over sample indices `0..count`.
///
/// Implementations must return results in index order. Every per-index
/// computation in this crate draws its randomness from `(seed, index)`, so
/// any schedule gives bit-identical output.
pub trait Executor: Sync {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}
