//! Thread-pool executor.

use gibbsflow_core::Executor;
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "GIBBSFLOW_THREADS";

/// Runs index maps on a rayon pool. Results come back in index order, so
/// output never depends on the thread count.
pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    pub fn new(threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .expect("thread pool");
        Pool { pool }
    }

    /// Worker count from `GIBBSFLOW_THREADS`, else all cores.
    pub fn from_env() -> Self {
        let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
        let cap = std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok());
        Pool::new(cap.map_or(cores, |c| c.clamp(1, cores)))
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Pool {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let p = Pool::new(3);
        assert_eq!(p.map(100, |i| i * i), (0..100).map(|i| i * i).collect::<Vec<_>>());
        assert_eq!(p.threads(), 3);
    }
}
