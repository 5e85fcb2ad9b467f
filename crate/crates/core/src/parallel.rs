//! Thread pool shared by the batch evaluators.
//!
//! `THETA_FORGE_THREADS` caps the number of worker threads. Results never
//! depend on the thread count: every parallel map writes into a fixed slot.

use std::sync::OnceLock;

use rayon::{ThreadPool, ThreadPoolBuilder};

pub const THREADS_ENV: &str = "THETA_FORGE_THREADS";

fn configured_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut b = ThreadPoolBuilder::new().thread_name(|i| format!("theta-forge-{i}"));
        if let Some(n) = configured_threads() {
            b = b.num_threads(n);
        }
        b.build().expect("failed to build thread pool")
    })
}

/// Order-preserving parallel map.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    pool().install(|| items.par_iter().map(&f).collect())
}
