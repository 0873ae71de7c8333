//! Shared worker pool, sized by `QES_THREADS` when set.

use std::sync::OnceLock;

use rayon::{ThreadPool, ThreadPoolBuilder};

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut b = ThreadPoolBuilder::new();
        if let Some(k) = std::env::var("QES_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            if k > 0 {
                b = b.num_threads(k);
            }
        }
        b.build().expect("worker pool")
    })
}

/// Runs `f` inside the shared pool so nested rayon calls respect the cap.
pub fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    pool().install(f)
}

pub fn current_threads() -> usize {
    pool().current_num_threads()
}
