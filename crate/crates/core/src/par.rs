//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature (default) work fans out on a rayon pool;
//! without it every call runs sequentially. Results are always returned in
//! input order, so output never depends on the worker count.

/// How a batch of independent items is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Parallel on `workers` threads; 0 means rayon's default pool.
    #[default]
    Parallel,
    ParallelWith(usize),
}

impl Execution {
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            Some(1) => Execution::Sequential,
            Some(w) if w > 1 => Execution::ParallelWith(w),
            _ => Execution::Parallel,
        }
    }
}

pub fn map_sequential<T, F>(items: std::ops::Range<u64>, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    items.map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, F>(items: std::ops::Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Maps `f` over `items`, honouring `exec` when the `parallel` feature is on.
pub fn map<T, F>(exec: Execution, items: std::ops::Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => map_sequential(items, f),
        #[cfg(feature = "parallel")]
        Execution::Parallel => map_parallel(items, f),
        #[cfg(feature = "parallel")]
        Execution::ParallelWith(workers) => {
            match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                Ok(pool) => pool.install(|| map_parallel(items, f)),
                Err(_) => map_parallel(items, f),
            }
        }
        #[cfg(not(feature = "parallel"))]
        _ => map_sequential(items, f),
    }
}

/// Runs `f` with a pool sized for `exec` built once, so repeated [`map`]
/// calls inside `f` reuse it. `f` receives the execution to pass on.
pub fn scope<R, F>(exec: Execution, f: F) -> R
where
    R: Send,
    F: FnOnce(Execution) -> R + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::ParallelWith(workers) => {
            match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                Ok(pool) => pool.install(|| f(Execution::Parallel)),
                Err(_) => f(Execution::Parallel),
            }
        }
        _ => f(exec),
    }
}
