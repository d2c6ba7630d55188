//! Trajectory-level parallelism. With the `parallel` feature, independent
//! jobs run on a rayon pool; without it every mode runs sequentially.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// `threads = None` uses rayon's default pool size.
    #[default]
    Parallel,
    ParallelWith(usize),
}

impl Execution {
    pub fn from_threads(threads: Option<usize>) -> Self {
        match threads {
            Some(1) => Self::Sequential,
            Some(k) => Self::ParallelWith(k),
            None => Self::Parallel,
        }
    }
}

/// Applies `f` to every item, preserving order.
pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Parallel | Execution::ParallelWith(_) => parallel_map(items, exec, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::ParallelWith(threads) => {
            match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
                Err(e) => {
                    log::warn!("thread pool with {threads} threads unavailable ({e}); using the global pool");
                    items.par_iter().map(&f).collect()
                }
            }
        }
        _ => items.par_iter().map(&f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(items: &[T], _exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let items: Vec<u64> = (0..50).collect();
        let f = |x: &u64| x * x + 1;
        let seq = map(&items, Execution::Sequential, f);
        assert_eq!(seq, map(&items, Execution::Parallel, f));
        assert_eq!(seq, map(&items, Execution::ParallelWith(3), f));
        assert_eq!(seq[7], 50);
    }

    #[test]
    fn thread_flag() {
        assert_eq!(Execution::from_threads(Some(1)), Execution::Sequential);
        assert_eq!(Execution::from_threads(Some(4)), Execution::ParallelWith(4));
        assert_eq!(Execution::from_threads(None), Execution::Parallel);
    }
}
