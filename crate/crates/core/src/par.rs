//! Deterministic data-parallel sums.
//!
//! Inputs are cut into fixed-size chunks, each chunk is summed left to right
//! and the chunk totals are combined pairwise. The partition never depends
//! on the thread count, so sequential and parallel runs agree bit for bit.

use std::ops::Add;

/// Items per leaf of the reduction tree.
pub const CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `Parallel` only when the crate was built with the `parallel` feature.
    pub fn effective(self) -> Self {
        if cfg!(feature = "parallel") {
            self
        } else {
            Execution::Sequential
        }
    }
}

/// Pairwise sum of `leaves` in index order.
pub fn tree_sum<T>(leaves: &[T], zero: T) -> T
where
    T: Copy + Add<Output = T>,
{
    match leaves.len() {
        0 => zero,
        1 => leaves[0],
        n => {
            let (l, r) = leaves.split_at(n / 2);
            tree_sum(l, zero) + tree_sum(r, zero)
        }
    }
}

fn chunk_sums<I, T, F>(items: &[I], zero: T, f: &F, exec: Execution) -> Vec<T>
where
    I: Sync,
    T: Copy + Send + Sync + Add<Output = T>,
    F: Fn(&I) -> T + Sync + Send,
{
    let leaf = |chunk: &[I]| chunk.iter().fold(zero, |acc, x| acc + f(x));
    match exec.effective() {
        Execution::Sequential => items.chunks(CHUNK).map(leaf).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_chunks(CHUNK).map(leaf).collect()
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel => unreachable!("effective() removes Parallel"),
    }
}

/// `Σ f(x)` over `items` with the fixed-chunk tree order.
pub fn map_sum<I, T, F>(items: &[I], zero: T, f: F, exec: Execution) -> T
where
    I: Sync,
    T: Copy + Send + Sync + Add<Output = T>,
    F: Fn(&I) -> T + Sync + Send,
{
    tree_sum(&chunk_sums(items, zero, &f, exec), zero)
}

/// Elementwise map preserving order.
pub fn map_collect<I, T, F>(items: &[I], f: F, exec: Execution) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    match exec.effective() {
        Execution::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel => unreachable!("effective() removes Parallel"),
    }
}

/// Runs `f` inside a pool of `threads` workers; `None` keeps the global pool.
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R: Send>(_threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_parallel_agree_exactly() {
        let xs: Vec<f64> = (0..10_000).map(|k| ((k as f64) * 0.37).sin() / (k as f64 + 1.0)).collect();
        let a = map_sum(&xs, 0.0, |x| *x, Execution::Sequential);
        let b = map_sum(&xs, 0.0, |x| *x, Execution::Parallel);
        assert_eq!(a.to_bits(), b.to_bits());
        let c = with_threads(Some(3), || map_sum(&xs, 0.0, |x| *x, Execution::Parallel));
        assert_eq!(a.to_bits(), c.to_bits());
    }

    #[test]
    fn tree_sum_small() {
        assert_eq!(tree_sum::<i64>(&[], 0), 0);
        assert_eq!(tree_sum(&[1, 2, 3, 4, 5], 0), 15);
    }
}
