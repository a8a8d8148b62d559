//! Execution policy for the data-parallel loops.
//!
//! Every parallel loop in the crate goes through [`map_blocks`], which splits the
//! work into fixed-size blocks and returns per-block results in block order.
//! Callers fold those results sequentially, so floating-point sums are
//! bit-identical whichever policy ran them. Without the `parallel` feature,
//! [`Exec::Parallel`] quietly runs sequentially.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Whether this policy actually fans out on the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Applies `f` to each block index in `0..blocks` and returns results in order.
pub fn map_blocks<T, F>(exec: Exec, blocks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        use rayon::prelude::*;
        return (0..blocks).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..blocks).map(f).collect()
}

/// Splits `0..len` into half-open ranges of at most `block` elements.
pub fn block_ranges(len: u64, block: u64) -> Vec<(u64, u64)> {
    let block = block.max(1);
    (0..len.div_ceil(block)).map(|b| (b * block, ((b + 1) * block).min(len))).collect()
}

/// Runs `f` on a dedicated pool of `threads` workers when parallelism is compiled in.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(t) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}

/// Worker count the current context would use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_cover_exactly() {
        assert_eq!(block_ranges(10, 4), vec![(0, 4), (4, 8), (8, 10)]);
        assert_eq!(block_ranges(0, 4), vec![]);
        assert_eq!(block_ranges(3, 0), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn order_is_preserved() {
        let seq = map_blocks(Exec::Sequential, 1000, |i| i * i);
        let par = map_blocks(Exec::Parallel, 1000, |i| i * i);
        assert_eq!(seq, par);
    }
}
