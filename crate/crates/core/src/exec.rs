//! Sequential / data-parallel execution switch.
//!
//! With the `parallel` feature enabled, [`Execution::Parallel`] runs the inner
//! loops on the rayon pool. Without it, both variants run sequentially. Every
//! parallel path collects results in index order, so outputs are identical
//! under either mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps `0..len` through `f`, preserving index order.
    pub fn map_range<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Maps a slice through `f`, preserving order.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maximum of `f` over a slice; `0.0` for an empty slice.
    pub fn max_over<S, F>(self, items: &[S], f: F) -> f64
    where
        S: Sync,
        F: Fn(&S) -> f64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).reduce(|| 0.0, f64::max);
        }
        items.iter().map(f).fold(0.0, f64::max)
    }
}
