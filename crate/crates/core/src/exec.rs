//! Sequential / data-parallel execution switch.
//!
//! Sweeps take an [`Exec`] so both paths live in one binary (the benches
//! compare them). Without the `parallel` feature every mode runs
//! sequentially.

/// Execution strategy for batch evaluations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this build can actually run data-parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Sizes the global worker pool; `0` keeps the default. Only the first
    /// call in a process takes effect.
    pub fn configure_threads(n: usize) -> crate::Result<()> {
        #[cfg(feature = "parallel")]
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| crate::Error::Argument(e.to_string()))?;
        }
        #[cfg(not(feature = "parallel"))]
        let _ = n;
        Ok(())
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Maps `f` over `0..n`, preserving order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Flat-maps `f` over `items`, concatenating in input order.
    pub fn flat_map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Vec<R> + Sync + Send,
    {
        self.map(items, f).into_iter().flatten().collect()
    }
}
