//! Execution policy for the data-parallel sweeps (audits, Monte Carlo,
//! randomized packing trials).
//!
//! Both policies produce identical, input-ordered results. Without the
//! `parallel` feature, [`ExecPolicy::Parallel`] runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel
        } else {
            ExecPolicy::Sequential
        }
    }
}

impl ExecPolicy {
    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecPolicy::Parallel => items.par_iter().map(f).collect(),
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
            ExecPolicy::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = ExecPolicy::Sequential.map(&xs, |x| x * x + 1);
        let b = ExecPolicy::Parallel.map(&xs, |x| x * x + 1);
        assert_eq!(a, b);
        assert_eq!(
            ExecPolicy::Sequential.map_range(50, |i| i ^ 7),
            ExecPolicy::Parallel.map_range(50, |i| i ^ 7)
        );
    }
}
