//! Execution strategy for data-parallel scans.
//!
//! Every parallel routine produces the same output as its sequential,
//! lowest-index-first counterpart. Without the `parallel` feature,
//! [`Execution::Parallel`] runs sequentially.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `f(0), f(1), …, f(len-1)` in index order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }

    /// Lowest index satisfying `pred`.
    pub fn find_first<F>(self, len: usize, pred: F) -> Option<usize>
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().find_first(|&i| pred(i))
            }
            _ => (0..len).find(|&i| pred(i)),
        }
    }

    /// Serial oracles force sequential evaluation.
    pub fn honoring(self, serial: bool) -> Self {
        if serial {
            Execution::Sequential
        } else {
            self
        }
    }
}
