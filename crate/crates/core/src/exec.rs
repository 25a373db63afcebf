//! Data-parallel helpers. With the `parallel` feature off, every mode runs
//! sequentially.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
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
}
