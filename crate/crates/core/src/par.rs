//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the [`Exec::Parallel`] policy maps
//! work items on the rayon pool. Results are always collected in input order,
//! so reductions performed afterwards are independent of scheduling.

use serde::{Deserialize, Serialize};

/// Execution policy for batch evaluations (probes, parameter grids, λ scans).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if is_parallel_available() {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

#[cfg(feature = "parallel")]
pub fn is_parallel_available() -> bool {
    true
}

#[cfg(not(feature = "parallel"))]
pub fn is_parallel_available() -> bool {
    false
}

/// Order-preserving map over a slice.
#[cfg(feature = "parallel")]
pub fn map<T, U, F>(exec: Exec, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Exec::Parallel => items.par_iter().map(f).collect(),
        Exec::Sequential => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(_exec: Exec, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..count`.
pub fn map_indexed<U, F>(exec: Exec, count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    let idx: Vec<usize> = (0..count).collect();
    map(exec, &idx, |&i| f(i))
}
