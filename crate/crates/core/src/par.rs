//! Data-parallel helpers with a sequential fallback.
//!
//! Every parallel entry point in the crate takes an [`ExecMode`]. Without the
//! `parallel` feature both modes run sequentially. Results are always
//! returned in input order; callers that accumulate exact sums are
//! order-independent anyway.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map<T, R, F>(mode: ExecMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel if items.len() > 1 => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Maps chunks and folds the partial results with `merge`.
pub fn map_reduce<T, R, F, M>(mode: ExecMode, items: &[T], identity: impl Fn() -> R + Sync + Send, f: F, merge: M) -> R
where
    T: Sync,
    R: Send,
    F: Fn(&mut R, &T) + Sync + Send,
    M: Fn(R, R) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel if items.len() > 1 => items
            .par_iter()
            .fold(&identity, |mut acc, x| {
                f(&mut acc, x);
                acc
            })
            .reduce(&identity, &merge),
        _ => {
            let _ = &merge;
            let mut acc = identity();
            for x in items {
                f(&mut acc, x);
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(ExecMode::Sequential, &xs, |x| x * x);
        let b = map(ExecMode::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        let s = map_reduce(ExecMode::Parallel, &xs, || 0u64, |acc, x| *acc += x, |a, b| a + b);
        assert_eq!(s, 499500);
    }
}
