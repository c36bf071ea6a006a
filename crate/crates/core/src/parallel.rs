//! Order-preserving parallel map and the knobs shared by all constructions.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pivot::DEFAULT_EXHAUSTIVE_CAP;

/// Vectors bound (1) may enumerate before giving up.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructOptions {
    /// Worker threads; `None` uses the global pool, `Some(1)` runs inline.
    pub workers: Option<usize>,
    pub exhaustive_cap: u64,
    pub enumeration_budget: u128,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            workers: None,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
        }
    }
}

impl ConstructOptions {
    pub fn sequential() -> Self {
        ConstructOptions {
            workers: Some(1),
            ..Self::default()
        }
    }
}

/// `items.map(f)` with the output in input order whatever the worker count.
/// The first error in input order wins.
pub fn try_map<T, U, F>(items: &[T], workers: Option<usize>, f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    let results = map(items, workers, f);
    results.into_iter().collect()
}

/// Infallible variant of [`try_map`].
pub fn map<T, U, F>(items: &[T], workers: Option<usize>, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match workers {
            Some(1) => items.iter().map(f).collect(),
            Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
                Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
                Err(_) => items.iter().map(f).collect(),
            },
            None => items.par_iter().map(f).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        for w in [None, Some(1), Some(3)] {
            let out = map(&items, w, |x| x * x);
            assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
        }
    }

    #[test]
    fn first_error_wins() {
        let items: Vec<usize> = (0..100).collect();
        let r = try_map(&items, Some(4), |&x| {
            if x % 10 == 7 {
                Err(Error::Parameter(x.to_string()))
            } else {
                Ok(x)
            }
        });
        assert!(matches!(r, Err(Error::Parameter(s)) if s == "7"));
    }
}
