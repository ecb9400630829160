//! Block-sharded evaluation over `[1, x]` with an order-preserving merge.

use std::ops::RangeInclusive;

/// Splits `[1, x]` into consecutive blocks of `block` integers.
pub fn blocks(x: u64, block: u64) -> Vec<RangeInclusive<u64>> {
    let block = block.max(1);
    let mut out = Vec::new();
    let mut lo = 1u64;
    while lo <= x {
        let hi = lo.saturating_add(block - 1).min(x);
        out.push(lo..=hi);
        if hi == u64::MAX {
            break;
        }
        lo = hi + 1;
    }
    out
}

/// Applies `f` to each item on up to `jobs` workers; results keep input order.
#[cfg(feature = "parallel")]
pub fn map_ordered<I, T, F>(items: Vec<I>, jobs: usize, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if jobs <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
        Err(_) => items.into_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<I, T, F>(items: Vec<I>, _jobs: usize, f: F) -> Vec<T>
where
    F: Fn(I) -> T,
{
    items.into_iter().map(f).collect()
}

/// Worker count to use when the caller does not specify one.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
