//! Contiguous-block fan-out over scoped threads.

use std::ops::Range;
use std::thread;

/// Worker count used when the caller does not pick one.
pub fn default_workers() -> usize {
    thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Splits `0..units` into at most `workers` contiguous ranges and runs `f`
/// on each. Results come back in range order, so any in-order fold over
/// them is independent of the worker count.
pub fn map_blocks<T, F>(units: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync,
{
    let workers = (workers.max(1) as u64).min(units.max(1));
    let chunk = units.div_ceil(workers);
    let ranges: Vec<Range<u64>> = (0..workers)
        .map(|w| (w * chunk).min(units)..((w + 1) * chunk).min(units))
        .filter(|r| !r.is_empty())
        .collect();
    if ranges.len() <= 1 {
        return ranges.into_iter().map(&f).collect();
    }
    thread::scope(|s| {
        let handles: Vec<_> = ranges.into_iter().map(|r| s.spawn(|| f(r))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}
