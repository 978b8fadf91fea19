//! Deterministic block-parallel map over `std::thread::scope`.
//!
//! Work is cut into fixed-size blocks; each block draws from its own RNG
//! substream and results are stitched back in block order, so the output does
//! not depend on the number of threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Resolves a thread-count request; `0` means "all available cores".
pub fn resolve_threads(requested: usize) -> usize {
    if requested > 0 {
        return requested;
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Applies `f(block_index, start, end)` to every block of `[0, total)` and
/// concatenates the per-block outputs in block order.
pub fn map_blocks<T, F>(total: usize, block: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize, usize) -> Vec<T> + Sync,
{
    let block = block.max(1);
    let nblocks = total.div_ceil(block);
    let threads = resolve_threads(threads).min(nblocks.max(1));
    let run = |b: usize| f(b, b * block, ((b + 1) * block).min(total));
    if threads <= 1 {
        return (0..nblocks).flat_map(run).collect();
    }
    let slots: Vec<Mutex<Option<Vec<T>>>> = (0..nblocks).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let b = next.fetch_add(1, Ordering::Relaxed);
                if b >= nblocks {
                    break;
                }
                let out = run(b);
                *slots[b].lock().expect("worker panicked") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .flat_map(|m| m.into_inner().expect("worker panicked").unwrap_or_default())
        .collect()
}
