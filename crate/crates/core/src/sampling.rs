//! Seeded, thread-count-independent random streams.
//!
//! Work is cut into fixed batches of [`BATCH`] draws. Batch `b` always uses
//! stream `b` of the root seed, so the output is the same for any number of
//! worker threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{arg, Result};

/// Draws per stream.
pub const BATCH: usize = 256;

/// Environment variable that overrides the worker count.
pub const THREADS_ENV: &str = "PMTHERM_THREADS";

/// Independent generator for `(root, stream)`.
pub fn stream_rng(root: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream);
    rng
}

/// Worker count from [`THREADS_ENV`], or `None` for the rayon default.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Position of one draw: `stream_id` is the batch, `draw_id` the index inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DrawId {
    pub stream_id: u64,
    pub draw_id: u64,
}

/// Runs `f` for `n` draws and returns results in draw order.
///
/// `threads = None` falls back to [`threads_from_env`], then to rayon's default.
pub fn run_batched<T, F>(n: usize, root: u64, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, DrawId) -> Result<T> + Sync,
{
    let batches = n.div_ceil(BATCH);
    let work = |b: usize| -> Result<Vec<T>> {
        let mut rng = stream_rng(root, b as u64);
        let len = BATCH.min(n - b * BATCH);
        (0..len)
            .map(|k| {
                f(
                    &mut rng,
                    DrawId {
                        stream_id: b as u64,
                        draw_id: k as u64,
                    },
                )
            })
            .collect()
    };
    let threads = threads.or_else(threads_from_env);
    let chunks: Vec<Result<Vec<T>>> = match threads {
        Some(1) => (0..batches).map(work).collect(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| arg(format!("cannot build thread pool: {e}")))?
            .install(|| (0..batches).into_par_iter().map(work).collect()),
        None => (0..batches).into_par_iter().map(work).collect(),
    };
    let mut out = Vec::with_capacity(n);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Inverse-CDF pick over `weights` in order. A draw landing exactly on a
/// boundary goes to the lower index; zero-weight entries are never chosen.
///
/// `u` is uniform on `[0, 1)`. Returns `None` when every weight is zero.
pub fn pick(weights: &[f64], u: f64) -> Option<usize> {
    let total: f64 = weights.iter().filter(|w| **w > 0.0).sum();
    if total <= 0.0 {
        return None;
    }
    let target = u * total;
    let mut acc = 0.0;
    let mut last = None;
    for (k, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(k);
        if target <= acc && target < total {
            return Some(k);
        }
    }
    last
}

/// [`pick`] with a fresh uniform from `rng`.
pub fn pick_with<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    pick(weights, rng.random::<f64>())
}
