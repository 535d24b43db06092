//! Execution policy for the data-parallel loops of the crate.

use serde::{Deserialize, Serialize};

/// Selects between the rayon-backed and the plain sequential loop.
///
/// `Parallel` silently degrades to sequential when the crate is built without
/// the `parallel` feature. Both paths produce identical results: every
/// parallel loop writes to its own output slot and reductions happen
/// afterwards in index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
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

    /// Maps `f` over a slice, preserving order.
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

    /// Writes `out[i] = f(i)` for every slot.
    pub fn fill<F>(self, out: &mut [f64], f: F)
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel if out.len() >= PAR_FILL_THRESHOLD => {
                use rayon::prelude::*;
                out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
            }
            _ => out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i)),
        }
    }

    /// In-place `out[i] = f(i, out[i])`.
    pub fn update<F>(self, out: &mut [f64], f: F)
    where
        F: Fn(usize, f64) -> f64 + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel if out.len() >= PAR_FILL_THRESHOLD => {
                use rayon::prelude::*;
                out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i, *o));
            }
            _ => out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i, *o)),
        }
    }

    /// Dot product with a fixed chunking, so the rounding does not depend on
    /// the policy or the thread count.
    pub fn dot(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let chunks = a.len().div_ceil(DOT_CHUNK);
        let partial = |c: usize| {
            let lo = c * DOT_CHUNK;
            let hi = (lo + DOT_CHUNK).min(a.len());
            a[lo..hi].iter().zip(&b[lo..hi]).map(|(x, y)| x * y).sum::<f64>()
        };
        let parts = if chunks >= 4 { self.map_range(chunks, partial) } else {
            (0..chunks).map(partial).collect()
        };
        parts.into_iter().sum()
    }
}

const DOT_CHUNK: usize = 2048;

/// Caps the global rayon pool at `threads` workers. Returns `false` when the
/// pool was already initialized or the crate is built without `parallel`.
pub fn init_pool(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

// Below this length the rayon split overhead dominates a sparse row product.
#[cfg(feature = "parallel")]
const PAR_FILL_THRESHOLD: usize = 4096;
