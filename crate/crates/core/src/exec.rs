//! Execution strategy for data-parallel loops.
//!
//! Work is always split into chunks whose boundaries depend only on the
//! problem size; partial results come back in chunk order. Switching between
//! [`Exec::Parallel`] and [`Exec::Sequential`] therefore never changes a
//! result bit.

use num_complex::Complex64;

use crate::sum::{tree_reduce, ComplexNeumaier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    /// Rayon fork-join. Falls back to sequential when the `parallel` feature
    /// is disabled.
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

/// Chunk length used for sums over modes. Even, so that paired modes never
/// straddle a chunk boundary.
pub const MODE_CHUNK: usize = 256;

/// Chunk length for mode-parallel time stepping: at most 64 chunks, each at
/// least 16 modes, rounded up to an even count.
pub fn stepping_chunk(n_modes: usize) -> usize {
    let c = n_modes.div_ceil(64).max(16);
    c + (c & 1)
}

impl Exec {
    /// Applies `f` to consecutive `chunk`-sized slices, returning results in
    /// slice order.
    pub fn map_chunks<T, R, F>(self, items: &[T], chunk: usize, f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &[T]) -> R + Sync + Send,
    {
        let chunk = chunk.max(1);
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel if items.len() > chunk => {
                use rayon::prelude::*;
                items
                    .par_chunks(chunk)
                    .enumerate()
                    .map(|(i, c)| f(i * chunk, c))
                    .collect()
            }
            _ => items.chunks(chunk).enumerate().map(|(i, c)| f(i * chunk, c)).collect(),
        }
    }

    /// Maps `f` over `0..n` preserving order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel if n > 1 => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Compensated sum of `term(i)` over `0..n`, chunked by [`MODE_CHUNK`] and
    /// reduced by a pairwise tree.
    pub fn sum_indexed<F>(self, n: usize, term: F) -> Complex64
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        if n <= MODE_CHUNK {
            return (0..n).map(&term).collect::<ComplexNeumaier>().total();
        }
        let n_chunks = n.div_ceil(MODE_CHUNK);
        let parts = self.map_range(n_chunks, |ci| {
            let lo = ci * MODE_CHUNK;
            let hi = (lo + MODE_CHUNK).min(n);
            (lo..hi).map(&term).collect::<ComplexNeumaier>()
        });
        tree_reduce(parts, |a, b| a.merge(b)).total()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_parallel_sums_are_bitwise_equal() {
        let term = |i: usize| Complex64::new((i as f64).sin() * 1e3, 1.0 / (1.0 + i as f64));
        let a = Exec::Sequential.sum_indexed(100_003, term);
        let b = Exec::Parallel.sum_indexed(100_003, term);
        assert_eq!(a, b);
    }

    #[test]
    fn map_chunks_preserves_offsets() {
        let v: Vec<usize> = (0..1000).collect();
        let offs = Exec::Parallel.map_chunks(&v, 100, |off, c| (off, c[0]));
        for (off, first) in offs {
            assert_eq!(off, first);
        }
    }

    #[test]
    fn stepping_chunk_is_even_and_bounded() {
        for n in [0, 1, 15, 100, 10_000, 1_000_001] {
            let c = stepping_chunk(n);
            assert!(c.is_multiple_of(2) && c >= 16);
            assert!(n.div_ceil(c) <= 64);
        }
    }
}
