//! Row-parallel helpers. With the `parallel` feature these run on the rayon
//! pool, otherwise they fall back to plain iteration. Reductions always
//! combine per-row partials in a fixed order so results do not depend on the
//! number of worker threads.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f(row_index, row)` to consecutive chunks of `row_len` elements.
pub fn for_each_row<T, F>(data: &mut [T], row_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(row_len).enumerate().for_each(|(i, row)| f(i, row));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(row_len).enumerate().for_each(|(i, row)| f(i, row));
}

/// Evaluates `f` on `0..n`, keeping the results in index order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Element-wise `out[i] = f(i, out[i])`, parallel over rows of `row_len`.
pub fn update<T, F>(data: &mut [T], row_len: usize, f: F)
where
    T: Send + Copy,
    F: Fn(usize, T) -> T + Sync + Send,
{
    for_each_row(data, row_len, |r, row| {
        let base = r * row_len;
        for (k, x) in row.iter_mut().enumerate() {
            *x = f(base + k, *x);
        }
    });
}

/// Pairwise summation; deterministic for a given input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sum of `f(k)` over `0..len`, accumulated pairwise inside rows of
/// `row_len` and then pairwise across the row partials.
pub fn sum_by_rows<F>(len: usize, row_len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let rows = len.div_ceil(row_len);
    let partials = map_range(rows, |r| {
        let lo = r * row_len;
        let hi = (lo + row_len).min(len);
        let vals: Vec<f64> = (lo..hi).map(&f).collect();
        pairwise_sum(&vals)
    });
    pairwise_sum(&partials)
}

/// Number of worker threads the current pool would use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs `f` on a dedicated pool of `threads` workers.
///
/// Without the `parallel` feature this just calls `f`.
pub fn install<R, F>(threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

/// Sizes the global pool. Returns false if it was already initialised.
pub fn init_global(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global().is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
    }

    #[test]
    fn sum_by_rows_independent_of_pool() {
        let f = |k: usize| ((k as f64) * 0.37).sin();
        let a = install(1, || sum_by_rows(10_007, 64, f));
        let b = install(4, || sum_by_rows(10_007, 64, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
