//! Thin dispatch layer between the rayon data-parallel kernels and the
//! sequential fallback. All call sites are written so that the result is
//! bit-identical regardless of schedule or feature selection: work is split
//! into fixed chunks and any reduction combines chunk results in index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Run `f(chunk_index, chunk)` over fixed-size mutable chunks.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    debug_assert!(chunk > 0);
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Map indices `0..n` to values of a fixed-size record written into `out`,
/// one record per index.
pub fn fill_records<T, F>(out: &mut [T], record: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    for_each_chunk_mut(out, record, f);
}

/// Deterministic fold over fixed chunks of `0..n`: each chunk produces a
/// partial via `map`, partials are combined strictly in chunk order.
pub fn ordered_chunk_fold<A, F>(n: usize, chunk: usize, map: F) -> Vec<A>
where
    A: Send,
    F: Fn(std::ops::Range<usize>) -> A + Sync + Send,
{
    debug_assert!(chunk > 0);
    let ranges: Vec<std::ops::Range<usize>> =
        (0..n).step_by(chunk).map(|s| s..(s + chunk).min(n)).collect();
    #[cfg(feature = "parallel")]
    {
        ranges.into_par_iter().map(map).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ranges.into_iter().map(map).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_fill_covers_everything() {
        let mut v = vec![0usize; 37];
        for_each_chunk_mut(&mut v, 5, |i, c| {
            for (k, x) in c.iter_mut().enumerate() {
                *x = i * 5 + k;
            }
        });
        assert!(v.iter().enumerate().all(|(i, &x)| x == i));
    }

    #[test]
    fn ordered_fold_is_in_order() {
        let parts = ordered_chunk_fold(10, 3, |r| r.sum::<usize>());
        assert_eq!(parts, vec![3, 12, 21, 9]);
    }
}
