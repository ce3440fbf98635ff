//! Deterministic task execution, parallel or serial.
//!
//! Campaign work is expressed as a pure function of a task index; results
//! are merged in index order so the output does not depend on scheduling
//! or on the number of worker threads. With the `parallel` feature the
//! map runs on the current rayon pool, otherwise it is a plain iterator.

/// Map `f` over `0..n` and collect results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Serial variant, kept available under all feature sets so benches can
/// compare the two paths directly.
pub fn map_indexed_serial<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_serial_agree_in_order() {
        let a = map_indexed(128, |i| i * i);
        let b = map_indexed_serial(128, |i| i * i);
        assert_eq!(a, b);
    }
}
