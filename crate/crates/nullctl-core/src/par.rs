//! Data-parallel map with a sequential fallback.
//!
//! Grid evaluations, parameter sweeps and batch simulations are
//! embarrassingly parallel; they all funnel through [`par_map`] so the
//! `parallel` feature is the single switch between rayon and plain
//! iteration. Output order always matches input order, keeping results
//! deterministic under either build.

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_input_order() {
        let out = par_map((0..1000).collect::<Vec<_>>(), |i| 2 * i);
        assert_eq!(out, (0..1000).map(|i| 2 * i).collect::<Vec<_>>());
    }
}
