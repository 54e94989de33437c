//! Parallel map over independent simulations.
//!
//! Parallelism is only exploited across independent runs (sweep points,
//! ion-number batches), never inside one integration. With the `parallel`
//! feature disabled, [`map_grid`] degrades to the sequential path.

/// Cap on the worker pool, read from `DARKCOOL_THREADS`.
pub fn configured_threads() -> Option<usize> {
    std::env::var("DARKCOOL_THREADS").ok().and_then(|s| s.parse().ok()).filter(|&n| n > 0)
}

#[cfg(feature = "parallel")]
mod imp {
    use std::sync::OnceLock;

    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

    fn pool() -> &'static rayon::ThreadPool {
        POOL.get_or_init(|| {
            let mut b = rayon::ThreadPoolBuilder::new();
            if let Some(n) = super::configured_threads() {
                b = b.num_threads(n);
            }
            b.build().expect("worker pool")
        })
    }

    /// Ordered parallel map.
    pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        use rayon::prelude::*;
        pool().install(|| items.par_iter().map(|x| f(x)).collect())
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    /// Ordered map, sequential fallback.
    pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        items.iter().map(f).collect()
    }
}

pub use imp::map_grid;

/// Sequential map with the same signature, kept available for benchmarks
/// comparing against the parallel path.
pub fn map_grid_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_grid_preserves_order() {
        let xs: Vec<u64> = (0..100).collect();
        let ys = map_grid(&xs, |x| x * x);
        let ref_ys: Vec<u64> = xs.iter().map(|x| x * x).collect();
        assert_eq!(ys, ref_ys);
        assert_eq!(map_grid_seq(&xs, |x| x * x), ref_ys);
    }
}
