//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) independent work items run on the
//! rayon pool. Results are always collected in input order, so output does
//! not depend on the worker count.

/// Execution strategy for independent work items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// `Parallel` only when the crate was built with the `parallel` feature.
    pub fn effective(self) -> Exec {
        if cfg!(feature = "parallel") {
            self
        } else {
            Exec::Sequential
        }
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_slice<I, R, F>(exec: Exec, items: &[I], f: F) -> Vec<R>
where
    I: Sync,
    R: Send,
    F: Fn(&I) -> R + Sync + Send,
{
    match exec.effective() {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec.effective() {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Runs two independent closures, concurrently under `Parallel`.
pub fn join<A, B, RA, RB>(exec: Exec, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    match exec.effective() {
        #[cfg(feature = "parallel")]
        Exec::Parallel => rayon::join(a, b),
        _ => (a(), b()),
    }
}

/// Runs `f` with at most `workers` threads available to [`map_slice`] and
/// [`map_range`]. `None` keeps the global pool.
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            return pool.install(f);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_slice(Exec::Sequential, &items, |x| x * x);
        let par = map_slice(Exec::Parallel, &items, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(map_range(Exec::Parallel, 5, |i| i + 1), vec![1, 2, 3, 4, 5]);
        assert_eq!(join(Exec::Parallel, || 1, || "b"), (1, "b"));
    }

    #[test]
    fn worker_pool_runs_closure() {
        let v = with_workers(Some(2), || map_range(Exec::Parallel, 10, |i| i * 2));
        assert_eq!(v.iter().sum::<usize>(), 90);
    }
}
