//! Deterministic parallel character sweeps: work is distributed over a rayon
//! pool but results are always collected and reduced in character-index
//! order, so the worker count never changes any output.

use rayon::prelude::*;

use crate::error::Result;

/// Run `f` inside a dedicated rayon pool with the given number of workers.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("rayon pool")
        .install(f)
}

/// Map a fallible job over character indices in parallel; the output vector
/// is in input order.
pub fn par_map_indices<T, F>(indices: &[u64], f: F) -> Vec<(u64, Result<T>)>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    indices.par_iter().map(|&j| (j, f(j))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_deterministic() {
        let idx: Vec<u64> = (1..200).collect();
        let a = with_workers(1, || par_map_indices(&idx, |j| Ok(j * j)));
        let b = with_workers(4, || par_map_indices(&idx, |j| Ok(j * j)));
        let av: Vec<_> = a.into_iter().map(|(j, r)| (j, r.unwrap())).collect();
        let bv: Vec<_> = b.into_iter().map(|(j, r)| (j, r.unwrap())).collect();
        assert_eq!(av, bv);
    }
}
