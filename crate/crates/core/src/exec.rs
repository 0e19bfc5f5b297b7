//! Execution strategy for the data-parallel loops (mask enumeration,
//! randomized audits, batch checks).
//!
//! With the `parallel` feature the [`Exec::Parallel`] strategy runs on the
//! rayon global pool; without it every strategy degrades to a plain
//! sequential loop. Results are always collected in input order, so the
//! output never depends on the strategy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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
    /// `true` when this strategy actually fans out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Ordered `filter_map` over `range`.
    pub fn filter_map_range<T, F>(self, range: std::ops::Range<usize>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> Option<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return range.into_par_iter().filter_map(f).collect();
        }
        range.filter_map(f).collect()
    }

    /// Ordered `map` over `range`.
    pub fn map_range<T, F>(self, range: std::ops::Range<usize>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.filter_map_range(range, |i| Some(f(i)))
    }

    /// Ordered `map` over a slice.
    pub fn map_slice<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_and_keep_order() {
        let f = |i: usize| if i.is_multiple_of(3) { None } else { Some(i * i) };
        let seq = Exec::Sequential.filter_map_range(0..1000, f);
        let par = Exec::Parallel.filter_map_range(0..1000, f);
        assert_eq!(seq, par);
        assert!(seq.windows(2).all(|w| w[0] < w[1]));
    }
}
