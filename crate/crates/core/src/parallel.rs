//! Switch between the rayon-backed and the plain sequential code paths.
//!
//! Without the `parallel` feature both modes run sequentially.

/// How fan-out loops (residue classes, digit strings) are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecutionMode {
    Sequential,
    #[default]
    Parallel,
}

/// Maps `f` over `items`, preserving order.
pub fn map_collect<T, R, F>(mode: ExecutionMode, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecutionMode::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
        _ => items.into_iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let a = map_collect(ExecutionMode::Sequential, items.clone(), |x| x * x);
        let b = map_collect(ExecutionMode::Parallel, items, |x| x * x);
        assert_eq!(a, b);
    }
}
