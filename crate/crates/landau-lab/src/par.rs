use rayon::prelude::*;

const CHUNK: usize = 4096;

/// `Σ_{i<len} f(i)` in parallel with a fixed summation order, so results
/// do not depend on the thread count or on work stealing.
pub(crate) fn psum(len: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    let partial: Vec<f64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(len)).map(&f).sum())
        .collect();
    partial.iter().sum()
}

#[cfg(test)]
mod tests {
    #[test]
    fn matches_sequential_order() {
        let f = |i: usize| 1.0 / (1.0 + i as f64);
        let a = super::psum(100_000, f);
        let b = super::psum(100_000, f);
        assert_eq!(a.to_bits(), b.to_bits());
        assert!((a - (0..100_000).map(f).sum::<f64>()).abs() < 1e-10);
    }
}
