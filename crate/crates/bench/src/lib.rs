//! Fixed inputs for the benchmarks, so every run measures the same work.

use schreier_core::banach::Vector;
use schreier_core::{FinSet, Ordinal};

pub fn ordinal(s: &str) -> Ordinal {
    s.parse().expect("valid ordinal literal")
}

/// Levels from finite to nested limits.
pub fn levels() -> Vec<(&'static str, Ordinal)> {
    ["1", "3", "w", "w*2+3", "w^2", "w^3"].iter().map(|s| (*s, ordinal(s))).collect()
}

/// Intervals `{n..n+len-1}` and a spread set of the same size.
pub fn sample_sets(n: u64, len: u64) -> Vec<FinSet> {
    let spread: Vec<u64> = (0..len).map(|i| n + i * i).collect();
    vec![FinSet::interval(n, n + len - 1), FinSet::new(spread).expect("ascending")]
}

/// Deterministic pseudo-random coefficients in `[-1, 1]` on `{1..n}`.
pub fn sample_vector(n: u64, seed: u64) -> Vector<f64> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let values: Vec<f64> = (0..n)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect();
    Vector::from_dense(&values)
}
