//! Seeded fixtures shared by the benchmarks.

use eot_core::{gen_instance, GenKind, GenSpec, Problem};

/// Full-support instance of size `n x n`.
pub fn positive(n: usize, seed: u64) -> Problem {
    gen_instance(&GenSpec::new(GenKind::Positive, n, n, seed)).expect("valid spec")
}

/// Exactly scalable, sparse instance of size `n x n`.
pub fn exact(n: usize, seed: u64) -> Problem {
    gen_instance(&GenSpec::new(GenKind::Exact, n, n, seed)).expect("valid spec")
}

/// Block chain of the given depth on `n x n`.
pub fn chain(depth: usize, n: usize, seed: u64) -> Problem {
    gen_instance(&GenSpec::chain(depth, n, n, seed)).expect("valid spec")
}
