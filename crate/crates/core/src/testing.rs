//! Small fixed instances shared by unit tests.

use crate::problem::{CostMatrix, Edge, Problem};

pub(crate) use crate::generate::soules;

pub(crate) fn problem_from_dense<const N: usize>(
    mu: &[f64],
    nu: &[f64],
    tau: f64,
    values: &[[Option<f64>; N]],
) -> Problem {
    let rows: Vec<Vec<Option<f64>>> = values.iter().map(|r| r.to_vec()).collect();
    let cost = CostMatrix::from_dense(&rows).unwrap();
    Problem::new(mu.to_vec(), nu.to_vec(), tau, cost).unwrap()
}

/// `n x n`, zero cost everywhere, uniform marginals, `tau = 1`.
pub(crate) fn uniform_square(n: usize) -> Problem {
    let entries = (0..n)
        .flat_map(|i| (0..n).map(move |j| Edge { i, j, c: 0.0 }))
        .collect();
    let w = vec![1.0 / n as f64; n];
    Problem::new(w.clone(), w, 1.0, CostMatrix::new(n, n, entries).unwrap()).unwrap()
}

/// `1 x 1`, `C = 0`, `tau = 1`.
pub(crate) fn trivial() -> Problem {
    uniform_square(1)
}
