//! Brute-force oracles and instance builders for the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use eot_core::problem::{rational_marginals, CostMatrix, Edge, Problem};

pub fn dense(mu: &[f64], nu: &[f64], tau: f64, rows: &[&[Option<f64>]]) -> Problem {
    let values: Vec<Vec<Option<f64>>> = rows.iter().map(|r| r.to_vec()).collect();
    Problem::new(mu.to_vec(), nu.to_vec(), tau, CostMatrix::from_dense(&values).unwrap()).unwrap()
}

pub fn normalize(w: &[u32]) -> Vec<f64> {
    let total: u32 = w.iter().sum();
    w.iter().map(|&x| x as f64 / total as f64).collect()
}

/// Support edges of `p` as `(i, j)` pairs.
pub fn edges(p: &Problem) -> Vec<(usize, usize)> {
    p.cost().entries().iter().map(|e| (e.i, e.j)).collect()
}

/// Solves the transportation equalities on a forest by peeling leaves.
/// Returns the unique solution, or `None` when it is inconsistent or has a
/// negative entry.
fn solve_forest(
    m: usize,
    n: usize,
    forest: &[(usize, usize)],
    mu: &[BigRational],
    nu: &[BigRational],
) -> Option<Vec<BigRational>> {
    let mut residual: Vec<BigRational> = mu.iter().chain(nu).cloned().collect();
    let mut degree = vec![0usize; m + n];
    for &(i, j) in forest {
        degree[i] += 1;
        degree[m + j] += 1;
    }
    let mut value = vec![None; forest.len()];
    let mut open = forest.len();
    while open > 0 {
        let (e, leaf) = forest
            .iter()
            .enumerate()
            .filter(|(e, _)| value[*e].is_none())
            .find_map(|(e, &(i, j))| {
                if degree[i] == 1 {
                    Some((e, i))
                } else if degree[m + j] == 1 {
                    Some((e, m + j))
                } else {
                    None
                }
            })?;
        let (i, j) = forest[e];
        let other = if leaf == i { m + j } else { i };
        let x = residual[leaf].clone();
        if x.is_negative() {
            return None;
        }
        residual[leaf] = BigRational::zero();
        residual[other] = &residual[other] - &x;
        degree[i] -= 1;
        degree[m + j] -= 1;
        value[e] = Some(x);
        open -= 1;
    }
    residual.iter().all(Zero::is_zero).then(|| value.into_iter().map(Option::unwrap).collect())
}

fn is_forest(m: usize, n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..m + n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, m + j));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Outcome of exhaustive vertex enumeration of the transportation polytope.
pub struct PolytopeOracle {
    pub feasible: bool,
    /// Edges positive at some vertex.
    pub positive_somewhere: BTreeSet<(usize, usize)>,
    pub forced_zero: Vec<(usize, usize)>,
}

/// Enumerates every spanning forest of the support (at most 16 edges) and
/// keeps the basic solutions that are feasible.
pub fn polytope_oracle(p: &Problem) -> PolytopeOracle {
    let (mu, nu) = rational_marginals(p);
    let e = edges(p);
    assert!(e.len() <= 20, "oracle is exponential in the edge count");
    let (m, n) = (p.rows(), p.cols());
    let mut feasible = false;
    let mut positive = BTreeSet::new();
    for mask in 0u32..(1 << e.len()) {
        let subset: Vec<(usize, usize)> = (0..e.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| e[b])
            .collect();
        if subset.len() > m + n - 1 || !is_forest(m, n, &subset) {
            continue;
        }
        if let Some(x) = solve_forest(m, n, &subset, &mu, &nu) {
            feasible = true;
            for (edge, v) in subset.iter().zip(&x) {
                if v.is_positive() {
                    positive.insert(*edge);
                }
            }
        }
    }
    let forced_zero = e.iter().copied().filter(|x| !positive.contains(x)).collect();
    PolytopeOracle {
        feasible,
        positive_somewhere: positive,
        forced_zero,
    }
}

/// Smallest nonzero `|mu(I) - nu(J)|` over all subset pairs.
pub fn brute_delta(p: &Problem) -> BigRational {
    let (mu, nu) = rational_marginals(p);
    let sums = |v: &[BigRational]| -> Vec<BigRational> {
        (0u32..(1 << v.len()))
            .map(|mask| {
                (0..v.len())
                    .filter(|b| mask >> b & 1 == 1)
                    .fold(BigRational::zero(), |a, b| a + &v[b])
            })
            .collect()
    };
    let (a, b) = (sums(&mu), sums(&nu));
    let mut best: Option<BigRational> = None;
    for x in &a {
        for y in &b {
            let d = (x - y).abs();
            if !d.is_zero() && best.as_ref().is_none_or(|cur| d < *cur) {
                best = Some(d);
            }
        }
    }
    best.expect("the empty set against a full side is always a nonzero gap")
}

/// Instance with every row and column covered, integer-weight marginals and
/// costs in `[-2, 2]`.
pub fn arb_problem(max_side: usize) -> impl Strategy<Value = Problem> {
    (1..=max_side, 1..=max_side)
        .prop_flat_map(|(m, n)| {
            (
                Just((m, n)),
                proptest::collection::vec(any::<bool>(), m * n),
                proptest::collection::vec(-2.0f64..2.0, m * n),
                proptest::collection::vec(1u32..10, m),
                proptest::collection::vec(1u32..10, n),
                0.2f64..3.0,
            )
        })
        .prop_map(|((m, n), mask, costs, wm, wn, tau)| {
            let mut keep = mask;
            for i in 0..m.max(n) {
                keep[(i % m) * n + i % n] = true;
            }
            let entries = (0..m * n)
                .filter(|&x| keep[x])
                .map(|x| Edge {
                    i: x / n,
                    j: x % n,
                    c: costs[x],
                })
                .collect();
            Problem::new(
                normalize(&wm),
                normalize(&wn),
                tau,
                CostMatrix::new(m, n, entries).unwrap(),
            )
            .unwrap()
        })
}

/// Potentials with entries in `[-scale, scale]` sized for `p`.
pub fn arb_potentials(p: &Problem, scale: f64) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        proptest::collection::vec(-scale..scale, p.rows()),
        proptest::collection::vec(-scale..scale, p.cols()),
    )
}

/// Feasible instance: marginals are the row and column sums of a random
/// nonnegative integer plan on the support, so some support edges may be
/// forced to zero.
pub fn arb_feasible(max_side: usize) -> impl Strategy<Value = Problem> {
    (1..=max_side, 1..=max_side)
        .prop_flat_map(|(m, n)| {
            (
                Just((m, n)),
                proptest::collection::vec(any::<bool>(), m * n),
                proptest::collection::vec(0u32..4, m * n),
                proptest::collection::vec(-1.0f64..1.0, m * n),
            )
        })
        .prop_map(|((m, n), mask, weights, costs)| {
            let mut keep = mask;
            let mut w = weights;
            for i in 0..m.max(n) {
                let x = (i % m) * n + i % n;
                keep[x] = true;
                w[x] = w[x].max(1);
            }
            let mut rows = vec![0u32; m];
            let mut cols = vec![0u32; n];
            let mut entries = Vec::new();
            for x in (0..m * n).filter(|&x| keep[x]) {
                let (i, j) = (x / n, x % n);
                rows[i] += w[x];
                cols[j] += w[x];
                entries.push(Edge { i, j, c: costs[x] });
            }
            Problem::new(
                normalize(&rows),
                normalize(&cols),
                1.0,
                CostMatrix::new(m, n, entries).unwrap(),
            )
            .unwrap()
        })
}
