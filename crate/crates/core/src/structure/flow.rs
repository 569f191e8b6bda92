//! Exact max flow on the transportation network.
//!
//! Capacities are rationals scaled by the lcm of their denominators, so the
//! augmenting-path search runs on big integers.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Result of [`max_flow`]; all quantities are multiples of `1 / scale`.
#[derive(Debug, Clone)]
pub(crate) struct TransportFlow {
    pub rows: usize,
    pub cols: usize,
    /// `(i, j)` per support edge, in the order given.
    pub edges: Vec<(usize, usize)>,
    /// Flow per edge, scaled.
    pub flow: Vec<BigInt>,
    pub value: BigInt,
    pub scale: BigInt,
    /// Scaled total of the row capacities.
    pub supply: BigInt,
    /// Rows reachable from the source in the final residual network.
    pub reachable_rows: Vec<bool>,
}

impl TransportFlow {
    pub fn saturates(&self) -> bool {
        self.value == self.supply
    }

    pub fn edge_flow(&self, e: usize) -> BigRational {
        BigRational::new(self.flow[e].clone(), self.scale.clone())
    }
}

struct Arc {
    to: usize,
    cap: BigInt,
}

struct Network {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds `from -> to` and its reverse; returns the forward arc id.
    fn add(&mut self, from: usize, to: usize, cap: BigInt) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc {
            to: from,
            cap: BigInt::zero(),
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// BFS over arcs with positive residual capacity; returns parent arcs.
    fn bfs(&self, s: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if !seen[arc.to] && arc.cap.is_positive() {
                    seen[arc.to] = true;
                    parent[arc.to] = Some(a);
                    queue.push_back(arc.to);
                }
            }
        }
        parent
    }
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigInt {
    values.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

fn scaled(v: &BigRational, scale: &BigInt) -> BigInt {
    (v.numer() * scale) / v.denom()
}

/// Edmonds-Karp from a source feeding rows (capacity `mu`) through the
/// support edges (unbounded) into columns draining to a sink (capacity `nu`).
pub(crate) fn max_flow(
    rows: usize,
    cols: usize,
    edges: &[(usize, usize)],
    mu: &[BigRational],
    nu: &[BigRational],
) -> TransportFlow {
    let scale = lcm_of_denominators(mu.iter().chain(nu));
    let mu_s: Vec<BigInt> = mu.iter().map(|v| scaled(v, &scale)).collect();
    let nu_s: Vec<BigInt> = nu.iter().map(|v| scaled(v, &scale)).collect();
    let supply: BigInt = mu_s.iter().sum();
    let demand: BigInt = nu_s.iter().sum();
    // no edge can carry more than either side's total
    let unbounded: BigInt = supply.clone().max(demand) + BigInt::one();

    let (source, sink) = (rows + cols, rows + cols + 1);
    let mut net = Network::new(rows + cols + 2);
    for (i, c) in mu_s.iter().enumerate() {
        net.add(source, i, c.clone());
    }
    for (j, c) in nu_s.iter().enumerate() {
        net.add(rows + j, sink, c.clone());
    }
    let edge_arcs: Vec<usize> = edges
        .iter()
        .map(|&(i, j)| net.add(i, rows + j, unbounded.clone()))
        .collect();

    let mut value = BigInt::zero();
    loop {
        let parent = net.bfs(source);
        if parent[sink].is_none() {
            let reachable_rows = (0..rows).map(|i| parent[i].is_some()).collect();
            let flow = edge_arcs
                .iter()
                .map(|&a| net.arcs[a ^ 1].cap.clone())
                .collect();
            return TransportFlow {
                rows,
                cols,
                edges: edges.to_vec(),
                flow,
                value,
                scale,
                supply,
                reachable_rows,
            };
        }
        let mut path = Vec::new();
        let mut v = sink;
        while v != source {
            let a = parent[v].expect("on path");
            path.push(a);
            v = net.arcs[a ^ 1].to;
        }
        let push = path
            .iter()
            .map(|&a| &net.arcs[a].cap)
            .min()
            .expect("nonempty path")
            .clone();
        for &a in &path {
            net.arcs[a].cap -= &push;
            net.arcs[a ^ 1].cap += &push;
        }
        value += push;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn soules_network_saturates() {
        let f = max_flow(
            2,
            2,
            &[(0, 0), (0, 1), (1, 1)],
            &[q(1, 2), q(1, 2)],
            &[q(1, 2), q(1, 2)],
        );
        assert!(f.saturates());
        assert_eq!(f.edge_flow(0), q(1, 2));
        assert_eq!(f.edge_flow(1), q(0, 1));
        assert_eq!(f.edge_flow(2), q(1, 2));
    }

    #[test]
    fn deficient_network() {
        let f = max_flow(
            2,
            2,
            &[(0, 0), (1, 0), (1, 1)],
            &[q(7, 10), q(3, 10)],
            &[q(1, 2), q(1, 2)],
        );
        assert!(!f.saturates());
        assert_eq!(BigRational::new(f.value.clone(), f.scale.clone()), q(4, 5));
        assert_eq!(f.reachable_rows, vec![true, false]);
    }
}
