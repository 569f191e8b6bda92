//! Problem instances: marginals, regularization and a sparse extended-real cost.
//!
//! Absent cost entries stand for `C_ij = +inf`; the edge set `E` is the set of
//! stored entries. All downstream modules assume a [`Problem`] that passed
//! [`validate`].

mod delta;
mod document;
mod rational;

use std::fmt;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::kernels::log_sum_exp;

pub use delta::{compute_delta, Delta, DeltaLimits};
pub use document::{parse_problem, serialize_problem, CostDocument, ProblemDocument};
pub use rational::{rational_marginals, snap_to_rational, MAX_DENOMINATOR};
pub(crate) use rational::ratio_to_f64;

/// Absolute tolerance on `sum(mu) = 1` and `sum(nu) = 1`.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// One finite entry of the cost matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub c: f64,
}

/// Sparse cost matrix stored row-major, with a column index on the side.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    /// Sorted by `(i, j)`.
    entries: Vec<Edge>,
    row_ptr: Vec<usize>,
    /// Entry ids sorted by `(j, i)`.
    col_order: Vec<usize>,
    col_ptr: Vec<usize>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<Edge>) -> Result<Self> {
        for e in &entries {
            if e.i >= rows || e.j >= cols {
                return Err(Error::IndexOutOfRange {
                    i: e.i,
                    j: e.j,
                    rows,
                    cols,
                });
            }
            if !e.c.is_finite() {
                return Err(Error::NonFiniteCost {
                    i: e.i,
                    j: e.j,
                    value: e.c,
                });
            }
        }
        entries.sort_by_key(|e| (e.i, e.j));
        if let Some(w) = entries.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::DuplicateEntry {
                i: w[0].i,
                j: w[0].j,
            });
        }

        let mut row_ptr = vec![0; rows + 1];
        let mut col_ptr = vec![0; cols + 1];
        for e in &entries {
            row_ptr[e.i + 1] += 1;
            col_ptr[e.j + 1] += 1;
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        for c in 0..cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        let mut col_order: Vec<usize> = (0..entries.len()).collect();
        // stable: ties keep ascending row order
        col_order.sort_by_key(|&k| entries[k].j);

        Ok(Self {
            rows,
            cols,
            entries,
            row_ptr,
            col_order,
            col_ptr,
        })
    }

    /// Builds a sparse matrix from dense rows; `None` marks an absent edge.
    pub fn from_dense(values: &[Vec<Option<f64>>]) -> Result<Self> {
        let rows = values.len();
        let cols = values.first().map_or(0, Vec::len);
        let mut entries = Vec::new();
        for (i, row) in values.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "dense row {i} has {} values, expected {cols}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if let Some(c) = *v {
                    entries.push(Edge { i, j, c });
                }
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of finite entries, `|E|`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All edges in ascending `(i, j)` order.
    pub fn entries(&self) -> &[Edge] {
        &self.entries
    }

    /// Edges of row `i`, ascending in `j`.
    pub fn row(&self, i: usize) -> &[Edge] {
        &self.entries[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Position of row `i`'s edges in [`entries`](Self::entries).
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    /// Entry ids of column `j`, ascending in `i`.
    pub fn col_ids(&self, j: usize) -> &[usize] {
        &self.col_order[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    /// Edges of column `j`, ascending in `i`.
    pub fn col(&self, j: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.col_ids(j).iter().map(move |&k| &self.entries[k])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let row = self.row(i);
        row.binary_search_by_key(&j, |e| e.j).ok().map(|k| row[k].c)
    }

    /// Index of edge `(i, j)` in [`entries`](Self::entries).
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let row = self.row(i);
        row.binary_search_by_key(&j, |e| e.j)
            .ok()
            .map(|k| self.row_ptr[i] + k)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.position(i, j).is_some()
    }

    pub fn max_cost(&self) -> f64 {
        self.entries.iter().map(|e| e.c).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_cost(&self) -> f64 {
        self.entries.iter().map(|e| e.c).fold(f64::INFINITY, f64::min)
    }

    /// True when every `(i, j)` pair carries a finite cost.
    pub fn is_full(&self) -> bool {
        self.entries.len() == self.rows * self.cols
    }
}

/// A marginal pair, a regularization strength and a sparse cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    mu: Vec<f64>,
    nu: Vec<f64>,
    tau: f64,
    cost: CostMatrix,
    log_mu: Vec<f64>,
    log_nu: Vec<f64>,
}

impl Problem {
    /// Checks shapes only; use [`validate`] for the remaining invariants.
    pub fn new(mu: Vec<f64>, nu: Vec<f64>, tau: f64, cost: CostMatrix) -> Result<Self> {
        if mu.len() != cost.rows() {
            return Err(Error::Dimension(format!(
                "mu has {} entries but the cost has {} rows",
                mu.len(),
                cost.rows()
            )));
        }
        if nu.len() != cost.cols() {
            return Err(Error::Dimension(format!(
                "nu has {} entries but the cost has {} columns",
                nu.len(),
                cost.cols()
            )));
        }
        let log_mu = mu.iter().map(|x| x.ln()).collect();
        let log_nu = nu.iter().map(|x| x.ln()).collect();
        Ok(Self {
            mu,
            nu,
            tau,
            cost,
            log_mu,
            log_nu,
        })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn cost(&self) -> &CostMatrix {
        &self.cost
    }

    pub fn rows(&self) -> usize {
        self.cost.rows()
    }

    pub fn cols(&self) -> usize {
        self.cost.cols()
    }

    pub(crate) fn log_mu(&self) -> &[f64] {
        &self.log_mu
    }

    pub(crate) fn log_nu(&self) -> &[f64] {
        &self.log_nu
    }

    pub fn mu_min(&self) -> f64 {
        self.mu.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn nu_min(&self) -> f64 {
        self.nu.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Restriction to `rows x cols` with the marginals divided by `scale`.
    ///
    /// Index order follows the given slices. Edges leaving the selection are
    /// dropped.
    pub fn restrict(&self, rows: &[usize], cols: &[usize], scale: f64) -> Result<Problem> {
        let mut col_pos = vec![usize::MAX; self.cols()];
        for (b, &j) in cols.iter().enumerate() {
            col_pos[j] = b;
        }
        let mut entries = Vec::new();
        for (a, &i) in rows.iter().enumerate() {
            for e in self.cost.row(i) {
                if col_pos[e.j] != usize::MAX {
                    entries.push(Edge {
                        i: a,
                        j: col_pos[e.j],
                        c: e.c,
                    });
                }
            }
        }
        let cost = CostMatrix::new(rows.len(), cols.len(), entries)?;
        let mu = rows.iter().map(|&i| self.mu[i] / scale).collect();
        let nu = cols.iter().map(|&j| self.nu[j] / scale).collect();
        Problem::new(mu, nu, self.tau, cost)
    }
}

/// A single invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MuSum(f64),
    NuSum(f64),
    NonPositiveMu { index: usize, value: f64 },
    NonPositiveNu { index: usize, value: f64 },
    NonPositiveTau(f64),
    IsolatedRow(usize),
    IsolatedCol(usize),
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MuSum(s) => write!(f, "marginal sum != 1: sum(mu) = {s}"),
            Violation::NuSum(s) => write!(f, "marginal sum != 1: sum(nu) = {s}"),
            Violation::NonPositiveMu { index, value } => {
                write!(f, "nonpositive marginal: mu[{index}] = {value}")
            }
            Violation::NonPositiveNu { index, value } => {
                write!(f, "nonpositive marginal: nu[{index}] = {value}")
            }
            Violation::NonPositiveTau(t) => write!(f, "nonpositive tau: {t}"),
            Violation::IsolatedRow(i) => write!(f, "isolated vertex: row {i} has no finite cost"),
            Violation::IsolatedCol(j) => {
                write!(f, "isolated vertex: column {j} has no finite cost")
            }
            Violation::Disconnected { components } => {
                write!(f, "disconnected support: {components} connected components")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Reports every violated invariant; an empty report means `p` is valid.
pub fn validate(p: &Problem) -> ValidationReport {
    let mut violations = Vec::new();

    let mu_sum: f64 = p.mu.iter().sum();
    if !((mu_sum - 1.0).abs() <= SIMPLEX_TOL) {
        violations.push(Violation::MuSum(mu_sum));
    }
    let nu_sum: f64 = p.nu.iter().sum();
    if !((nu_sum - 1.0).abs() <= SIMPLEX_TOL) {
        violations.push(Violation::NuSum(nu_sum));
    }
    for (index, &value) in p.mu.iter().enumerate() {
        if !(value > 0.0) {
            violations.push(Violation::NonPositiveMu { index, value });
        }
    }
    for (index, &value) in p.nu.iter().enumerate() {
        if !(value > 0.0) {
            violations.push(Violation::NonPositiveNu { index, value });
        }
    }
    if !(p.tau > 0.0) || !p.tau.is_finite() {
        violations.push(Violation::NonPositiveTau(p.tau));
    }

    let (m, n) = (p.rows(), p.cols());
    let mut isolated = false;
    for i in 0..m {
        if p.cost.row(i).is_empty() {
            violations.push(Violation::IsolatedRow(i));
            isolated = true;
        }
    }
    for j in 0..n {
        if p.cost.col_ids(j).is_empty() {
            violations.push(Violation::IsolatedCol(j));
            isolated = true;
        }
    }
    let components = support_components(&p.cost);
    // isolated vertices are reported on their own
    if components > 1 && !isolated {
        violations.push(Violation::Disconnected { components });
    }

    ValidationReport { violations }
}

/// Number of connected components of the bipartite support graph.
pub fn support_components(cost: &CostMatrix) -> usize {
    let (m, n) = (cost.rows(), cost.cols());
    let mut uf = UnionFind::<usize>::new(m + n);
    let mut components = m + n;
    for e in cost.entries() {
        if uf.union(e.i, m + e.j) {
            components -= 1;
        }
    }
    components
}

/// Instance-level constants entering the convergence envelopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConstants {
    /// `max_E C - tau log(max(mu_min, nu_min))`.
    pub k: f64,
    /// `-tau log sum_E exp(-C/tau) mu_i nu_j`.
    pub theta: f64,
    /// `min_E C`.
    pub ul_theta: f64,
    /// `max_E C - min_E C`.
    pub osc: f64,
    /// Smallest nonzero subset-sum gap, when it was computed.
    pub delta: Option<Delta>,
}

impl ProblemConstants {
    pub fn delta_value(&self) -> Option<f64> {
        self.delta.as_ref().map(Delta::value)
    }

    /// `K - ul_theta`, the spread entering the asymptotic envelopes.
    pub fn spread(&self) -> f64 {
        self.k - self.ul_theta
    }
}

/// Computes `K`, `theta`, `ul_theta` and `osc`; `delta` is left empty.
pub fn compute_constants(p: &Problem) -> ProblemConstants {
    let tau = p.tau;
    let cost = &p.cost;
    let max_c = cost.max_cost();
    let min_c = cost.min_cost();
    let k = max_c - tau * p.mu_min().max(p.nu_min()).ln();
    let lse = log_sum_exp(
        cost.entries()
            .iter()
            .map(|e| -e.c / tau + p.log_mu[e.i] + p.log_nu[e.j]),
    );
    ProblemConstants {
        k,
        theta: -tau * lse,
        ul_theta: min_c,
        osc: max_c - min_c,
        delta: None,
    }
}

/// [`compute_constants`] followed by [`compute_delta`]; `delta` stays empty
/// when the instance exceeds the enumeration limits.
pub fn compute_all_constants(p: &Problem, limits: DeltaLimits) -> ProblemConstants {
    let mut consts = compute_constants(p);
    consts.delta = compute_delta(p, limits).ok();
    consts
}
