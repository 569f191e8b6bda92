//! The alternating Sinkhorn iteration with per-iteration tracing.
//!
//! Iteration `k` (starting at 1) applies the row half-update when `k` is odd
//! and the column half-update when `k` is even, starting from a column
//! potential `g0`. The first recorded iterate is the one after the first row
//! update; the initial row potential never enters the trace.

mod audit;
mod csv;

use std::fmt;

use crate::kernels::{self, coupling, f_of_g, g_of_f, kl_divergence, marginal_error, Potentials};
use crate::problem::Problem;

pub use audit::{check_identities, IdentityCheck, IdentityKind, IdentityReport};
pub use csv::{potentials_document, write_trace_csv, TRACE_CSV_HEADER};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub max_iters: usize,
    /// Stop once `e_total <= stop_tol`.
    pub stop_tol: f64,
    /// Initial column potential; zero when `None`.
    pub g0: Option<Vec<f64>>,
    /// Potentials are stored on records with `k % record_every == 0`.
    pub record_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            stop_tol: 0.0,
            g0: None,
            record_every: 1,
        }
    }
}

impl RunConfig {
    pub fn with_max_iters(max_iters: usize) -> Self {
        Self {
            max_iters,
            ..Self::default()
        }
    }
}

/// Which half-update produced an iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    RowUpdate,
    ColUpdate,
}

impl Phase {
    pub fn of(k: usize) -> Self {
        if k % 2 == 1 {
            Phase::RowUpdate
        } else {
            Phase::ColUpdate
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::RowUpdate => "row-update",
            Phase::ColUpdate => "col-update",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub phase: Phase,
    pub e_row: f64,
    pub e_col: f64,
    pub e_total: f64,
    pub psi: f64,
    /// `KL(mu || X#pi^k)`
    pub kl_mu_row: f64,
    /// `KL(nu || Y#pi^k)`
    pub kl_nu_col: f64,
    /// `KL(X#pi^k || mu)`
    pub kl_row_mu: f64,
    /// `KL(Y#pi^k || nu)`
    pub kl_col_nu: f64,
    pub potentials: Option<Potentials>,
}

impl IterationRecord {
    /// `KL(mu || X#pi^k) + KL(nu || Y#pi^k)`, the squared gradient proxy.
    pub fn grad_sq(&self) -> f64 {
        self.kl_mu_row + self.kl_nu_col
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub config: RunConfig,
    /// `records[k - 1]` holds iteration `k`.
    pub records: Vec<IterationRecord>,
    pub final_potentials: Potentials,
}

impl RunTrace {
    pub fn record(&self, k: usize) -> Option<&IterationRecord> {
        k.checked_sub(1).and_then(|i| self.records.get(i))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn e_totals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.e_total).collect()
    }
}

// Relative entropy with the record convention: an undefined value (a
// marginal that underflowed to zero) is +inf, and rounding noise below zero
// is clamped.
fn kl_term(p: &[f64], q: &[f64]) -> f64 {
    kl_divergence(p, q).map_or(f64::INFINITY, |v| v.max(0.0))
}

fn initial_g(p: &Problem, cfg: &RunConfig) -> Vec<f64> {
    match &cfg.g0 {
        Some(g0) => {
            assert_eq!(g0.len(), p.cols(), "g0 length must equal the column count");
            g0.clone()
        }
        None => vec![0.0; p.cols()],
    }
}

/// Applies iteration `k` in place.
pub fn step(p: &Problem, pot: &mut Potentials, k: usize) {
    match Phase::of(k) {
        Phase::RowUpdate => pot.f = f_of_g(p, &pot.g),
        Phase::ColUpdate => pot.g = g_of_f(p, &pot.f),
    }
}

/// Runs the iteration and records every iterate.
pub fn run(p: &Problem, cfg: &RunConfig) -> RunTrace {
    let stride = cfg.record_every.max(1);
    let mut pot = Potentials::new(vec![0.0; p.rows()], initial_g(p, cfg));
    let mut records = Vec::with_capacity(cfg.max_iters.min(1 << 20));
    for k in 1..=cfg.max_iters.max(1) {
        step(p, &mut pot, k);
        let c = coupling(p, &pot);
        let err = marginal_error(&c, p);
        records.push(IterationRecord {
            k,
            phase: Phase::of(k),
            e_row: err.row,
            e_col: err.col,
            e_total: err.total,
            psi: kernels::psi(p, &pot),
            kl_mu_row: kl_term(p.mu(), &c.row_marginals),
            kl_nu_col: kl_term(p.nu(), &c.col_marginals),
            kl_row_mu: kl_term(&c.row_marginals, p.mu()),
            kl_col_nu: kl_term(&c.col_marginals, p.nu()),
            potentials: (k % stride == 0).then(|| pot.clone()),
        });
        if err.total <= cfg.stop_tol {
            break;
        }
    }
    RunTrace {
        config: cfg.clone(),
        records,
        final_potentials: pot,
    }
}

/// Outcome of [`solve_until`].
#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub potentials: Potentials,
    /// `e_total` of the last iterate.
    pub residual: f64,
    pub iterations: usize,
}

/// Iterates from `g0` without tracing until `e_total <= tol` or `max_iters`.
pub fn solve_until(p: &Problem, g0: Vec<f64>, tol: f64, max_iters: usize) -> Solved {
    let mut pot = Potentials::new(vec![0.0; p.rows()], g0);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for k in 1..=max_iters.max(1) {
        step(p, &mut pot, k);
        iterations = k;
        residual = marginal_error(&coupling(p, &pot), p).total;
        if residual <= tol {
            break;
        }
    }
    Solved {
        potentials: pot,
        residual,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::var_seminorm;
    use crate::testing::{soules, uniform_square};

    #[test]
    fn soules_first_iterate() {
        let t = run(&soules(), &RunConfig::with_max_iters(1));
        let r = &t.records[0];
        assert_eq!((r.k, r.phase), (1, Phase::RowUpdate));
        assert!(r.e_row.abs() < 1e-15);
        assert!((r.e_total - 0.5).abs() < 1e-15);
    }

    #[test]
    fn soules_error_law() {
        let t = run(&soules(), &RunConfig::with_max_iters(200));
        for r in &t.records {
            let expected = 1.0 / (r.k as f64 + 1.0);
            assert!((r.e_total - expected).abs() <= 1e-12 * expected, "k = {}", r.k);
        }
    }

    #[test]
    fn balanced_instance_is_a_fixed_point() {
        let cfg = RunConfig {
            max_iters: 50,
            stop_tol: 1e-14,
            ..RunConfig::default()
        };
        let t = run(&uniform_square(2), &cfg);
        assert_eq!(t.len(), 1);
        assert!(t.records[0].e_total <= 1e-15);
    }

    #[test]
    fn stride_controls_potentials() {
        let cfg = RunConfig {
            max_iters: 10,
            record_every: 3,
            ..RunConfig::default()
        };
        let t = run(&soules(), &cfg);
        let stored: Vec<usize> = t
            .records
            .iter()
            .filter(|r| r.potentials.is_some())
            .map(|r| r.k)
            .collect();
        assert_eq!(stored, vec![3, 6, 9]);
        assert_eq!(t.record(10).unwrap().k, 10);
        assert!(t.record(0).is_none());
    }

    #[test]
    fn deterministic() {
        let cfg = RunConfig::with_max_iters(300);
        assert_eq!(run(&soules(), &cfg), run(&soules(), &cfg));
    }

    #[test]
    fn two_runs_contract_in_seminorm() {
        let p = soules();
        let a = run(&p, &RunConfig::with_max_iters(60));
        let b = run(
            &p,
            &RunConfig {
                max_iters: 60,
                g0: Some(vec![3.0, -7.5]),
                ..RunConfig::default()
            },
        );
        let mut prev = var_seminorm(&[3.0, -7.5]);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            let (pa, pb) = (ra.potentials.as_ref().unwrap(), rb.potentials.as_ref().unwrap());
            let diff: Vec<f64> = if ra.k % 2 == 1 {
                pa.f.iter().zip(&pb.f).map(|(x, y)| x - y).collect()
            } else {
                pa.g.iter().zip(&pb.g).map(|(x, y)| x - y).collect()
            };
            let u = var_seminorm(&diff);
            assert!(u <= prev + 1e-12, "k = {}: {u} > {prev}", ra.k);
            prev = u;
        }
    }

    #[test]
    fn solve_until_converges_on_exact_instance() {
        let p = uniform_square(3);
        let s = solve_until(&p, vec![1.0, -2.0, 0.5], 1e-13, 100);
        assert!(s.residual <= 1e-13);
        assert!(s.iterations <= 2);
    }
}
