use std::fmt;

use super::{Phase, RunTrace};
use crate::error::{Error, Result};
use crate::kernels::{coupling, log_partition, Coupling};
use crate::problem::Problem;

/// The five trace identities audited by [`check_identities`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityKind {
    /// Row marginals exact after a row update, column marginals after a
    /// column update.
    AlternatingMarginals,
    /// `f^{k+1} = f^k - tau log(X#pi^k / mu)` (even `k`) and the column form.
    PotentialIncrement,
    /// `Psi(k) - Psi(k+1) = tau (KL(mu || X#pi^k) + KL(nu || Y#pi^k))`.
    PsiDecrease,
    /// The four parity-restricted KL sequences are non-increasing.
    KlMonotone,
    /// `Z(f^k, g^k) = 1`.
    UnitPartition,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 5] = [
        IdentityKind::AlternatingMarginals,
        IdentityKind::PotentialIncrement,
        IdentityKind::PsiDecrease,
        IdentityKind::KlMonotone,
        IdentityKind::UnitPartition,
    ];

    pub fn tolerance(self) -> f64 {
        match self {
            IdentityKind::AlternatingMarginals => 1e-10,
            IdentityKind::PotentialIncrement => 1e-8,
            IdentityKind::PsiDecrease => 1e-8,
            IdentityKind::KlMonotone => 1e-12,
            IdentityKind::UnitPartition => 1e-10,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IdentityKind::AlternatingMarginals => "alternating_marginals",
            IdentityKind::PotentialIncrement => "potential_increment",
            IdentityKind::PsiDecrease => "psi_decrease",
            IdentityKind::KlMonotone => "kl_monotone",
            IdentityKind::UnitPartition => "unit_partition",
        }
    }
}

impl fmt::Display for IdentityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub kind: IdentityKind,
    pub tolerance: f64,
    /// Largest residual seen; 0 when nothing was evaluated.
    pub max_residual: f64,
    /// Iteration at which `max_residual` occurred.
    pub worst_k: Option<usize>,
    pub evaluated: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, kind: IdentityKind) -> &IdentityCheck {
        self.checks
            .iter()
            .find(|c| c.kind == kind)
            .expect("every identity is checked")
    }
}

struct Tally {
    kind: IdentityKind,
    max: f64,
    worst: Option<usize>,
    count: usize,
}

impl Tally {
    fn new(kind: IdentityKind) -> Self {
        Self {
            kind,
            max: 0.0,
            worst: None,
            count: 0,
        }
    }

    fn add(&mut self, k: usize, residual: f64) {
        self.count += 1;
        // NaN residuals must fail the check
        if residual.is_nan() || residual > self.max {
            self.max = if residual.is_nan() { f64::INFINITY } else { residual };
            self.worst = Some(k);
        }
    }

    fn finish(self) -> IdentityCheck {
        let tolerance = self.kind.tolerance();
        IdentityCheck {
            kind: self.kind,
            tolerance,
            max_residual: self.max,
            worst_k: self.worst,
            evaluated: self.count,
            passed: self.max <= tolerance,
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Audits a trace against the marginal, increment, decrease, monotonicity
/// and normalization identities.
///
/// Couplings are recomputed from the recorded potentials; the decrease
/// identity and the monotonicity checks use the recorded `psi` and KL fields.
pub fn check_identities(p: &Problem, t: &RunTrace) -> Result<IdentityReport> {
    let tau = p.tau();
    let mut pots = Vec::with_capacity(t.records.len());
    for r in &t.records {
        pots.push(r.potentials.as_ref().ok_or(Error::MissingPotentials(r.k))?);
    }
    let couplings: Vec<Coupling> = pots.iter().map(|pot| coupling(p, pot)).collect();

    let mut marginals = Tally::new(IdentityKind::AlternatingMarginals);
    let mut increment = Tally::new(IdentityKind::PotentialIncrement);
    let mut decrease = Tally::new(IdentityKind::PsiDecrease);
    let mut monotone = Tally::new(IdentityKind::KlMonotone);
    let mut partition = Tally::new(IdentityKind::UnitPartition);

    for (idx, r) in t.records.iter().enumerate() {
        let c = &couplings[idx];
        let k = r.k;
        let exact = match r.phase {
            Phase::RowUpdate => max_abs_diff(&c.row_marginals, p.mu()),
            Phase::ColUpdate => max_abs_diff(&c.col_marginals, p.nu()),
        };
        marginals.add(k, exact);
        partition.add(k, (log_partition(p, pots[idx]).exp() - 1.0).abs());

        let Some(next) = t.records.get(idx + 1) else {
            continue;
        };
        let (cur, nxt) = (pots[idx], pots[idx + 1]);
        let residual = match r.phase {
            // even k: the next step updates f
            Phase::ColUpdate => (0..p.rows())
                .map(|i| {
                    let predicted = cur.f[i] - tau * (c.row_marginals[i] / p.mu()[i]).ln();
                    (nxt.f[i] - predicted).abs()
                })
                .fold(0.0, f64::max),
            Phase::RowUpdate => (0..p.cols())
                .map(|j| {
                    let predicted = cur.g[j] - tau * (c.col_marginals[j] / p.nu()[j]).ln();
                    (nxt.g[j] - predicted).abs()
                })
                .fold(0.0, f64::max),
        };
        increment.add(k, residual);
        decrease.add(k, ((r.psi - next.psi) - tau * r.grad_sq()).abs());
    }

    // parity-restricted sequences: even k for the row terms, odd k for the
    // column terms
    type Field = fn(&super::IterationRecord) -> f64;
    let sequences: [(Phase, Field); 4] = [
        (Phase::ColUpdate, |r| r.kl_row_mu),
        (Phase::ColUpdate, |r| r.kl_mu_row),
        (Phase::RowUpdate, |r| r.kl_col_nu),
        (Phase::RowUpdate, |r| r.kl_nu_col),
    ];
    for (phase, field) in sequences {
        let mut prev: Option<f64> = None;
        for r in t.records.iter().filter(|r| r.phase == phase) {
            let v = field(r);
            if let Some(before) = prev {
                monotone.add(r.k, (v - before).max(0.0));
            }
            prev = Some(v);
        }
    }

    Ok(IdentityReport {
        checks: vec![
            marginals.finish(),
            increment.finish(),
            decrease.finish(),
            monotone.finish(),
            partition.finish(),
        ],
    })
}
