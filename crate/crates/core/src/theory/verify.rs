//! End-to-end verification: solve, audit the trace, and test every
//! applicable envelope.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::Result;
use crate::report::{Cell, Report, Table};
use crate::sinkhorn::{check_identities, run, IdentityReport, RunConfig};
use crate::structure::{classify, ScalabilityLabel};
use crate::problem::{compute_all_constants, DeltaLimits, Problem};
use crate::structure::dm_decompose;

use super::blocks::{block_minimizers, inf_psi, DEFAULT_BLOCK_TOL};
use super::bounds::{BoundCurve, BoundKind};

/// A failed check: an envelope exceeded at `k`, or an identity out of
/// tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckViolation {
    pub check: String,
    pub k: Option<usize>,
    pub value: f64,
    pub bound: f64,
}

impl CheckViolation {
    fn to_json(&self) -> Value {
        json!({"check": self.check, "k": self.k, "value": self.value, "bound": self.bound})
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable(String),
}

impl Verdict {
    fn to_json(&self) -> Value {
        match self {
            Verdict::Holds => json!({"status": "holds"}),
            Verdict::Violated => json!({"status": "violated"}),
            Verdict::NotApplicable(why) => json!({"status": "not_applicable", "reason": why}),
        }
    }
}

/// Values of one curve at `k = 1..=len`; `None` below its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSeries {
    pub kind: BoundKind,
    pub min_k: usize,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub class: ScalabilityLabel,
    pub ell: Option<usize>,
    pub inf_psi: Option<f64>,
    pub v1: Option<f64>,
    /// `e_total(k)` for `k = 1..`.
    pub e_total: Vec<f64>,
    pub series: Vec<BoundSeries>,
    pub verdicts: BTreeMap<BoundKind, Verdict>,
    pub identities: IdentityReport,
    pub violations: Vec<CheckViolation>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Absolute slack on `e_total <= bound`, covering rounding in the computed
/// marginals.
pub const COMPARISON_SLACK: f64 = 1e-12;

/// Evaluates `curves` along `e_total` and lists every `k` where a curve is
/// exceeded by more than [`COMPARISON_SLACK`].
pub fn evaluate_bounds(
    e_total: &[f64],
    curves: &[BoundCurve],
) -> (Vec<BoundSeries>, Vec<CheckViolation>) {
    let mut violations = Vec::new();
    let series = curves
        .iter()
        .map(|c| {
            let values: Vec<Option<f64>> = (1..=e_total.len()).map(|k| c.eval(k)).collect();
            for (i, (&e, b)) in e_total.iter().zip(&values).enumerate() {
                match b {
                    Some(b) if !(e <= *b + COMPARISON_SLACK) => violations.push(CheckViolation {
                        check: c.kind.as_str().to_owned(),
                        k: Some(i + 1),
                        value: e,
                        bound: *b,
                    }),
                    _ => {}
                }
            }
            BoundSeries {
                kind: c.kind,
                min_k: c.min_k,
                values,
            }
        })
        .collect();
    (series, violations)
}

/// Runs `max_iters` iterations from `g0 = 0` and checks the trace.
pub fn verify(p: &Problem, max_iters: usize) -> Result<BoundReport> {
    let trace = run(p, &RunConfig::with_max_iters(max_iters));
    let identities = check_identities(p, &trace)?;
    let e_total = trace.e_totals();
    let class = classify(p).label;
    let tau = p.tau();

    let mut verdicts = BTreeMap::new();
    let mut curves = Vec::new();
    let (mut ell, mut inf_psi_value, mut v1) = (None, None, None);
    let na = |why: &str| Verdict::NotApplicable(why.to_owned());
    if !class.is_scalable() {
        for kind in BoundKind::ALL {
            verdicts.insert(kind, na("instance is not scalable"));
        }
    } else {
        let d = dm_decompose(p)?;
        let bm = block_minimizers(p, &d, DEFAULT_BLOCK_TOL)?;
        let inf = inf_psi(p, &d, &bm);
        let first = trace.records.first().map_or(f64::NAN, |r| r.psi);
        ell = Some(d.ell);
        inf_psi_value = Some(inf);
        v1 = Some(first - inf);
        curves.push(BoundCurve::slow(first - inf, tau));
        let constants = compute_all_constants(p, DeltaLimits::default());
        let (fast, other, why) = if d.ell == 0 {
            (BoundCurve::warmup(&constants, tau), BoundKind::Main, "ell = 0; the warm-up bound applies")
        } else {
            (BoundCurve::main(&constants, d.ell, tau), BoundKind::Warmup, "instance is not exactly scalable")
        };
        verdicts.insert(other, na(why));
        match fast {
            Ok(curve) => curves.push(curve),
            Err(e) => {
                let kind = if d.ell == 0 { BoundKind::Warmup } else { BoundKind::Main };
                verdicts.insert(kind, Verdict::NotApplicable(e.to_string()));
            }
        }
    }

    let (series, mut violations) = evaluate_bounds(&e_total, &curves);
    for s in &series {
        let bad = violations.iter().any(|v| v.check == s.kind.as_str());
        let verdict = if bad {
            Verdict::Violated
        } else if s.min_k > e_total.len() {
            na("trace shorter than the validity threshold")
        } else {
            Verdict::Holds
        };
        verdicts.insert(s.kind, verdict);
    }
    for c in identities.checks.iter().filter(|c| !c.passed) {
        violations.push(CheckViolation {
            check: format!("identity:{}", c.kind.name()),
            k: c.worst_k,
            value: c.max_residual,
            bound: c.tolerance,
        });
    }
    Ok(BoundReport {
        class,
        ell,
        inf_psi: inf_psi_value,
        v1,
        e_total,
        series,
        verdicts,
        identities,
        violations,
    })
}

impl Report for BoundReport {
    fn to_json(&self) -> Value {
        let bounds: serde_json::Map<String, Value> = self
            .series
            .iter()
            .map(|s| {
                (
                    s.kind.as_str().to_owned(),
                    json!({"min_k": s.min_k, "values": s.values}),
                )
            })
            .collect();
        let verdicts: serde_json::Map<String, Value> = self
            .verdicts
            .iter()
            .map(|(k, v)| (k.as_str().to_owned(), v.to_json()))
            .collect();
        let identities: Vec<Value> = self
            .identities
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.kind.name(),
                    "tolerance": c.tolerance,
                    "max_residual": c.max_residual,
                    "worst_k": c.worst_k,
                    "evaluated": c.evaluated,
                    "passed": c.passed,
                })
            })
            .collect();
        json!({
            "class": self.class.as_str(),
            "ell": self.ell,
            "inf_psi": self.inf_psi,
            "v1": self.v1,
            "iterations": self.e_total.len(),
            "e_total": self.e_total,
            "bounds": bounds,
            "verdicts": verdicts,
            "identities": identities,
            "violations": self.violations.iter().map(CheckViolation::to_json).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }

    fn to_table(&self) -> Option<Table> {
        let mut header = vec!["k".to_owned(), "e_total".to_owned()];
        header.extend(self.series.iter().map(|s| s.kind.as_str().to_owned()));
        let rows = self
            .e_total
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let mut row = vec![Cell::Int(i as i64 + 1), Cell::Float(e)];
                row.extend(self.series.iter().map(|s| Cell::from(s.values[i])));
                row
            })
            .collect();
        Some(Table { header, rows })
    }
}
