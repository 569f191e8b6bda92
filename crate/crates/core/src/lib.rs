//! Entropic optimal transport on sparse extended-real costs.
//!
//! The crate covers the Sinkhorn iteration with full per-iteration tracing
//! and an identity auditor ([`sinkhorn`]), exact-arithmetic scalability
//! classification with the generalized Dulmage-Mendelsohn decomposition
//! ([`structure`]), and the explicit convergence envelopes together with the
//! constructions behind them ([`theory`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod generate;
pub mod kernels;
pub mod problem;
pub mod report;
pub mod sinkhorn;
pub mod structure;
pub mod theory;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
pub use kernels::{Coupling, MarginalError, Potentials};
pub use problem::{
    compute_constants, compute_delta, parse_problem, serialize_problem, validate, CostMatrix,
    Delta, DeltaLimits, Edge, Problem, ProblemConstants, ValidationReport, Violation,
};
pub use sinkhorn::{check_identities, run, IdentityReport, IterationRecord, Phase, RunConfig, RunTrace};
pub use generate::{gen_instance, GenKind, GenSpec};
pub use report::{emit_report, Report, ReportFormat};
pub use structure::{
    classify, dag_levels, dm_decompose, forced_zero_edges, DmDecomposition, ScalabilityClass,
    ScalabilityLabel,
};
pub use theory::Analysis;
