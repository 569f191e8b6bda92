//! Convergence envelopes and the constructions behind them: block
//! minimizers, `inf Psi`, approximate minimizers, the rate function and the
//! exact reference iterates of the 2x2 example.

mod approx;
mod blocks;
mod bounds;
mod rate;
mod soules;
mod technical;
mod verify;

pub use approx::{approx_minimizer, ApproxMinimizer, VAR_SLACK};
pub use blocks::{
    block_minimizers, block_minimizers_with, inf_psi, long_run_min_psi, BlockMinimizer,
    BlockMinimizers, DEFAULT_BLOCK_MAX_ITERS, DEFAULT_BLOCK_TOL,
};
pub use bounds::{
    main_bound, main_threshold, slow_bound, vk_recursion_bound, warmup_bound, BoundCurve,
    BoundKind,
};
pub use rate::{rate_function_estimate, rate_function_upper, rate_upper_threshold, RateEstimate, Witness};
pub use soules::{soules_reference, SoulesIterate, SoulesSequence};
pub use technical::{technical_alpha_cap, technical_infimum_check, TechnicalCheck};
pub use verify::{evaluate_bounds, verify, COMPARISON_SLACK, BoundReport, BoundSeries, CheckViolation, Verdict};

use crate::error::{Error, Result};
use crate::problem::{compute_all_constants, DeltaLimits, Problem, ProblemConstants};
use crate::structure::{dm_decompose, DmDecomposition};

/// Everything the constructions need about one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub constants: ProblemConstants,
    pub delta: f64,
    pub decomposition: DmDecomposition,
    pub blocks: BlockMinimizers,
    pub inf_psi: f64,
}

impl Analysis {
    /// Fails when the instance is not scalable, when `Delta` is out of reach
    /// of the subset enumeration, or when a block solve does not converge.
    pub fn new(p: &Problem) -> Result<Self> {
        Self::with_limits(p, DeltaLimits::default(), DEFAULT_BLOCK_TOL)
    }

    pub fn with_limits(p: &Problem, limits: DeltaLimits, tol: f64) -> Result<Self> {
        let constants = compute_all_constants(p, limits);
        let delta = constants
            .delta_value()
            .ok_or_else(|| Error::Precondition("the marginal gap Delta is unavailable".into()))?;
        let decomposition = dm_decompose(p)?;
        let blocks = block_minimizers(p, &decomposition, tol)?;
        let inf_psi = inf_psi(p, &decomposition, &blocks);
        Ok(Self {
            constants,
            delta,
            decomposition,
            blocks,
            inf_psi,
        })
    }
}
