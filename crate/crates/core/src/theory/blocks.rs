//! Per-block minimizers of the dual objective and the block-sum `inf Psi`.

use crate::error::{Error, Result};
use crate::kernels::{self, log_partition, Potentials};
use crate::problem::Problem;
use crate::sinkhorn::solve_until;
use crate::structure::DmDecomposition;

pub const DEFAULT_BLOCK_TOL: f64 = 1e-12;
pub const DEFAULT_BLOCK_MAX_ITERS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockMinimizer {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub mass: f64,
    /// Indexed like `rows`.
    pub f: Vec<f64>,
    /// Indexed like `cols`; centered so that `(max + min) / 2 = 0`.
    pub g: Vec<f64>,
    /// `l1` marginal error of the rescaled block problem at the returned
    /// potentials.
    pub residual: f64,
    pub iterations: usize,
    /// `sum_block exp((-C + f + g)/tau) mu nu`, which should equal `mass`.
    pub normalization: f64,
    /// `tau log m_p - sum mu f - sum nu g` over the block.
    pub min_psi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockMinimizers {
    pub tol: f64,
    pub blocks: Vec<BlockMinimizer>,
}

impl BlockMinimizers {
    pub fn max_residual(&self) -> f64 {
        self.blocks.iter().map(|b| b.residual).fold(0.0, f64::max)
    }
}

pub fn block_minimizers(p: &Problem, d: &DmDecomposition, tol: f64) -> Result<BlockMinimizers> {
    block_minimizers_with(p, d, tol, DEFAULT_BLOCK_MAX_ITERS)
}

/// [`block_minimizers`] with an explicit per-block iteration cap.
pub fn block_minimizers_with(
    p: &Problem,
    d: &DmDecomposition,
    tol: f64,
    max_iters: usize,
) -> Result<BlockMinimizers> {
    let tau = p.tau();
    let mut blocks = Vec::with_capacity(d.block_count());
    for b in 0..d.block_count() {
        let (rows, cols) = (&d.row_blocks[b], &d.col_blocks[b]);
        let mass = d.mass_f64(b);
        let sub = p.restrict(rows, cols, mass)?;
        let solved = solve_until(&sub, vec![0.0; cols.len()], tol, max_iters);
        if !(solved.residual <= tol) {
            return Err(Error::BlockNotConverged {
                block: b,
                tol,
                iters: solved.iterations,
                residual: solved.residual,
            });
        }
        let Potentials { mut f, mut g } = solved.potentials;
        let log_m = mass.ln();
        let (lo, hi) = g
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let shift = 0.5 * (lo + hi);
        for x in &mut f {
            *x += shift - tau * log_m;
        }
        for x in &mut g {
            *x -= shift;
        }
        let pot = Potentials::new(f, g);
        // the rescaled block has the same kernel up to the factor 1/m^2
        let normalization = (log_partition(&sub, &pot) + 2.0 * log_m).exp();
        let mu_f: f64 = rows.iter().zip(&pot.f).map(|(&i, x)| p.mu()[i] * x).sum();
        let nu_g: f64 = cols.iter().zip(&pot.g).map(|(&j, x)| p.nu()[j] * x).sum();
        blocks.push(BlockMinimizer {
            rows: rows.clone(),
            cols: cols.clone(),
            mass,
            f: pot.f,
            g: pot.g,
            residual: solved.residual,
            iterations: solved.iterations,
            normalization,
            min_psi: tau * log_m - mu_f - nu_g,
        });
    }
    Ok(BlockMinimizers { tol, blocks })
}

/// `inf Psi = sum_p (min Psi^p - tau log m_p)`.
pub fn inf_psi(p: &Problem, _d: &DmDecomposition, bm: &BlockMinimizers) -> f64 {
    bm.blocks
        .iter()
        .map(|b| b.min_psi - p.tau() * b.mass.ln())
        .sum()
}

/// Smallest `Psi(f^k, g^k)` over `k <= iters`, from `g0 = 0`.
pub fn long_run_min_psi(p: &Problem, iters: usize) -> f64 {
    let mut pot = Potentials::zeros(p);
    let mut best = f64::INFINITY;
    for k in 1..=iters {
        crate::sinkhorn::step(p, &mut pot, k);
        best = best.min(kernels::psi(p, &pot));
    }
    best
}
