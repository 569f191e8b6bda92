use crate::error::{Error, Result};
use crate::kernels::{f_of_g, psi, var_seminorm, Potentials};
use crate::problem::Problem;

use super::Analysis;

/// Witness `g_hat = g* - rho ell_p` for a target gap `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxMinimizer {
    pub epsilon: f64,
    pub rho: f64,
    /// `t_p = rho ell_p`, per block.
    pub offsets: Vec<f64>,
    /// Column potential, length `n`.
    pub g_hat: Vec<f64>,
    /// `Psi(f[g_hat], g_hat) - inf Psi`.
    pub achieved_gap: f64,
    pub var_norm: f64,
    /// `(tau ell / 2) log(tau / eps) + (K - ul_theta)(ell/2 + (1 + ell)/Delta)`.
    pub var_bound: f64,
    pub gap_holds: bool,
    pub var_holds: bool,
}

impl ApproxMinimizer {
    pub fn holds(&self) -> bool {
        self.gap_holds && self.var_holds
    }
}

/// Slack allowed on the variation bound.
pub const VAR_SLACK: f64 = 1e-9;

impl Analysis {
    /// `(K - ul_theta)(1 + 2/Delta)`, the `rho` offset at `eps = tau`.
    pub(crate) fn rho_offset(&self) -> f64 {
        self.constants.spread() * (1.0 + 2.0 / self.delta)
    }

    /// Largest admissible target gap, `tau exp((K - ul_theta)(1 + 2/Delta)/tau)`.
    pub fn eps_max(&self, tau: f64) -> f64 {
        tau * (self.rho_offset() / tau).exp()
    }

    /// `g* - rho ell_p`, assembled over all columns.
    pub(crate) fn witness(&self, rho: f64) -> Vec<f64> {
        let d = &self.decomposition;
        let mut g = vec![0.0; d.col_block.len()];
        for (b, block) in self.blocks.blocks.iter().enumerate() {
            let t = rho * d.levels[b] as f64;
            for (&j, &gj) in block.cols.iter().zip(&block.g) {
                g[j] = gj - t;
            }
        }
        g
    }

    /// `Psi(f[g], g) - inf Psi`.
    pub(crate) fn gap(&self, p: &Problem, g: &[f64]) -> f64 {
        let pot = Potentials::new(f_of_g(p, g), g.to_vec());
        psi(p, &pot) - self.inf_psi
    }

    pub(crate) fn var_bound(&self, tau: f64, eps: f64) -> f64 {
        let l = self.decomposition.ell as f64;
        0.5 * tau * l * (tau / eps).ln()
            + self.constants.spread() * (0.5 * l + (1.0 + l) / self.delta)
    }
}

pub fn approx_minimizer(p: &Problem, a: &Analysis, eps: f64) -> Result<ApproxMinimizer> {
    let tau = p.tau();
    let eps_max = a.eps_max(tau);
    if !(eps > 0.0 && eps.is_finite()) || eps > eps_max * (1.0 + 1e-12) {
        return Err(Error::OutOfRange(format!(
            "eps must lie in (0, {eps_max:e}], got {eps:e}"
        )));
    }
    // clamp the rounding at the upper end of the range
    let rho = (tau * (tau / eps).ln() + a.rho_offset()).max(0.0);
    let g_hat = a.witness(rho);
    let achieved_gap = a.gap(p, &g_hat);
    let var_norm = var_seminorm(&g_hat);
    let var_bound = a.var_bound(tau, eps);
    Ok(ApproxMinimizer {
        epsilon: eps,
        rho,
        offsets: a
            .decomposition
            .levels
            .iter()
            .map(|&l| rho * l as f64)
            .collect(),
        g_hat,
        achieved_gap,
        var_norm,
        var_bound,
        gap_holds: achieved_gap <= eps,
        var_holds: var_norm <= var_bound + VAR_SLACK,
    })
}
