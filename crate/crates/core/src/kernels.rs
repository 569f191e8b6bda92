//! Log-domain primitives on the sparse support.
//!
//! Every exponential sum is a max-shifted log-sum-exp accumulated in
//! ascending edge order, so results are bit-reproducible.

use crate::error::{Error, Result};
use crate::problem::Problem;

/// Dual potentials `(f, g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potentials {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl Potentials {
    pub fn new(f: Vec<f64>, g: Vec<f64>) -> Self {
        Self { f, g }
    }

    pub fn zeros(p: &Problem) -> Self {
        Self {
            f: vec![0.0; p.rows()],
            g: vec![0.0; p.cols()],
        }
    }
}

/// Normalized coupling `pi[f, g]` on the edge set, with its marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    /// Aligned with `cost().entries()`.
    pub weights: Vec<f64>,
    pub row_marginals: Vec<f64>,
    pub col_marginals: Vec<f64>,
}

impl Coupling {
    /// Recomputes both marginals from `weights`.
    pub fn from_weights(p: &Problem, weights: Vec<f64>) -> Self {
        let mut row_marginals = vec![0.0; p.rows()];
        let mut col_marginals = vec![0.0; p.cols()];
        for (e, w) in p.cost().entries().iter().zip(&weights) {
            row_marginals[e.i] += w;
        }
        for (j, col) in col_marginals.iter_mut().enumerate() {
            for &k in p.cost().col_ids(j) {
                *col += weights[k];
            }
        }
        Self {
            weights,
            row_marginals,
            col_marginals,
        }
    }

    /// Dense `m x n` view; absent edges are zero.
    pub fn to_dense(&self, p: &Problem) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; p.cols()]; p.rows()];
        for (e, w) in p.cost().entries().iter().zip(&self.weights) {
            dense[e.i][e.j] = *w;
        }
        dense
    }
}

/// `l1` marginal errors of a coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalError {
    pub row: f64,
    pub col: f64,
    pub total: f64,
}

/// Streaming `log(sum exp(x))`, shifted by the running maximum.
///
/// Returns `-inf` for an empty input or when every term is `-inf`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut acc = 0.0;
    for x in xs {
        if x == f64::NEG_INFINITY {
            continue;
        }
        if x <= max {
            acc += (x - max).exp();
        } else {
            acc = acc * (max - x).exp() + 1.0;
            max = x;
        }
    }
    if max == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        max + acc.ln()
    }
}

/// Row half-update: `f[g]_i = -tau log sum_j exp((-C_ij + g_j)/tau) nu_j`.
pub fn f_of_g(p: &Problem, g: &[f64]) -> Vec<f64> {
    let tau = p.tau();
    let log_nu = p.log_nu();
    (0..p.rows())
        .map(|i| {
            -tau * log_sum_exp(
                p.cost()
                    .row(i)
                    .iter()
                    .map(|e| (g[e.j] - e.c) / tau + log_nu[e.j]),
            )
        })
        .collect()
}

/// Column half-update: `g[f]_j = -tau log sum_i exp((-C_ij + f_i)/tau) mu_i`.
pub fn g_of_f(p: &Problem, f: &[f64]) -> Vec<f64> {
    let tau = p.tau();
    let log_mu = p.log_mu();
    (0..p.cols())
        .map(|j| {
            -tau * log_sum_exp(
                p.cost()
                    .col(j)
                    .map(|e| (f[e.i] - e.c) / tau + log_mu[e.i]),
            )
        })
        .collect()
}

/// Log-weights `(-C_ij + f_i + g_j)/tau + log mu_i + log nu_j` on each edge.
fn log_kernel<'a>(p: &'a Problem, pot: &'a Potentials) -> impl Iterator<Item = f64> + 'a {
    let tau = p.tau();
    let (log_mu, log_nu) = (p.log_mu(), p.log_nu());
    let (f, g) = (&pot.f, &pot.g);
    p.cost()
        .entries()
        .iter()
        .map(move |e| (f[e.i] + g[e.j] - e.c) / tau + log_mu[e.i] + log_nu[e.j])
}

/// `log Z(f, g)`.
pub fn log_partition(p: &Problem, pot: &Potentials) -> f64 {
    log_sum_exp(log_kernel(p, pot))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dual objective `Psi(f, g) = tau log Z(f, g) - mu.f - nu.g`.
pub fn psi(p: &Problem, pot: &Potentials) -> f64 {
    p.tau() * log_partition(p, pot) - dot(p.mu(), &pot.f) - dot(p.nu(), &pot.g)
}

/// Partition sum `Z(f, g)`.
pub fn partition_z(p: &Problem, pot: &Potentials) -> f64 {
    log_partition(p, pot).exp()
}

/// `pi[f, g]`, normalized by the computed `Z`.
pub fn coupling(p: &Problem, pot: &Potentials) -> Coupling {
    let log_z = log_partition(p, pot);
    let weights = log_kernel(p, pot).map(|x| (x - log_z).exp()).collect();
    Coupling::from_weights(p, weights)
}

/// `l1` distances of the coupling's marginals to `(mu, nu)`.
pub fn marginal_error(c: &Coupling, p: &Problem) -> MarginalError {
    let l1 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>();
    let row = l1(&c.row_marginals, p.mu());
    let col = l1(&c.col_marginals, p.nu());
    MarginalError {
        row,
        col,
        total: row + col,
    }
}

/// `KL(p || q) = sum p_i log(p_i / q_i)`; terms with `p_i = 0` contribute 0.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Length {
            expected: p.len(),
            got: q.len(),
        });
    }
    let mut sum = 0.0;
    for (index, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if !(qi > 0.0) {
            return Err(Error::Support { index, p: pi });
        }
        sum += pi * (pi / qi).ln();
    }
    Ok(sum)
}

/// Variation seminorm `(max h - min h) / 2`.
pub fn var_seminorm(h: &[f64]) -> f64 {
    let (lo, hi) = h
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if h.is_empty() {
        0.0
    } else {
        0.5 * (hi - lo)
    }
}

/// Gradient of `Psi`: `(X#pi - mu, Y#pi - nu)`.
pub fn psi_gradient(p: &Problem, pot: &Potentials) -> (Vec<f64>, Vec<f64>) {
    let c = coupling(p, pot);
    let df = c.row_marginals.iter().zip(p.mu()).map(|(x, m)| x - m).collect();
    let dg = c.col_marginals.iter().zip(p.nu()).map(|(y, n)| y - n).collect();
    (df, dg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{soules, trivial};

    const LN2: f64 = std::f64::consts::LN_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn lse_basics() {
        assert_eq!(log_sum_exp(std::iter::empty()), f64::NEG_INFINITY);
        assert!(close(log_sum_exp([0.0, 0.0]), LN2, 1e-15));
        assert!(close(log_sum_exp([1000.0, 1000.0]), 1000.0 + LN2, 1e-12));
        assert!(close(log_sum_exp([-1000.0, f64::NEG_INFINITY]), -1000.0, 1e-12));
    }

    #[test]
    fn soules_half_updates() {
        let p = soules();
        let f = f_of_g(&p, &[0.0, 0.0]);
        assert!(close(f[0], -(4f64.ln()), 1e-15));
        assert!(close(f[1], -LN2, 1e-15));
        let g = g_of_f(&p, &f);
        assert!(close(g[0], LN2, 1e-15));
        assert!(close(g[1], -(1.5f64.ln()), 1e-15));
    }

    #[test]
    fn trivial_half_updates() {
        let p = trivial();
        assert_eq!(f_of_g(&p, &[0.0]), vec![0.0]);
        assert_eq!(g_of_f(&p, &[0.0]), vec![0.0]);
        let pot = Potentials::zeros(&p);
        assert!(close(partition_z(&p, &pot), 1.0, 1e-15));
        assert_eq!(coupling(&p, &pot).weights, vec![1.0]);
        let (df, dg) = psi_gradient(&p, &pot);
        assert_eq!((df, dg), (vec![0.0], vec![0.0]));
        let e = marginal_error(&coupling(&p, &pot), &p);
        assert_eq!(e.total, 0.0);
    }

    #[test]
    fn soules_objective_and_partition() {
        let p = soules();
        let zero = Potentials::zeros(&p);
        assert!(close(psi(&p, &zero), 3f64.ln(), 1e-14));
        assert!(close(partition_z(&p, &zero), 3.0, 1e-14));
        let one = Potentials::new(f_of_g(&p, &[0.0, 0.0]), vec![0.0, 0.0]);
        assert!(close(psi(&p, &one), 1.5 * LN2, 1e-14));
        assert!(close(partition_z(&p, &one), 1.0, 1e-12));
    }

    #[test]
    fn soules_first_coupling() {
        let p = soules();
        let pot = Potentials::new(f_of_g(&p, &[0.0, 0.0]), vec![0.0, 0.0]);
        let c = coupling(&p, &pot);
        let dense = c.to_dense(&p);
        let expected = [[0.25, 0.25], [0.0, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(dense[i][j], expected[i][j], 1e-15));
            }
        }
        let e = marginal_error(&c, &p);
        assert!(close(e.row, 0.0, 1e-15));
        assert!(close(e.col, 0.5, 1e-15));
        assert_eq!(e.total, e.row + e.col);
        let (df, dg) = psi_gradient(&p, &pot);
        assert!(df.iter().all(|d| d.abs() < 1e-15));
        assert!(close(dg[0], -0.25, 1e-15) && close(dg[1], 0.25, 1e-15));
    }

    #[test]
    fn kl_values() {
        assert_eq!(kl_divergence(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        let v = kl_divergence(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        assert!(close(v, 0.5 * LN2 + 0.5 * (2.0f64 / 3.0).ln(), 1e-15));
        assert!(close(v, 0.143841, 1e-6));
        assert!(close(kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), LN2, 1e-15));
        assert_eq!(kl_divergence(&[0.0, 1.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(
            kl_divergence(&[0.5, 0.5], &[1.0, 0.0]),
            Err(Error::Support { index: 1, .. })
        ));
    }

    #[test]
    fn seminorm_values() {
        assert_eq!(var_seminorm(&[1.0, 3.0]), 1.0);
        assert_eq!(var_seminorm(&[4.0, 4.0, 4.0]), 0.0);
        assert_eq!(var_seminorm(&[0.0, 1.0, 5.0]), 2.5);
    }
}
