//! Upper estimates of the rate function
//! `Q(alpha) = inf_g [Psi(f[g], g) - inf Psi + alpha var(g)^2]` with `g0 = 0`.

use std::f64::consts::{E, LN_10};

use crate::error::{Error, Result};
use crate::kernels::var_seminorm;
use crate::problem::{Problem, ProblemConstants};

use super::Analysis;

/// Decades of `eps` below `eps_max` covered by the search grid.
pub const GRID_DECADES: f64 = 40.0;
/// Grid points per decade.
pub const GRID_DENSITY: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    Zero,
    /// The approximate minimizer for this target gap.
    Epsilon(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub alpha: f64,
    pub q_hat: f64,
    pub witness: Witness,
    pub gap: f64,
    pub var_norm: f64,
}

struct Eval {
    value: f64,
    gap: f64,
    var: f64,
}

fn objective(p: &Problem, a: &Analysis, g: &[f64], alpha: f64) -> Eval {
    let gap = a.gap(p, g);
    let var = var_seminorm(g);
    Eval {
        value: gap + alpha * var * var,
        gap,
        var,
    }
}

/// `Q_hat(alpha)`: the best of the zero vector and the approximate
/// minimizers over a geometric `eps` grid, refined by golden-section search.
pub fn rate_function_estimate(p: &Problem, a: &Analysis, alpha: f64) -> Result<RateEstimate> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::OutOfRange(format!("alpha must be positive, got {alpha}")));
    }
    let tau = p.tau();
    let eps_max = a.eps_max(tau);
    // eps = eps_max 10^-s corresponds to rho = tau s ln 10
    let at = |s: f64| objective(p, a, &a.witness(tau * s * LN_10), alpha);

    let steps = (GRID_DECADES as usize) * GRID_DENSITY;
    let h = 1.0 / GRID_DENSITY as f64;
    let (mut best_s, mut best) = (0.0, at(0.0));
    for i in 1..=steps {
        let s = i as f64 * h;
        let e = at(s);
        if e.value < best.value {
            best_s = s;
            best = e;
        }
    }

    let (mut lo, mut hi) = ((best_s - h).max(0.0), best_s + h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut e1, mut e2) = (at(x1), at(x2));
    for _ in 0..60 {
        if e1.value <= e2.value {
            hi = x2;
            x2 = x1;
            e2 = e1;
            x1 = hi - phi * (hi - lo);
            e1 = at(x1);
        } else {
            lo = x1;
            x1 = x2;
            e1 = e2;
            x2 = lo + phi * (hi - lo);
            e2 = at(x2);
        }
    }
    for (s, e) in [(x1, e1), (x2, e2)] {
        if e.value < best.value {
            best_s = s;
            best = e;
        }
    }

    let mut witness = Witness::Epsilon(eps_max * 10f64.powf(-best_s));
    let zero = objective(p, a, &vec![0.0; p.cols()], alpha);
    if zero.value < best.value {
        best = zero;
        witness = Witness::Zero;
    }
    Ok(RateEstimate {
        alpha,
        q_hat: best.value,
        witness,
        gap: best.gap,
        var_norm: best.var,
    })
}

/// Largest `alpha` for which [`rate_function_upper`] applies:
/// `exp((K - ul_theta)(1 + 2/Delta)/tau) / (e tau ell max(ell/2, (K - ul_theta)/(tau Delta)))`.
pub fn rate_upper_threshold(c: &ProblemConstants, ell: usize, delta: f64, tau: f64) -> f64 {
    let s = c.spread();
    let l = ell as f64;
    (s * (1.0 + 2.0 / delta) / tau).exp() / (E * tau * l * (0.5 * l).max(s / (tau * delta)))
}

/// `alpha tau^2 ell^2 [2M/(tau ell) + log(2/(alpha tau ell^2))]^2` with
/// `M = (K - ul_theta)(ell/2 + (1 + ell)/Delta)`; `None` outside the range.
pub fn rate_function_upper(
    c: &ProblemConstants,
    ell: usize,
    delta: f64,
    tau: f64,
    alpha: f64,
) -> Result<Option<f64>> {
    if ell == 0 {
        return Err(Error::Precondition("the rate upper bound needs ell >= 1".into()));
    }
    if !(alpha > 0.0) || alpha > rate_upper_threshold(c, ell, delta, tau) {
        return Ok(None);
    }
    let l = ell as f64;
    let m = c.spread() * (0.5 * l + (1.0 + l) / delta);
    let inner = 2.0 * m / (tau * l) + (2.0 / (alpha * tau * l * l)).ln();
    Ok(Some(alpha * tau * tau * l * l * inner * inner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{compute_all_constants, DeltaLimits};
    use crate::testing::soules;

    const LN2: f64 = std::f64::consts::LN_2;

    /// `inf_delta (1/2) log(1 + e^-delta) + alpha (delta/2)^2` by dense search.
    fn one_dim(alpha: f64) -> f64 {
        let h = |d: f64| 0.5 * (-d).exp().ln_1p() + alpha * 0.25 * d * d;
        let mut best = f64::INFINITY;
        let mut best_d = 0.0;
        for i in 0..=200_000 {
            let d = i as f64 * 1e-3;
            if h(d) < best {
                best = h(d);
                best_d = d;
            }
        }
        for i in -2000..=2000 {
            best = best.min(h(best_d + i as f64 * 1e-6));
        }
        best
    }

    #[test]
    fn soules_matches_one_dimensional_reduction() {
        let p = soules();
        let a = Analysis::new(&p).unwrap();
        for alpha in [1e-2, 1e-4, 1e-6] {
            let r = rate_function_estimate(&p, &a, alpha).unwrap();
            let oracle = one_dim(alpha);
            assert!((r.q_hat - oracle).abs() <= 1e-9 * oracle.max(1e-3), "{alpha}: {} vs {oracle}", r.q_hat);
        }
        let r = rate_function_estimate(&p, &a, 1e-4).unwrap();
        assert!((r.q_hat - 1.67e-3).abs() < 1e-5);
    }

    #[test]
    fn zero_witness_caps_large_alpha() {
        let p = soules();
        let a = Analysis::new(&p).unwrap();
        let r = rate_function_estimate(&p, &a, 1e6).unwrap();
        assert!(r.q_hat <= 0.5 * LN2 + 1e-12);
        assert!(rate_function_estimate(&p, &a, 0.0).is_err());
    }

    #[test]
    fn soules_asymptotics() {
        let p = soules();
        let a = Analysis::new(&p).unwrap();
        for alpha in [1e-6, 1e-8, 1e-10] {
            let r = rate_function_estimate(&p, &a, alpha).unwrap();
            let ratio = r.q_hat / (0.25 * alpha * alpha.ln().powi(2));
            assert!((0.7..=1.3).contains(&ratio), "{alpha}: {ratio}");
        }
    }

    #[test]
    fn upper_bound_values() {
        let c = compute_all_constants(&soules(), DeltaLimits::default());
        let v = rate_function_upper(&c, 1, 0.5, 1.0, 1e-4).unwrap().unwrap();
        let m = 4.5 * LN2;
        assert!((v - 1e-4 * (2.0 * m + 2e4f64.ln()).powi(2)).abs() < 1e-15);
        assert!((v - 2.605e-2).abs() < 1e-5);
        let top = rate_upper_threshold(&c, 1, 0.5, 1.0);
        assert!(rate_function_upper(&c, 1, 0.5, 1.0, top * 1.001).unwrap().is_none());
        assert!(rate_function_upper(&c, 1, 0.5, 1.0, top).unwrap().is_some());
        assert!(rate_function_upper(&c, 0, 0.5, 1.0, 1e-4).is_err());
        let p = soules();
        let a = Analysis::new(&p).unwrap();
        for e in 1..=12 {
            let alpha = 10f64.powi(-e);
            if let Some(u) = rate_function_upper(&c, 1, 0.5, 1.0, alpha).unwrap() {
                assert!(rate_function_estimate(&p, &a, alpha).unwrap().q_hat <= u);
            }
        }
    }
}
