//! Envelope curves for the marginal error `E_k`.

use std::f64::consts::E;
use std::fmt;

use crate::error::{Error, Result};
use crate::problem::ProblemConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    Slow,
    Warmup,
    Main,
}

impl BoundKind {
    pub const ALL: [BoundKind; 3] = [BoundKind::Slow, BoundKind::Warmup, BoundKind::Main];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Slow => "slow",
            BoundKind::Warmup => "warmup",
            BoundKind::Main => "main",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A bound on `E_k` valid from `min_k` on.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub tau: f64,
    pub min_k: usize,
    /// `2 V_1 / tau` (slow), `4 (K - theta) / (tau Delta)` (warm-up), or
    /// `(K - ul_theta)(1 + 2(1 + 1/ell)/Delta) / tau` (main).
    coef: f64,
    ell: usize,
}

fn need_delta(c: &ProblemConstants) -> Result<f64> {
    c.delta_value()
        .ok_or_else(|| Error::Precondition("the marginal gap Delta is unavailable".into()))
}

impl BoundCurve {
    pub fn slow(v1: f64, tau: f64) -> Self {
        Self {
            kind: BoundKind::Slow,
            tau,
            min_k: 1,
            coef: 2.0 * v1.max(0.0) / tau,
            ell: 0,
        }
    }

    pub fn warmup(c: &ProblemConstants, tau: f64) -> Result<Self> {
        let delta = need_delta(c)?;
        Ok(Self {
            kind: BoundKind::Warmup,
            tau,
            min_k: 3,
            coef: 4.0 * (c.k - c.theta) / (tau * delta),
            ell: 0,
        })
    }

    pub fn main(c: &ProblemConstants, ell: usize, tau: f64) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Precondition(
                "the main bound needs ell >= 1; use the warm-up bound for exactly scalable instances"
                    .into(),
            ));
        }
        let delta = need_delta(c)?;
        let l = ell as f64;
        Ok(Self {
            kind: BoundKind::Main,
            tau,
            min_k: main_threshold(ell),
            coef: c.spread() * (1.0 + 2.0 * (1.0 + 1.0 / l) / delta) / tau,
            ell,
        })
    }

    /// `None` below the validity threshold.
    pub fn eval(&self, k: usize) -> Option<f64> {
        if k < self.min_k {
            return None;
        }
        let kf = k as f64;
        Some(match self.kind {
            BoundKind::Slow => (self.coef / kf).sqrt(),
            BoundKind::Warmup => self.coef / (kf * (kf - 2.0)).sqrt(),
            BoundKind::Main => {
                let l = self.ell as f64;
                4.0 * l / (kf * (kf - 2.0)).sqrt()
                    * (self.coef + ((kf - 2.0) / (2.0 * l * l)).ln())
            }
        })
    }
}

/// `ceil(2 e ell^2 + 3)`.
pub fn main_threshold(ell: usize) -> usize {
    let l = ell as f64;
    (2.0 * E * l * l + 3.0).ceil() as usize
}

/// `sqrt(2 v1 / (tau k))`.
pub fn slow_bound(v1: f64, tau: f64, k: usize) -> f64 {
    BoundCurve::slow(v1, tau).eval(k.max(1)).expect("valid from k = 1")
}

pub fn warmup_bound(c: &ProblemConstants, tau: f64, k: usize) -> Result<Option<f64>> {
    Ok(BoundCurve::warmup(c, tau)?.eval(k))
}

pub fn main_bound(c: &ProblemConstants, ell: usize, tau: f64, k: usize) -> Result<Option<f64>> {
    Ok(BoundCurve::main(c, ell, tau)?.eval(k))
}

/// Envelope `1 / (a k)` for sequences with `V_{k+1} <= V_k - a V_k^2`.
pub fn vk_recursion_bound(_v0: f64, a: f64, k: usize) -> f64 {
    1.0 / (a * k as f64)
}
