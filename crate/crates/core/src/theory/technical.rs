//! Grid check of `inf_{0<x<=X} x + alpha (b log(1/x) + M)^2 <= 4 alpha b^2 [log(e^{M/b} / (2 alpha b^2))]^2`.

use std::f64::consts::E;

use crate::error::{Error, Result};

pub const GRID_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TechnicalCheck {
    /// Smallest objective value found on the grid.
    pub lhs: f64,
    pub argmin: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Largest admissible `alpha`: `X / (2 e b^2 max(1, log(e^{M/b} / X)))`.
pub fn technical_alpha_cap(b: f64, m_const: f64, x_cap: f64) -> f64 {
    x_cap / (2.0 * E * b * b * (m_const / b - x_cap.ln()).max(1.0))
}

fn log_grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let (a, z) = (lo.ln(), hi.ln());
    (0..points).map(move |i| {
        if i + 1 == points {
            hi
        } else {
            (a + (z - a) * i as f64 / (points - 1) as f64).exp()
        }
    })
}

pub fn technical_infimum_check(
    b: f64,
    m_const: f64,
    x_cap: f64,
    alpha: f64,
) -> Result<TechnicalCheck> {
    if !(b > 0.0 && x_cap > 0.0 && alpha > 0.0 && m_const.is_finite()) {
        return Err(Error::Precondition(
            "b, X and alpha must be positive and M finite".into(),
        ));
    }
    if x_cap.ln() >= m_const / b {
        return Err(Error::Precondition(format!(
            "X = {x_cap} must be below e^(M/b) = {}",
            (m_const / b).exp()
        )));
    }
    let cap = technical_alpha_cap(b, m_const, x_cap);
    if alpha > cap {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} exceeds the admissible {cap}"
        )));
    }
    let h = |x: f64| {
        let t = b * (1.0 / x).ln() + m_const;
        x + alpha * t * t
    };
    let scan = |lo: f64, hi: f64| {
        let pts: Vec<f64> = log_grid(lo, hi, GRID_POINTS).collect();
        let (idx, val) = pts
            .iter()
            .map(|&x| h(x))
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
        (pts, idx, val)
    };

    let lo = x_cap.min(2.0 * alpha * b * b) * 1e-3;
    let (pts, idx, mut lhs) = scan(lo, x_cap);
    let mut argmin = pts[idx];
    let (a, z) = (pts[idx.saturating_sub(1)], pts[(idx + 1).min(pts.len() - 1)]);
    if a < z {
        let (fine, j, v) = scan(a, z);
        if v < lhs {
            lhs = v;
            argmin = fine[j];
        }
    }
    let inner = m_const / b - (2.0 * alpha * b * b).ln();
    let rhs = 4.0 * alpha * b * b * inner * inner;
    Ok(TechnicalCheck {
        lhs,
        argmin,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}
