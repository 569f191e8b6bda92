use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Problem;

/// Denominator bound used when snapping marginals to rationals.
pub const MAX_DENOMINATOR: u64 = 1_000_000_000_000;

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued-fraction expansion of the exact binary value of `x`.
///
/// Returns `None` for non-finite input.
pub fn snap_to_rational(x: f64, max_den: u64) -> Option<BigRational> {
    let exact = BigRational::from_float(x)?;
    let max_den = BigInt::from(max_den.max(1));
    if exact.denom() <= &max_den {
        return Some(exact);
    }
    let negative = exact.is_negative();
    let exact = exact.abs();

    let (mut p0, mut q0, mut p1, mut q1) = (
        BigInt::zero(),
        BigInt::one(),
        BigInt::one(),
        BigInt::zero(),
    );
    let (mut n, mut d) = (exact.numer().clone(), exact.denom().clone());
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
    }
    // semiconvergent p0 + k p1 over q0 + k q1 versus the last convergent
    let k = (&max_den - &q0).div_floor(&q1);
    let semi = BigRational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = BigRational::new(p1, q1);
    let snapped = if (&conv - &exact).abs() <= (&semi - &exact).abs() {
        conv
    } else {
        semi
    };
    Some(if negative { -snapped } else { snapped })
}

/// Snaps `values` entrywise, then moves any residual `1 - sum` onto the
/// largest entry so the result sums to exactly one.
pub(crate) fn snap_distribution(values: &[f64]) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = values
        .iter()
        .map(|&v| snap_to_rational(v, MAX_DENOMINATOR).unwrap_or_else(BigRational::zero))
        .collect();
    if out.is_empty() {
        return out;
    }
    let sum: BigRational = out.iter().cloned().sum();
    let residual = BigRational::one() - sum;
    if !residual.is_zero() {
        let largest = (0..out.len())
            .max_by(|&a, &b| out[a].cmp(&out[b]).then(b.cmp(&a)))
            .unwrap_or(0);
        out[largest] += residual;
    }
    out
}

/// Rationalized `(mu, nu)`; each side sums to exactly one.
pub fn rational_marginals(p: &Problem) -> (Vec<BigRational>, Vec<BigRational>) {
    (snap_distribution(p.mu()), snap_distribution(p.nu()))
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
