use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::rational::{ratio_to_f64, rational_marginals};
use super::Problem;
use crate::error::{Error, Result};

/// Bounds on the `2^m + 2^n` subset-sum enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaLimits {
    pub per_side: usize,
    pub total: usize,
}

impl Default for DeltaLimits {
    fn default() -> Self {
        Self {
            per_side: 20,
            total: 40,
        }
    }
}

/// The smallest nonzero gap `|mu(I) - nu(J)|`, exact and as a float.
#[derive(Debug, Clone, PartialEq)]
pub struct Delta {
    exact: BigRational,
    value: f64,
}

impl Delta {
    pub fn new(exact: BigRational) -> Self {
        let value = ratio_to_f64(&exact);
        Self { exact, value }
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Minimum over subsets `I`, `J` of `|mu(I) - nu(J)|` among unequal pairs,
/// over the rationalized marginals.
pub fn compute_delta(p: &Problem, limits: DeltaLimits) -> Result<Delta> {
    let (m, n) = (p.rows(), p.cols());
    if m > limits.per_side || n > limits.per_side || m + n > limits.total {
        return Err(Error::SizeLimit {
            rows: m,
            cols: n,
            per_side: limits.per_side,
            total: limits.total,
        });
    }
    let (mu, nu) = rational_marginals(p);
    Ok(Delta::new(min_subset_gap(&mu, &nu)))
}

/// Exact minimum nonzero gap between subset sums of `a` and of `b`.
pub(crate) fn min_subset_gap(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let lcm = a
        .iter()
        .chain(b)
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = |r: &BigRational| r.numer() * (&lcm / r.denom());
    let a_int: Vec<BigInt> = a.iter().map(scale).collect();
    let b_int: Vec<BigInt> = b.iter().map(scale).collect();

    // every subset sum is bounded by the side total, so i128 suffices when
    // both totals fit comfortably
    let fits = |v: &[BigInt]| {
        let total: BigInt = v.iter().sum();
        total.bits() < 120
    };
    let gap = if fits(&a_int) && fits(&b_int) {
        let to_i128 = |v: &[BigInt]| -> Vec<i128> { v.iter().map(|x| x.to_i128().unwrap()).collect() };
        BigInt::from(min_gap_scaled(&to_i128(&a_int), &to_i128(&b_int)))
    } else {
        min_gap_scaled(&a_int, &b_int)
    };
    BigRational::new(gap, lcm)
}

fn subset_sums<T>(values: &[T]) -> Vec<T>
where
    T: Clone + Ord + Zero + for<'a> Add<&'a T, Output = T>,
{
    let mut sums = Vec::with_capacity(1 << values.len());
    sums.push(T::zero());
    for v in values {
        let len = sums.len();
        for k in 0..len {
            let s = sums[k].clone() + v;
            sums.push(s);
        }
    }
    sums.sort_unstable();
    sums.dedup();
    sums
}

/// Sorted subset sums on each side, then one merge pass: for each `x` in the
/// first list the nearest unequal neighbours in the second list are the
/// largest element below and the smallest element above.
fn min_gap_scaled<T>(a: &[T], b: &[T]) -> T
where
    T: Clone + Ord + Zero + for<'a> Add<&'a T, Output = T> + for<'a> Sub<&'a T, Output = T>,
{
    let sa = subset_sums(a);
    let sb = subset_sums(b);
    let mut best: Option<T> = None;
    let mut consider = |d: T| {
        if best.as_ref().is_none_or(|b| d < *b) {
            best = Some(d);
        }
    };
    let mut j = 0;
    for x in &sa {
        while j < sb.len() && sb[j] < *x {
            j += 1;
        }
        if j > 0 {
            consider(x.clone() - &sb[j - 1]);
        }
        let above = if j < sb.len() && sb[j] == *x { j + 1 } else { j };
        if above < sb.len() {
            consider(sb[above].clone() - x);
        }
    }
    // both lists contain 0 and a positive total, so a gap always exists
    best.unwrap_or_else(T::zero)
}
