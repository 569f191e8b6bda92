//! Exact iterates of the 2x2 instance with kernel `[[1, 1], [0, 1]]`.
//!
//! After the row update at odd `k` the coupling is `[[a, 1/2 - a], [0, 1/2]]`
//! where `a` follows `a' = (1 - a) / (3 - 4a)` from `a = 1/4`; the column
//! update that follows gives `[[1/2, (1/2 - a) / (2(1 - a))], [0, 1/(4(1 - a))]]`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::problem::ratio_to_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct SoulesIterate {
    pub k: usize,
    pub pi: [[BigRational; 2]; 2],
    /// `l1` marginal error, equal to `1 / (k + 1)`.
    pub e_k: BigRational,
}

impl SoulesIterate {
    pub fn e_k_f64(&self) -> f64 {
        ratio_to_f64(&self.e_k)
    }

    pub fn pi_f64(&self) -> [[f64; 2]; 2] {
        [
            [ratio_to_f64(&self.pi[0][0]), ratio_to_f64(&self.pi[0][1])],
            [ratio_to_f64(&self.pi[1][0]), ratio_to_f64(&self.pi[1][1])],
        ]
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Iterates `k = 1, 2, ...` in order.
#[derive(Debug, Clone)]
pub struct SoulesSequence {
    k: usize,
    a: BigRational,
}

impl Default for SoulesSequence {
    fn default() -> Self {
        Self::new()
    }
}

impl SoulesSequence {
    pub fn new() -> Self {
        Self { k: 0, a: q(1, 4) }
    }
}

impl Iterator for SoulesSequence {
    type Item = SoulesIterate;

    fn next(&mut self) -> Option<SoulesIterate> {
        self.k += 1;
        let one = BigRational::one();
        let half = q(1, 2);
        let a = &self.a;
        let item = if self.k % 2 == 1 {
            SoulesIterate {
                k: self.k,
                pi: [[a.clone(), &half - a], [BigRational::zero(), half.clone()]],
                e_k: &one - a * BigRational::from_integer(2.into()),
            }
        } else {
            let one_minus = &one - a;
            let two = BigRational::from_integer(2.into());
            let four = BigRational::from_integer(4.into());
            let item = SoulesIterate {
                k: self.k,
                pi: [
                    [half.clone(), (&half - a) / (&two * &one_minus)],
                    [BigRational::zero(), one.clone() / (&four * &one_minus)],
                ],
                e_k: (&half - a) / &one_minus,
            };
            self.a = &one_minus / (BigRational::from_integer(3.into()) - &four * a);
            item
        };
        Some(item)
    }
}

/// The exact iterate at `k >= 1`.
pub fn soules_reference(k: usize) -> SoulesIterate {
    SoulesSequence::new()
        .nth(k.max(1) - 1)
        .expect("the sequence is infinite")
}
