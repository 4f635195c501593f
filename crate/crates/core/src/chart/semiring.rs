//! Semirings over log-domain scores.
//!
//! Both semirings multiply by adding log weights; they differ in how
//! alternative derivations of the same item are combined.

use crate::types::is_masked;

pub trait Semiring {
    fn zero() -> f64 {
        f64::NEG_INFINITY
    }

    fn one() -> f64 {
        0.0
    }

    #[inline]
    fn times(a: f64, b: f64) -> f64 {
        a + b
    }

    /// Folds `candidate` into `acc`. Returns `true` when the candidate
    /// becomes the new best alternative (only meaningful for max-product).
    fn plus_assign(acc: &mut f64, candidate: f64) -> bool;
}

/// Viterbi semiring: the best derivation wins, earlier ones on ties.
#[derive(Clone, Copy, Debug)]
pub struct MaxProduct;

/// Log-sum-exp semiring; the chart root is a log-partition function.
#[derive(Clone, Copy, Debug)]
pub struct SumProduct;

impl Semiring for MaxProduct {
    #[inline]
    fn plus_assign(acc: &mut f64, candidate: f64) -> bool {
        if candidate > *acc {
            *acc = candidate;
            true
        } else {
            false
        }
    }
}

impl Semiring for SumProduct {
    #[inline]
    fn plus_assign(acc: &mut f64, candidate: f64) -> bool {
        *acc = log_add(*acc, candidate);
        false
    }
}

/// `log(exp(a) + exp(b))`, exact for infinite arguments.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Maps masked scores to the semiring zero.
#[inline]
pub(crate) fn weight(score: f64) -> f64 {
    if is_masked(score) {
        f64::NEG_INFINITY
    } else {
        score
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_identities() {
        assert_eq!(log_add(f64::NEG_INFINITY, 1.5), 1.5);
        assert_eq!(
            log_add(f64::NEG_INFINITY, f64::NEG_INFINITY),
            f64::NEG_INFINITY
        );
        assert!((log_add(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((log_add(1000.0, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn max_keeps_first_on_tie() {
        let mut acc = MaxProduct::zero();
        assert!(MaxProduct::plus_assign(&mut acc, 1.0));
        assert!(!MaxProduct::plus_assign(&mut acc, 1.0));
        assert!(!MaxProduct::plus_assign(&mut acc, f64::NEG_INFINITY));
    }

    #[test]
    fn masked_becomes_zero() {
        assert_eq!(weight(crate::types::MASKED), f64::NEG_INFINITY);
        assert_eq!(weight(-3.0), -3.0);
    }
}
