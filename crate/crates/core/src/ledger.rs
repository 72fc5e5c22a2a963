//! Multiplier-module data at the level of divisor coefficients on a log
//! resolution: each divisor `E_i` carries `k_i` (its coefficient in `K_{X'}`)
//! and `a_i` (its coefficient in `F`).
//!
//! Everything here is valuation-level, before pushing forward, so the true
//! jumping numbers form a subset of [`candidate_jumps`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("ledger has no divisors")]
    Empty,
    #[error("divisor {0} has coefficient a = 0 in F")]
    ZeroMultiplicity(usize),
    #[error("window bound must be positive")]
    BadWindow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ledger {
    divisors: Vec<(u64, u64)>,
}

impl Ledger {
    pub fn new(divisors: Vec<(u64, u64)>) -> Result<Self, LedgerError> {
        if divisors.is_empty() {
            return Err(LedgerError::Empty);
        }
        if let Some(i) = divisors.iter().position(|&(_, a)| a == 0) {
            return Err(LedgerError::ZeroMultiplicity(i));
        }
        Ok(Ledger { divisors })
    }

    pub fn divisors(&self) -> &[(u64, u64)] {
        &self.divisors
    }

    /// `floor(lambda * a_i)` for every divisor.
    pub fn floor_vector(&self, lambda: &Rat) -> Vec<BigInt> {
        self.divisors.iter().map(|&(_, a)| (lambda * Rat::from_integer(BigInt::from(a))).floor().to_integer()).collect()
    }

    /// Whether some `floor(lambda * a_i)` exceeds `k_i`.
    pub fn drops_at(&self, lambda: &Rat) -> bool {
        self.floor_vector(lambda).iter().zip(&self.divisors).any(|(f, &(k, _))| f > &BigInt::from(k))
    }
}

/// `min_i (k_i + 1) / a_i`.
pub fn lct_ledger(l: &Ledger) -> Rat {
    l.divisors.iter().map(|&(k, a)| Rat::new(BigInt::from(k + 1), BigInt::from(a))).min().expect("ledger is nonempty")
}

/// All `lambda` in `(0, bound]` with `lambda * a_i` integral and
/// `floor(lambda * a_i) > k_i` for some divisor, ascending.
pub fn candidate_jumps(l: &Ledger, bound: &Rat) -> Result<Vec<Rat>, LedgerError> {
    if !bound.is_positive() {
        return Err(LedgerError::BadWindow);
    }
    let mut out = Vec::new();
    for &(k, a) in &l.divisors {
        let a_big = BigInt::from(a);
        let top = (bound * Rat::from_integer(a_big.clone())).floor().to_integer();
        let mut m = BigInt::from(k + 1);
        while m <= top {
            out.push(Rat::new(m.clone(), a_big.clone()));
            m += 1;
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftReport {
    pub jumps: Vec<Rat>,
    /// Jumps `lambda` with `lambda + 1 <= bound` whose shift is missing.
    pub closure_failures: Vec<Rat>,
    /// Sampled `lambda` where `floor((lambda+1) a) != floor(lambda a) + a`.
    pub floor_failures: Vec<Rat>,
    pub samples: usize,
}

impl ShiftReport {
    pub fn passed(&self) -> bool {
        self.closure_failures.is_empty() && self.floor_failures.is_empty()
    }
}

/// Checks the `+1` closure of the jump set inside `(0, bound]` and the
/// identity `floor((lambda+1) a_i) = floor(lambda a_i) + a_i` at every jump and
/// at the midpoints between consecutive jumps.
pub fn shift_check(l: &Ledger, bound: &Rat) -> Result<ShiftReport, LedgerError> {
    let jumps = candidate_jumps(l, bound)?;
    let one = Rat::one();
    let closure_failures =
        jumps.iter().filter(|j| &(*j + &one) <= bound && jumps.binary_search(&(*j + &one)).is_err()).cloned().collect();
    let mut samples: Vec<Rat> = jumps.clone();
    let mut prev = Rat::zero();
    for j in &jumps {
        samples.push((&prev + j) / Rat::from_integer(BigInt::from(2)));
        prev = j.clone();
    }
    let floor_failures = samples
        .iter()
        .filter(|lam| {
            let now = l.floor_vector(lam);
            let next = l.floor_vector(&(*lam + &one));
            now.iter().zip(&next).zip(&l.divisors).any(|((f0, f1), &(_, a))| f1 != &(f0 + BigInt::from(a)))
        })
        .cloned()
        .collect();
    Ok(ShiftReport { jumps, closure_failures, floor_failures, samples: samples.len() })
}

/// Least common denominator of the jump set, `lcm(a_i)`.
pub fn jump_denominator(l: &Ledger) -> u64 {
    l.divisors.iter().fold(1u64, |acc, &(_, a)| acc.lcm(&a))
}
