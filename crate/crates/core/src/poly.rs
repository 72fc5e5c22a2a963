//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are stored in a `BTreeMap` keyed by exponent vector. The term order
//! used for leading terms, division and printing is graded by weighted degree
//! with ties broken lexicographically under the declared variable order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational coefficient. `BigRational` keeps values in lowest terms
/// with a positive denominator.
pub type Rat = BigRational;

/// Exponent vector, one entry per variable.
pub type Exponents = Vec<u32>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("not divisible")]
    NotDivisible,
    #[error("invalid weight system: {0}")]
    InvalidWeights(String),
}

/// Variable names with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightSystem {
    names: Vec<String>,
    weights: Vec<u32>,
}

impl WeightSystem {
    pub fn new<S: Into<String>>(names: Vec<S>, weights: Vec<u32>) -> Result<Self, PolyError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() != weights.len() {
            return Err(PolyError::InvalidWeights(format!("{} variables but {} weights", names.len(), weights.len())));
        }
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(PolyError::InvalidWeights(format!("weight of {} must be at least 1", names[i])));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(PolyError::InvalidWeights(format!("duplicate variable {n}")));
            }
        }
        Ok(WeightSystem { names, weights })
    }

    /// All weights equal to one.
    pub fn standard<S: Into<String>>(names: Vec<S>) -> Self {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let weights = vec![1; names.len()];
        WeightSystem::new(names, weights).expect("standard weights are valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Weighted degree of a single exponent vector.
    pub fn degree_of(&self, exps: &[u32]) -> u64 {
        exps.iter().zip(&self.weights).map(|(&e, &w)| e as u64 * w as u64).sum()
    }

    /// Term order: weighted degree first, then lexicographic in declared order.
    pub fn cmp_terms(&self, a: &[u32], b: &[u32]) -> Ordering {
        self.degree_of(a).cmp(&self.degree_of(b)).then_with(|| a.cmp(b))
    }

    /// All exponent vectors of the given weighted degree, in ascending term order.
    pub fn monomials_of_degree(&self, degree: u64) -> Vec<Exponents> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.len()];
        self.fill_monomials(0, degree, &mut cur, &mut out);
        // generated in descending lex order; reverse gives ascending
        out.reverse();
        out
    }

    fn fill_monomials(&self, idx: usize, remaining: u64, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if idx == self.len() {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = self.weights[idx] as u64;
        let max = remaining / w;
        for e in (0..=max).rev() {
            cur[idx] = e as u32;
            self.fill_monomials(idx + 1, remaining - e * w, cur, out);
        }
        cur[idx] = 0;
    }
}

/// Result of a weighted degree query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WDegree {
    /// Degree of the zero polynomial; homogeneous of every degree.
    Bottom,
    Homogeneous(u64),
    NotHomogeneous,
}

/// Exact multivariate polynomial. The zero polynomial has no terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rat::one())
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Poly::monomial(nvars, vec![0; nvars], c)
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Poly::monomial(nvars, e, Rat::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: Rat) -> Self {
        assert_eq!(exps.len(), nvars, "exponent arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Rat)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    /// Constant value when the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, exps: Exponents, c: Rat) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_arity(&self, other: &Poly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::ArityMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_arity(other).expect("arity");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.check_arity(other).expect("arity");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    /// Product with a monomial `c * x^exps`.
    pub fn mul_term(&self, exps: &[u32], c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (add_exps(e, exps), v * c)).collect() }
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_arity(other)?;
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(add_exps(e1, e2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// Exact product. Panics on arity mismatch; use [`Poly::try_mul`] to handle it.
    pub fn mul(&self, other: &Poly) -> Poly {
        self.try_mul(other).expect("arity")
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to variable `idx`.
    pub fn derivative(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[idx] > 0 {
                let mut ne = e.clone();
                ne[idx] -= 1;
                out.add_term(ne, c * Rat::from_integer(BigInt::from(e[idx])));
            }
        }
        out
    }

    /// Substitute polynomial `images[i]` (all over a common arity) for variable `i`.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(Poly::nvars).unwrap_or(0);
        let mut out = Poly::zero(target);
        let mut powers: Vec<Vec<Poly>> = vec![vec![Poly::one(target)]; self.nvars];
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][k as usize]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Total degree (all weights one); `None` for zero.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as u64).sum()).max()
    }

    pub fn wdeg(&self, w: &WeightSystem) -> WDegree {
        let mut deg = None;
        for e in self.terms.keys() {
            let d = w.degree_of(e);
            match deg {
                None => deg = Some(d),
                Some(prev) if prev != d => return WDegree::NotHomogeneous,
                _ => {}
            }
        }
        match deg {
            None => WDegree::Bottom,
            Some(d) => WDegree::Homogeneous(d),
        }
    }

    /// Weighted-homogeneous pieces with strictly increasing degrees.
    pub fn homogeneous_components(&self, w: &WeightSystem) -> Vec<(u64, Poly)> {
        let mut parts: BTreeMap<u64, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            parts.entry(w.degree_of(e)).or_insert_with(|| Poly::zero(self.nvars)).add_term(e.clone(), c.clone());
        }
        parts.into_iter().collect()
    }

    /// Leading exponent and coefficient under the weighted term order.
    pub fn leading_term(&self, w: &WeightSystem) -> Option<(&Exponents, &Rat)> {
        self.terms.iter().max_by(|a, b| w.cmp_terms(a.0, b.0))
    }

    /// Multivariate division by a single divisor: `self = divisor * q + r` where no
    /// term of `r` is divisible by the leading monomial of `divisor`.
    pub fn div_rem(&self, divisor: &Poly, w: &WeightSystem) -> Result<(Poly, Poly), PolyError> {
        self.check_arity(divisor)?;
        let (lead_e, lead_c) = divisor.leading_term(w).ok_or(PolyError::DivisionByZero)?;
        let lead_e = lead_e.clone();
        let lead_inv = lead_c.recip();
        let key = |e: &Exponents| (w.degree_of(e), e.clone());
        let mut work: BTreeMap<(u64, Exponents), Rat> = self.terms.iter().map(|(e, c)| (key(e), c.clone())).collect();
        let mut quot = Poly::zero(self.nvars);
        let mut rem = Poly::zero(self.nvars);
        while let Some(((_, e), c)) = work.pop_last() {
            match sub_exps(&e, &lead_e) {
                Some(shift) => {
                    let qc = &c * &lead_inv;
                    for (de, dc) in &divisor.terms {
                        if *de == lead_e {
                            continue;
                        }
                        let ne = add_exps(de, &shift);
                        let k = key(&ne);
                        let v = work.entry(k.clone()).or_insert_with(Rat::zero);
                        *v -= &qc * dc;
                        if v.is_zero() {
                            work.remove(&k);
                        }
                    }
                    quot.add_term(shift, qc);
                }
                None => rem.add_term(e, c),
            }
        }
        Ok((quot, rem))
    }

    /// Exact quotient `self / divisor`, or `NotDivisible` when a remainder survives.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        let w = WeightSystem::standard((0..self.nvars).map(|i| format!("x{i}")).collect());
        let (q, r) = self.div_rem(divisor, &w)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::NotDivisible)
        }
    }

    /// Render with the given variable names, highest term first.
    pub fn display(&self, names: &[String], w: &WeightSystem) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| w.cmp_terms(b.0, a.0));
        let mut out = String::new();
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = format_monomial(e, names);
            if mono.is_empty() {
                write!(out, "{}", abs).unwrap();
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                write!(out, "{}*{}", abs, mono).unwrap();
            }
        }
        out
    }
}

pub(crate) fn format_monomial(e: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], k)),
        }
    }
    parts.join("*")
}

pub fn add_exps(a: &[u32], b: &[u32]) -> Exponents {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `a - b` when `b` divides `a` componentwise.
pub fn sub_exps(a: &[u32], b: &[u32]) -> Option<Exponents> {
    a.iter().zip(b).map(|(&x, &y)| x.checked_sub(y)).collect()
}

pub fn divides(b: &[u32], a: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| y <= x)
}

/// Exact conversion of a rational known to be integral.
pub fn rat_to_i64(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> WeightSystem {
        WeightSystem::standard(vec!["x", "y"])
    }

    fn p(terms: &[(&[u32], i64)]) -> Poly {
        Poly::from_terms(2, terms.iter().map(|(e, c)| (e.to_vec(), rat_int(*c))))
    }

    #[test]
    fn binomial_product() {
        let a = p(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let b = p(&[(&[1, 0], 1), (&[0, 1], -1)]);
        assert_eq!(a.mul(&b), p(&[(&[2, 0], 1), (&[0, 2], -1)]));
    }

    #[test]
    fn cusp_times_x() {
        let g = p(&[(&[3, 0], 1), (&[0, 2], 1)]);
        let x = Poly::var(2, 0);
        let prod = g.mul(&x);
        assert_eq!(prod, p(&[(&[4, 0], 1), (&[1, 2], 1)]));
        assert_eq!(prod.exact_div(&g).unwrap(), x);
        assert!(g.mul(&Poly::zero(2)).is_zero());
    }

    #[test]
    fn exact_div_cases() {
        let a = p(&[(&[2, 0], 1), (&[0, 2], 1)]);
        let x = Poly::var(2, 0);
        assert_eq!(a.exact_div(&x), Err(PolyError::NotDivisible));
        assert!(Poly::zero(2).exact_div(&a).unwrap().is_zero());
        assert_eq!(a.exact_div(&Poly::zero(2)), Err(PolyError::DivisionByZero));
    }

    #[test]
    fn arity_mismatch_is_reported() {
        assert_eq!(Poly::one(2).try_mul(&Poly::one(3)), Err(PolyError::ArityMismatch(2, 3)));
    }

    #[test]
    fn weighted_degrees() {
        let w = WeightSystem::new(vec!["x", "y"], vec![2, 3]).unwrap();
        let g = p(&[(&[3, 0], 1), (&[0, 2], 1)]);
        assert_eq!(g.wdeg(&w), WDegree::Homogeneous(6));
        let q = WeightSystem::standard(vec!["x", "y", "z"]);
        let quad =
            Poly::from_terms(3, [vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]].into_iter().map(|e| (e, rat_int(1))));
        assert_eq!(quad.wdeg(&q), WDegree::Homogeneous(2));
        let w12 = WeightSystem::new(vec!["x", "y"], vec![1, 2]).unwrap();
        assert_eq!(p(&[(&[1, 0], 1), (&[0, 1], 1)]).wdeg(&w12), WDegree::NotHomogeneous);
        assert_eq!(Poly::zero(2).wdeg(&w12), WDegree::Bottom);
    }

    #[test]
    fn components() {
        let w21 = WeightSystem::new(vec!["x", "y"], vec![2, 1]).unwrap();
        let a = p(&[(&[1, 0], 1), (&[0, 2], 1)]);
        assert_eq!(a.homogeneous_components(&w21), vec![(2, a.clone())]);
        let w12 = WeightSystem::new(vec!["x", "y"], vec![1, 2]).unwrap();
        let b = p(&[(&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(b.homogeneous_components(&w12), vec![(1, Poly::var(2, 0)), (2, Poly::var(2, 1))]);
        assert!(Poly::zero(2).homogeneous_components(&w12).is_empty());
    }

    #[test]
    fn monomial_enumeration_by_weight() {
        let w = WeightSystem::new(vec!["x", "y"], vec![2, 3]).unwrap();
        assert_eq!(w.monomials_of_degree(6), vec![vec![0, 2], vec![3, 0]]);
        assert!(w.monomials_of_degree(1).is_empty());
        assert_eq!(w.monomials_of_degree(0), vec![vec![0, 0]]);
        let s = WeightSystem::standard(vec!["x", "y", "z"]);
        assert_eq!(s.monomials_of_degree(2).len(), 6);
    }

    #[test]
    fn display_is_ordered() {
        let w = xy();
        let q =
            Poly::from_terms(2, vec![(vec![0, 0], rat(-1, 2)), (vec![1, 1], rat_int(3)), (vec![0, 2], rat_int(-1))]);
        assert_eq!(q.display(w.names(), &w), "3*x*y - y^2 - 1/2");
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(WeightSystem::new(vec!["x"], vec![0]).is_err());
        assert!(WeightSystem::new(vec!["x", "y"], vec![1]).is_err());
        assert!(WeightSystem::new(vec!["x", "x"], vec![1, 1]).is_err());
    }
}
