//! The local cohomology module `H^1_g(S) = S[1/g] / S` of a weighted
//! homogeneous hypersurface.
//!
//! Elements are finite sums `h_k / g^k` (k >= 1) modulo polynomials. The
//! canonical representative keeps every numerator reduced modulo `g`: writing
//! `h = g q + r` moves `q` down one pole order, and at pole order one the
//! polynomial part is dropped. Since `{g}` is a Groebner basis of `(g)` for
//! any term order, the remainder is unique and two elements are equal exactly
//! when their canonical forms coincide.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::{divides, Exponents, Poly, Rat, WDegree, WeightSystem};
use crate::weyl::WeylOp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocohError {
    #[error("g must be nonzero")]
    ZeroEquation,
    #[error("g is not weighted homogeneous")]
    NotHomogeneous,
    #[error("weighted degree of g is {0}, at least 2 is required")]
    DegreeTooSmall(u64),
    #[error("g has {0} variables but the weight system has {1}")]
    ArityMismatch(usize, usize),
    #[error("only hypersurfaces are supported, got {0} equations")]
    UnsupportedCodimension(usize),
    #[error("element is not weight-homogeneous")]
    ElementNotHomogeneous,
    #[error("the zero element has no eigenvalue")]
    ZeroElement,
    #[error("elements live over different hypersurfaces")]
    ContextMismatch,
}

/// A hypersurface `g = 0` with its weight system.
#[derive(Debug)]
pub struct HyperData {
    g: Poly,
    weights: WeightSystem,
    degree: u64,
    g_partials: Vec<Poly>,
    lead: Exponents,
}

impl HyperData {
    pub fn new(g: Poly, weights: WeightSystem) -> Result<Arc<Self>, LocohError> {
        if g.nvars() != weights.len() {
            return Err(LocohError::ArityMismatch(g.nvars(), weights.len()));
        }
        let degree = match g.wdeg(&weights) {
            WDegree::Bottom => return Err(LocohError::ZeroEquation),
            WDegree::NotHomogeneous => return Err(LocohError::NotHomogeneous),
            WDegree::Homogeneous(d) => d,
        };
        if degree < 2 {
            return Err(LocohError::DegreeTooSmall(degree));
        }
        let g_partials = (0..g.nvars()).map(|i| g.derivative(i)).collect();
        let lead = g.leading_term(&weights).expect("nonzero").0.clone();
        Ok(Arc::new(HyperData { g, weights, degree, g_partials, lead }))
    }

    /// Accepts a list of defining equations; anything but a single equation is
    /// rejected.
    pub fn from_equations(mut gs: Vec<Poly>, weights: WeightSystem) -> Result<Arc<Self>, LocohError> {
        if gs.len() != 1 {
            return Err(LocohError::UnsupportedCodimension(gs.len()));
        }
        HyperData::new(gs.pop().unwrap(), weights)
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.weights
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.g.nvars()
    }

    /// Leading monomial of `g`; canonical numerators avoid its multiples.
    pub fn leading_monomial(&self) -> &Exponents {
        &self.lead
    }

    /// Canonical form of `sum raw[k] / g^k`. Entries with `k <= 0` are polynomials
    /// and vanish in the quotient.
    pub fn reduce(self: &Arc<Self>, raw: &BTreeMap<i64, Poly>) -> LocCohElem {
        let mut terms = BTreeMap::new();
        let top = raw.keys().next_back().copied().unwrap_or(0);
        let mut carry = Poly::zero(self.nvars());
        let mut k = top;
        while k >= 1 {
            let h = match raw.get(&k) {
                Some(p) => p.add(&carry),
                None => carry.clone(),
            };
            if h.is_zero() {
                carry = h;
            } else {
                let (q, r) = h.div_rem(&self.g, &self.weights).expect("g is nonzero");
                if !r.is_zero() {
                    terms.insert(k as u32, r);
                }
                carry = q;
            }
            k -= 1;
        }
        LocCohElem { ctx: Arc::clone(self), terms }
    }

    pub fn zero(self: &Arc<Self>) -> LocCohElem {
        LocCohElem { ctx: Arc::clone(self), terms: BTreeMap::new() }
    }

    /// `h / g^k`, reduced.
    pub fn fraction(self: &Arc<Self>, h: Poly, k: u32) -> LocCohElem {
        let mut raw = BTreeMap::new();
        raw.insert(k as i64, h);
        self.reduce(&raw)
    }

    /// Basis of the weight-`lambda` part of `span{h / g^k : k <= pole_cap}`:
    /// standard monomials (not divisible by the leading monomial of `g`) over
    /// each admissible power of `g`, pole order ascending, monomials descending.
    pub fn weight_basis(self: &Arc<Self>, lambda: i64, pole_cap: u32) -> Vec<LocCohElem> {
        let n = self.nvars();
        let mut out = Vec::new();
        for k in 1..=pole_cap {
            let deg = lambda + self.degree as i64 * k as i64;
            if deg < 0 {
                continue;
            }
            let mut monos = self.weights.monomials_of_degree(deg as u64);
            monos.reverse();
            for e in monos {
                if divides(&self.lead, &e) {
                    continue;
                }
                let mut terms = BTreeMap::new();
                terms.insert(k, Poly::monomial(n, e, Rat::one()));
                out.push(LocCohElem { ctx: Arc::clone(self), terms });
            }
        }
        out
    }
}

/// Element of `H^1_g(S)` in canonical form.
#[derive(Debug, Clone)]
pub struct LocCohElem {
    ctx: Arc<HyperData>,
    terms: BTreeMap<u32, Poly>,
}

impl PartialEq for LocCohElem {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl LocCohElem {
    pub fn context(&self) -> &Arc<HyperData> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Canonical numerators keyed by pole order.
    pub fn numerators(&self) -> &BTreeMap<u32, Poly> {
        &self.terms
    }

    pub fn pole_order(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn same_context(&self, other: &LocCohElem) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx)
    }

    fn raw(&self) -> BTreeMap<i64, Poly> {
        self.terms.iter().map(|(&k, h)| (k as i64, h.clone())).collect()
    }

    pub fn add(&self, other: &LocCohElem) -> LocCohElem {
        assert!(self.same_context(other), "context mismatch");
        // sums of canonical numerators stay canonical
        let mut terms = self.terms.clone();
        for (k, h) in &other.terms {
            let e = terms.entry(*k).or_insert_with(|| Poly::zero(h.nvars()));
            *e = e.add(h);
            if e.is_zero() {
                terms.remove(k);
            }
        }
        LocCohElem { ctx: Arc::clone(&self.ctx), terms }
    }

    pub fn sub(&self, other: &LocCohElem) -> LocCohElem {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> LocCohElem {
        if c.is_zero() {
            return self.ctx.zero();
        }
        LocCohElem { ctx: Arc::clone(&self.ctx), terms: self.terms.iter().map(|(k, h)| (*k, h.scale(c))).collect() }
    }

    pub fn mul_poly(&self, p: &Poly) -> LocCohElem {
        let raw = self.terms.iter().map(|(&k, h)| (k as i64, p.mul(h))).collect();
        self.ctx.reduce(&raw)
    }

    /// Multiplication by the monomial `x^e` (unit coefficient).
    pub fn mul_monomial(&self, e: &[u32]) -> LocCohElem {
        let raw = self.terms.iter().map(|(&k, h)| (k as i64, h.mul_term(e, &Rat::one()))).collect();
        self.ctx.reduce(&raw)
    }

    /// `d/dx_j` by the quotient rule.
    pub fn derivative(&self, j: usize) -> LocCohElem {
        self.ctx.reduce(&derive_raw(&self.ctx, &self.raw(), j))
    }

    /// Action of a differential operator.
    pub fn act(&self, op: &WeylOp) -> LocCohElem {
        assert_eq!(op.nvars(), self.ctx.nvars(), "operator arity");
        let mut total: BTreeMap<i64, Poly> = BTreeMap::new();
        for (alpha, coeff) in op.terms() {
            let mut cur = self.clone();
            for (j, &a) in alpha.iter().enumerate() {
                for _ in 0..a {
                    if cur.is_zero() {
                        break;
                    }
                    cur = cur.derivative(j);
                }
            }
            for (k, h) in cur.terms {
                let e = total.entry(k as i64).or_insert_with(|| Poly::zero(h.nvars()));
                *e = e.add(&coeff.mul(&h));
            }
        }
        self.ctx.reduce(&total)
    }

    /// Structural weight `wdeg(h) - d*k`, common to all terms, if any.
    pub fn weight(&self) -> Result<i64, LocohError> {
        let d = self.ctx.degree as i64;
        let mut w = None;
        for (&k, h) in &self.terms {
            let this = match h.wdeg(&self.ctx.weights) {
                WDegree::Homogeneous(e) => e as i64 - d * k as i64,
                WDegree::Bottom => continue,
                WDegree::NotHomogeneous => return Err(LocohError::ElementNotHomogeneous),
            };
            match w {
                None => w = Some(this),
                Some(prev) if prev != this => return Err(LocohError::ElementNotHomogeneous),
                _ => {}
            }
        }
        w.ok_or(LocohError::ZeroElement)
    }

    /// Eigenvalue of the weighted Euler operator, computed from its action.
    pub fn euler_eigenvalue(&self) -> Result<Rat, LocohError> {
        let (k, h) = self.terms.iter().next_back().ok_or(LocohError::ZeroElement)?;
        let image = self.act(&WeylOp::euler(&self.ctx.weights));
        let (e, c) = h.terms().next().expect("stored numerators are nonzero");
        let ic = image.terms.get(k).map(|p| p.coeff(e)).unwrap_or_else(Rat::zero);
        let lambda = ic / c;
        if image == self.scale(&lambda) {
            Ok(lambda)
        } else {
            Err(LocohError::ElementNotHomogeneous)
        }
    }

    /// Coordinates `((pole, monomial), coefficient)` of the canonical form.
    pub fn coords(&self) -> impl Iterator<Item = ((u32, &Exponents), &Rat)> {
        self.terms.iter().flat_map(|(k, h)| h.terms().map(move |(e, c)| ((*k, e), c)))
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let names = self.ctx.weights.names();
        let mut parts: Vec<String> = Vec::new();
        for (k, h) in &self.terms {
            let denom = if *k == 1 { "g".to_string() } else { format!("g^{k}") };
            let num = h.display(names, &self.ctx.weights);
            let single = h.len() == 1;
            parts.push(if single { format!("{num}/{denom}") } else { format!("({num})/{denom}") });
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        out
    }
}

pub(crate) fn derive_raw(ctx: &HyperData, raw: &BTreeMap<i64, Poly>, j: usize) -> BTreeMap<i64, Poly> {
    let mut out: BTreeMap<i64, Poly> = BTreeMap::new();
    let dg = &ctx.g_partials[j];
    for (&k, h) in raw {
        let dh = h.derivative(j);
        if !dh.is_zero() {
            let e = out.entry(k).or_insert_with(|| Poly::zero(h.nvars()));
            *e = e.add(&dh);
        }
        if k != 0 && !dg.is_zero() {
            let t = h.mul(dg).scale(&Rat::from_integer(BigInt::from(-k)));
            let e = out.entry(k + 1).or_insert_with(|| Poly::zero(h.nvars()));
            *e = e.add(&t);
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int};

    fn quadric() -> Arc<HyperData> {
        let w = WeightSystem::standard(vec!["x", "y", "z"]);
        let g = Poly::from_terms(3, [vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]].into_iter().map(|e| (e, rat_int(1))));
        HyperData::new(g, w).unwrap()
    }

    fn cusp() -> Arc<HyperData> {
        let w = WeightSystem::new(vec!["x", "y"], vec![2, 3]).unwrap();
        let g = Poly::from_terms(2, vec![(vec![3, 0], rat_int(1)), (vec![0, 2], rat_int(1))]);
        HyperData::new(g, w).unwrap()
    }

    fn mono(n: usize, e: &[u32]) -> Poly {
        Poly::monomial(n, e.to_vec(), rat_int(1))
    }

    #[test]
    fn reduce_cancels_g() {
        let ctx = cusp();
        let g = ctx.g().clone();
        let x = mono(2, &[1, 0]);
        let y = mono(2, &[0, 1]);
        assert_eq!(ctx.fraction(x.mul(&g), 2), ctx.fraction(x.clone(), 1));
        assert!(ctx.fraction(g.clone(), 1).is_zero());
        let mixed = ctx.fraction(x.mul(&g).add(&y), 2);
        let expected = ctx.fraction(x, 1).add(&ctx.fraction(y, 2));
        assert_eq!(mixed, expected);
        assert!(ctx.fraction(g.mul(&g), 2).is_zero());
    }

    #[test]
    fn construction_errors() {
        let w = WeightSystem::standard(vec!["x", "y"]);
        assert_eq!(HyperData::new(Poly::zero(2), w.clone()).unwrap_err(), LocohError::ZeroEquation);
        let inhom = Poly::var(2, 0).add(&mono(2, &[0, 2]));
        assert_eq!(HyperData::new(inhom, w.clone()).unwrap_err(), LocohError::NotHomogeneous);
        assert_eq!(HyperData::new(Poly::var(2, 0), w.clone()).unwrap_err(), LocohError::DegreeTooSmall(1));
        let g = mono(2, &[2, 0]);
        assert_eq!(
            HyperData::from_equations(vec![g.clone(), g], w).unwrap_err(),
            LocohError::UnsupportedCodimension(2)
        );
    }

    #[test]
    fn quadric_second_derivative() {
        let ctx = quadric();
        let inv = ctx.fraction(Poly::one(3), 1);
        let dx2 = WeylOp::d(3, 0).pow(2);
        let lhs = inv.act(&dx2);
        let expected = ctx
            .fraction(Poly::constant(3, rat_int(-2)), 2)
            .add(&ctx.fraction(mono(3, &[2, 0, 0]).scale(&rat_int(8)), 3));
        assert_eq!(lhs, expected);
        let xdx = WeylOp::euler_along(3, 0);
        let lhs2 = inv.act(&xdx.pow(2));
        let g = ctx.g().clone();
        let num = g.mul(&mono(3, &[2, 0, 0])).scale(&rat_int(-4)).add(&mono(3, &[4, 0, 0]).scale(&rat_int(8)));
        assert_eq!(lhs2, ctx.fraction(num, 3));
    }

    #[test]
    fn cusp_dy_action() {
        let ctx = cusp();
        let xy = ctx.fraction(mono(2, &[1, 1]), 1);
        let got = xy.act(&WeylOp::d(2, 1));
        let expected = ctx.fraction(mono(2, &[1, 0]), 1).sub(&ctx.fraction(mono(2, &[1, 2]).scale(&rat_int(2)), 2));
        assert_eq!(got, expected);
    }

    #[test]
    fn cusp_functional_equation_vanishes() {
        let ctx = cusp();
        let x_over_g = ctx.fraction(mono(2, &[1, 0]), 1);
        let xy_over_g = ctx.fraction(mono(2, &[1, 1]), 1);
        let op = WeylOp::euler_along(2, 0).add(&WeylOp::scalar(2, rat(1, 2)));
        let sum = x_over_g.act(&op).add(&xy_over_g.act(&WeylOp::d(2, 1)).scale(&rat(3, 2)));
        assert!(sum.is_zero());
        assert!(!x_over_g.is_zero());
    }

    #[test]
    fn weight_basis_quadric() {
        let ctx = quadric();
        let b = ctx.weight_basis(-2, 1);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].display(), "1/g");
        let b = ctx.weight_basis(-1, 1);
        let shown: Vec<String> = b.iter().map(LocCohElem::display).collect();
        assert_eq!(shown, vec!["x/g", "y/g", "z/g"]);
        assert_eq!(ctx.weight_basis(0, 1).len(), 5);
    }

    #[test]
    fn euler_eigenvalues() {
        let c = cusp();
        assert_eq!(c.fraction(mono(2, &[1, 0]), 1).euler_eigenvalue(), Ok(rat_int(-4)));
        let q = quadric();
        let inv = q.fraction(Poly::one(3), 1);
        assert_eq!(inv.euler_eigenvalue(), Ok(rat_int(-2)));
        let mixed = inv.add(&q.fraction(mono(3, &[1, 0, 0]), 1));
        assert_eq!(mixed.euler_eigenvalue(), Err(LocohError::ElementNotHomogeneous));
        assert_eq!(q.zero().euler_eigenvalue(), Err(LocohError::ZeroElement));
    }

    #[test]
    fn multiplication_by_g_lowers_pole() {
        let ctx = cusp();
        let h = mono(2, &[1, 1]);
        let g = ctx.g().clone();
        assert_eq!(ctx.fraction(h.clone(), 3).mul_poly(&g), ctx.fraction(h.clone(), 2));
        assert!(ctx.fraction(h, 1).mul_poly(&g).is_zero());
    }
}
