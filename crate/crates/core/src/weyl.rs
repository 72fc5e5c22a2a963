//! Differential operators with polynomial coefficients, kept in normal order
//! `sum h_a * d^a` (coefficients on the left).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::poly::{add_exps, format_monomial, Exponents, Poly, Rat, WeightSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("operator arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("operator is not homogeneous for the V-degree")]
    Inhomogeneous,
    #[error("zero operator has no V-degree")]
    ZeroOperator,
    #[error("variable index {0} out of range")]
    BadVariable(usize),
}

/// Normal-ordered element of the Weyl algebra on `nvars` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylOp {
    nvars: usize,
    terms: BTreeMap<Exponents, Poly>,
}

impl WeylOp {
    pub fn zero(nvars: usize) -> Self {
        WeylOp { nvars, terms: BTreeMap::new() }
    }

    pub fn identity(nvars: usize) -> Self {
        WeylOp::from_poly(Poly::one(nvars))
    }

    pub fn scalar(nvars: usize, c: Rat) -> Self {
        WeylOp::from_poly(Poly::constant(nvars, c))
    }

    /// Multiplication by a polynomial.
    pub fn from_poly(p: Poly) -> Self {
        let nvars = p.nvars();
        let mut op = WeylOp::zero(nvars);
        op.add_term(vec![0; nvars], p);
        op
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        WeylOp::from_poly(Poly::var(nvars, idx))
    }

    /// The partial derivative `d/dx_idx`.
    pub fn d(nvars: usize, idx: usize) -> Self {
        let mut a = vec![0; nvars];
        a[idx] = 1;
        let mut op = WeylOp::zero(nvars);
        op.add_term(a, Poly::one(nvars));
        op
    }

    /// `coeff * x^x_exps * d^d_exps`.
    pub fn monomial(nvars: usize, x_exps: Exponents, d_exps: Exponents, coeff: Rat) -> Self {
        let mut op = WeylOp::zero(nvars);
        op.add_term(d_exps, Poly::monomial(nvars, x_exps, coeff));
        op
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Poly)> {
        self.terms.iter()
    }

    /// Highest total order of the derivative part.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, d_exps: Exponents, coeff: Poly) {
        debug_assert_eq!(d_exps.len(), self.nvars);
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(d_exps.clone()).or_insert_with(|| Poly::zero(coeff.nvars()));
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&d_exps);
        }
    }

    pub fn add(&self, other: &WeylOp) -> WeylOp {
        assert_eq!(self.nvars, other.nvars, "operator arity");
        let mut out = self.clone();
        for (a, h) in &other.terms {
            out.add_term(a.clone(), h.clone());
        }
        out
    }

    pub fn sub(&self, other: &WeylOp) -> WeylOp {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> WeylOp {
        let mut out = WeylOp::zero(self.nvars);
        for (a, h) in &self.terms {
            out.add_term(a.clone(), h.scale(c));
        }
        out
    }

    /// Left multiplication by a polynomial, which keeps normal order.
    pub fn mul_poly_left(&self, p: &Poly) -> WeylOp {
        let mut out = WeylOp::zero(self.nvars);
        for (a, h) in &self.terms {
            out.add_term(a.clone(), p.mul(h));
        }
        out
    }

    pub fn try_compose(&self, other: &WeylOp) -> Result<WeylOp, WeylError> {
        if self.nvars != other.nvars {
            return Err(WeylError::ArityMismatch(self.nvars, other.nvars));
        }
        let mut out = WeylOp::zero(self.nvars);
        for (alpha, h) in &self.terms {
            for (beta, k) in &other.terms {
                // d^alpha k = sum_gamma C(alpha, gamma) (d^gamma k) d^(alpha - gamma)
                for gamma in sub_multi_indices(alpha) {
                    let dk = derive_multi(k, &gamma);
                    if dk.is_zero() {
                        continue;
                    }
                    let c = multi_binomial(alpha, &gamma);
                    let rest: Exponents = alpha.iter().zip(&gamma).map(|(a, g)| a - g).collect();
                    out.add_term(add_exps(&rest, beta), h.mul(&dk).scale(&c));
                }
            }
        }
        Ok(out)
    }

    /// Normal-ordered product `self * other`.
    pub fn compose(&self, other: &WeylOp) -> WeylOp {
        self.try_compose(other).expect("operator arity")
    }

    pub fn pow(&self, k: u32) -> WeylOp {
        let mut out = WeylOp::identity(self.nvars);
        for _ in 0..k {
            out = out.compose(self);
        }
        out
    }

    /// Classical adjoint: `h d^a` maps to `(-d)^a h`, renormalized.
    pub fn adjoint(&self) -> WeylOp {
        let mut out = WeylOp::zero(self.nvars);
        for (alpha, h) in &self.terms {
            let sign = if alpha.iter().sum::<u32>() % 2 == 0 { Rat::one() } else { -Rat::one() };
            for gamma in sub_multi_indices(alpha) {
                let dh = derive_multi(h, &gamma);
                if dh.is_zero() {
                    continue;
                }
                let c = multi_binomial(alpha, &gamma) * &sign;
                let rest: Exponents = alpha.iter().zip(&gamma).map(|(a, g)| a - g).collect();
                out.add_term(rest, dh.scale(&c));
            }
        }
        out
    }

    /// Action on a polynomial by the Leibniz rule.
    pub fn apply(&self, h: &Poly) -> Poly {
        assert_eq!(self.nvars, h.nvars(), "operator arity");
        let mut out = Poly::zero(self.nvars);
        for (alpha, coeff) in &self.terms {
            let dh = derive_multi(h, alpha);
            if !dh.is_zero() {
                out = out.add(&coeff.mul(&dh));
            }
        }
        out
    }

    /// Weighted Euler operator `sum w_i x_i d_i`.
    pub fn euler(w: &WeightSystem) -> WeylOp {
        let n = w.len();
        let mut op = WeylOp::zero(n);
        for (i, &wi) in w.weights().iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            op.add_term(e.clone(), Poly::monomial(n, e, Rat::from_integer(BigInt::from(wi))));
        }
        op
    }

    /// `x_v d_v`.
    pub fn euler_along(nvars: usize, v: usize) -> WeylOp {
        let mut e = vec![0; nvars];
        e[v] = 1;
        WeylOp::monomial(nvars, e.clone(), e, Rat::one())
    }

    /// Degree along variable `v` (`deg x_v - deg d_v`) shared by every term.
    pub fn v_degree(&self, v: usize) -> Result<i64, WeylError> {
        if v >= self.nvars {
            return Err(WeylError::BadVariable(v));
        }
        let mut deg = None;
        for (alpha, h) in &self.terms {
            for (e, _) in h.terms() {
                let d = e[v] as i64 - alpha[v] as i64;
                match deg {
                    None => deg = Some(d),
                    Some(prev) if prev != d => return Err(WeylError::Inhomogeneous),
                    _ => {}
                }
            }
        }
        deg.ok_or(WeylError::ZeroOperator)
    }

    /// Smallest `deg x_v - deg d_v` over all terms, so the operator lies in
    /// `V^j` along `x_v` exactly when `j` is at most this value.
    pub fn v_order(&self, v: usize) -> Result<i64, WeylError> {
        if v >= self.nvars {
            return Err(WeylError::BadVariable(v));
        }
        self.terms
            .iter()
            .flat_map(|(alpha, h)| h.terms().map(move |(e, _)| e[v] as i64 - alpha[v] as i64))
            .min()
            .ok_or(WeylError::ZeroOperator)
    }

    /// Linear change of coordinates. `x_images[i]` expresses old `x_i` in the
    /// new variables; `d_images[i]` expresses old `d_i` as a constant-coefficient
    /// first-order operator in the new variables.
    pub fn change_coordinates(&self, x_images: &[Poly], d_images: &[WeylOp]) -> WeylOp {
        assert_eq!(x_images.len(), self.nvars);
        assert_eq!(d_images.len(), self.nvars);
        let target = d_images.first().map(WeylOp::nvars).unwrap_or(0);
        let mut out = WeylOp::zero(target);
        for (alpha, h) in &self.terms {
            let mut d_part = WeylOp::identity(target);
            for (i, &k) in alpha.iter().enumerate() {
                d_part = d_part.compose(&d_images[i].pow(k));
            }
            out = out.add(&d_part.mul_poly_left(&h.substitute(x_images)));
        }
        out
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let w = WeightSystem::standard(names.to_vec());
        let dnames: Vec<String> = names.iter().map(|n| format!("d{n}")).collect();
        let mut parts = Vec::new();
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|a, b| w.cmp_terms(b.0, a.0));
        for (alpha, h) in ordered {
            let dm = format_monomial(alpha, &dnames);
            let hs = h.display(names, &w);
            parts.push(if dm.is_empty() {
                hs
            } else if h.as_constant().is_some_and(|c| c.is_one()) {
                dm
            } else if h.len() == 1 && h.as_constant().is_some_and(|c| c == -Rat::one()) {
                format!("-{dm}")
            } else if h.len() == 1 {
                format!("{hs}*{dm}")
            } else {
                format!("({hs})*{dm}")
            });
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

/// `d^alpha h`.
pub fn derive_multi(h: &Poly, alpha: &[u32]) -> Poly {
    let mut out = h.clone();
    for (i, &k) in alpha.iter().enumerate() {
        for _ in 0..k {
            if out.is_zero() {
                return out;
            }
            out = out.derivative(i);
        }
    }
    out
}

fn sub_multi_indices(alpha: &[u32]) -> Vec<Exponents> {
    let mut out = vec![Vec::with_capacity(alpha.len())];
    for &a in alpha {
        let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
        for prefix in &out {
            for g in 0..=a {
                let mut p = prefix.clone();
                p.push(g);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn multi_binomial(alpha: &[u32], gamma: &[u32]) -> Rat {
    let mut r = BigInt::one();
    for (&a, &g) in alpha.iter().zip(gamma) {
        r *= binomial(a, g);
    }
    Rat::from_integer(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn canonical_commutation() {
        let dx = WeylOp::d(1, 0);
        let x = WeylOp::var(1, 0);
        let xdx = WeylOp::euler_along(1, 0);
        assert_eq!(dx.compose(&x), xdx.add(&WeylOp::identity(1)));
        let sq = xdx.compose(&xdx);
        let expected = WeylOp::monomial(1, vec![2], vec![2], rat_int(1)).add(&xdx);
        assert_eq!(sq, expected);
    }

    #[test]
    fn s_operator_from_t() {
        // -(dt t) = -t dt - 1
        let dt = WeylOp::d(1, 0);
        let t = WeylOp::var(1, 0);
        let s = dt.compose(&t).scale(&rat_int(-1));
        let expected = WeylOp::euler_along(1, 0).scale(&rat_int(-1)).add(&WeylOp::scalar(1, rat_int(-1)));
        assert_eq!(s, expected);
    }

    #[test]
    fn adjoint_examples() {
        let xdx = WeylOp::euler_along(2, 0);
        let expected = xdx.scale(&rat_int(-1)).add(&WeylOp::scalar(2, rat_int(-1)));
        assert_eq!(xdx.adjoint(), expected);
        let x2dy = WeylOp::monomial(2, vec![2, 0], vec![0, 1], rat_int(1));
        assert_eq!(x2dy.adjoint().adjoint(), x2dy);
        let dxdy = WeylOp::monomial(2, vec![0, 0], vec![1, 1], rat_int(1));
        assert_eq!(dxdy.adjoint(), dxdy);
    }

    #[test]
    fn apply_examples() {
        let x2 = Poly::monomial(1, vec![2], rat_int(1));
        assert_eq!(WeylOp::d(1, 0).apply(&x2), Poly::monomial(1, vec![1], rat_int(2)));
        let x3 = Poly::monomial(1, vec![3], rat_int(1));
        assert_eq!(WeylOp::euler_along(1, 0).apply(&x3), x3.scale(&rat_int(3)));
    }

    #[test]
    fn euler_operators() {
        let w = WeightSystem::new(vec!["x", "y"], vec![2, 3]).unwrap();
        let th = WeylOp::euler(&w);
        let expected = WeylOp::euler_along(2, 0).scale(&rat_int(2)).add(&WeylOp::euler_along(2, 1).scale(&rat_int(3)));
        assert_eq!(th, expected);
        assert!(th.apply(&Poly::one(2)).is_zero());
        let g = Poly::from_terms(2, vec![(vec![3, 0], rat_int(1)), (vec![0, 2], rat_int(1))]);
        assert_eq!(th.apply(&g), g.scale(&rat_int(6)));
        let std = WeightSystem::standard(vec!["x", "y"]);
        assert_eq!(WeylOp::euler(&std), WeylOp::euler_along(2, 0).add(&WeylOp::euler_along(2, 1)));
    }

    #[test]
    fn v_degrees() {
        let x2dy = WeylOp::monomial(2, vec![2, 0], vec![0, 1], rat_int(1));
        assert_eq!(x2dy.v_degree(0), Ok(2));
        let tdt = WeylOp::euler_along(1, 0);
        assert_eq!(tdt.v_degree(0), Ok(0));
        let dt2t = WeylOp::d(1, 0).pow(2).compose(&WeylOp::var(1, 0));
        assert_eq!(dt2t.v_degree(0), Ok(-1));
        let mixed = WeylOp::var(1, 0).add(&WeylOp::identity(1));
        assert_eq!(mixed.v_degree(0), Err(WeylError::Inhomogeneous));
        assert_eq!(WeylOp::zero(1).v_degree(0), Err(WeylError::ZeroOperator));
        assert_eq!(mixed.v_order(0), Ok(0));
        assert_eq!(dt2t.add(&WeylOp::var(1, 0)).v_order(0), Ok(-1));
    }

    #[test]
    fn display_round() {
        let op = WeylOp::euler_along(2, 0).add(&WeylOp::scalar(2, rat(1, 2)));
        assert_eq!(op.display(&names(&["x", "y"])), "x*dx + 1/2");
        let lap = WeylOp::d(2, 1).pow(2).sub(&WeylOp::d(2, 0));
        assert_eq!(lap.display(&names(&["x", "y"])), "dy^2 - dx");
    }

    #[test]
    fn arity_error() {
        assert_eq!(WeylOp::identity(1).try_compose(&WeylOp::identity(2)), Err(WeylError::ArityMismatch(1, 2)));
    }
}
