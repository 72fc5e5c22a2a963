//! Root-multiset polynomials: b-functions in `s` and their counterparts in
//! the Euler variable `theta`, with the combinators used to assemble them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::poly::Rat;

/// `prod (s + gamma)^m`, monic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BFunction {
    roots: BTreeMap<Rat, u32>,
}

/// `prod (theta + c)^m`, monic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ThetaPoly {
    factors: BTreeMap<Rat, u32>,
}

fn insert(map: &mut BTreeMap<Rat, u32>, key: Rat, m: u32) {
    if m > 0 {
        *map.entry(key).or_insert(0) += m;
    }
}

fn fmt_factors(f: &mut fmt::Formatter<'_>, var: &str, map: &BTreeMap<Rat, u32>) -> fmt::Result {
    if map.is_empty() {
        return write!(f, "1");
    }
    let mut first = true;
    for (c, &m) in map {
        if !first {
            write!(f, "*")?;
        }
        first = false;
        let base = if c.is_zero() {
            var.to_string()
        } else if c.is_negative() {
            format!("({var} - {})", -c.clone())
        } else {
            format!("({var} + {c})")
        };
        if m == 1 {
            write!(f, "{base}")?;
        } else if c.is_zero() {
            write!(f, "{var}^{m}")?;
        } else {
            write!(f, "{base}^{m}")?;
        }
    }
    Ok(())
}

impl BFunction {
    pub fn one() -> Self {
        BFunction::default()
    }

    /// The polynomial `s`.
    pub fn s() -> Self {
        BFunction::from_roots([(Rat::zero(), 1)])
    }

    pub fn from_roots(roots: impl IntoIterator<Item = (Rat, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (g, m) in roots {
            insert(&mut map, g, m);
        }
        BFunction { roots: map }
    }

    /// `(gamma, multiplicity)` pairs, gamma ascending.
    pub fn roots(&self) -> &BTreeMap<Rat, u32> {
        &self.roots
    }

    pub fn multiplicity(&self, gamma: &Rat) -> u32 {
        self.roots.get(gamma).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.roots.values().sum()
    }

    pub fn is_one(&self) -> bool {
        self.roots.is_empty()
    }

    /// Coefficients of the expanded polynomial, constant term first.
    pub fn coefficients(&self) -> Vec<Rat> {
        let mut coeffs = vec![Rat::one()];
        for (g, &m) in &self.roots {
            for _ in 0..m {
                let mut next = vec![Rat::zero(); coeffs.len() + 1];
                for (i, c) in coeffs.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] += c * g;
                }
                coeffs = next;
            }
        }
        coeffs
    }

    pub fn eval(&self, s: &Rat) -> Rat {
        self.roots.iter().fold(Rat::one(), |acc, (g, &m)| acc * num_traits::pow(s + g, m as usize))
    }

    pub fn divides(&self, other: &BFunction) -> bool {
        self.roots.iter().all(|(g, &m)| other.multiplicity(g) >= m)
    }

    /// Least common multiple: per-root maximum multiplicity.
    pub fn lcm(&self, other: &BFunction) -> BFunction {
        let mut roots = self.roots.clone();
        for (g, &m) in &other.roots {
            let e = roots.entry(g.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        BFunction { roots }
    }

    /// Product rule for b-functions of products: roots `a + b` with
    /// multiplicity `max(m_a + m_b - 1)` over all decompositions.
    pub fn product(&self, other: &BFunction) -> BFunction {
        let mut roots: BTreeMap<Rat, u32> = BTreeMap::new();
        for (a, &ma) in &self.roots {
            for (b, &mb) in &other.roots {
                let m = ma + mb - 1;
                let e = roots.entry(a + b).or_insert(0);
                *e = (*e).max(m);
            }
        }
        roots.retain(|_, m| *m > 0);
        BFunction { roots }
    }

    /// Inverse of [`ThetaPoly::to_bs_polynomial`].
    pub fn to_theta(&self) -> ThetaPoly {
        ThetaPoly { factors: self.roots.iter().map(|(g, &m)| (Rat::one() - g, m)).collect() }
    }
}

impl fmt::Display for BFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_factors(f, "s", &self.roots)
    }
}

impl ThetaPoly {
    pub fn one() -> Self {
        ThetaPoly::default()
    }

    /// `prod (theta + c)^m`.
    pub fn from_factors(factors: impl IntoIterator<Item = (Rat, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (c, m) in factors {
            insert(&mut map, c, m);
        }
        ThetaPoly { factors: map }
    }

    /// `prod (theta - r)` over the given roots (with repetition).
    pub fn from_theta_roots<'a>(roots: impl IntoIterator<Item = &'a Rat>) -> Self {
        ThetaPoly::from_factors(roots.into_iter().map(|r| (-r.clone(), 1)))
    }

    pub fn factors(&self) -> &BTreeMap<Rat, u32> {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.values().sum()
    }

    /// Substitute `theta = -(s + 1)`: the factor `theta + c` becomes `s + 1 - c`
    /// up to sign, and the result is normalized monic.
    pub fn to_bs_polynomial(&self) -> BFunction {
        BFunction { roots: self.factors.iter().map(|(c, &m)| (Rat::one() - c, m)).collect() }
    }

    /// Factors expanded as a list `c` (one per multiplicity) for building `prod (theta + c)`.
    pub fn linear_factors(&self) -> Vec<Rat> {
        self.factors.iter().flat_map(|(c, &m)| std::iter::repeat_n(c.clone(), m as usize)).collect()
    }
}

impl fmt::Display for ThetaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_factors(f, "theta", &self.factors)
    }
}

/// A violation of the structural constraints on b-function roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootViolation {
    /// `(s + gamma)` with `gamma < 0`.
    NegativeRoot(Rat),
    /// `s` divides with multiplicity above one.
    ZeroMultiplicity(u32),
}

impl fmt::Display for RootViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootViolation::NegativeRoot(g) => write!(f, "negative gamma {g}"),
            RootViolation::ZeroMultiplicity(m) => write!(f, "s-multiplicity {m}"),
        }
    }
}

/// Checks that every `gamma` is nonnegative and that `s` appears at most once.
pub fn validate_b(b: &BFunction) -> Vec<RootViolation> {
    let mut out = Vec::new();
    for (g, &m) in b.roots() {
        if g.is_negative() {
            out.push(RootViolation::NegativeRoot(g.clone()));
        } else if g.is_zero() && m > 1 {
            out.push(RootViolation::ZeroMultiplicity(m));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LctReport {
    /// Smallest positive `gamma`, the candidate log canonical threshold.
    pub min_root: Option<Rat>,
    pub supplied_lct: Option<Rat>,
    /// `Some(true)` when the supplied threshold equals `min_root`.
    pub consistent: Option<bool>,
    /// Roots `gamma` with `lct <= gamma < lct + 1`.
    pub roots_in_window: Vec<Rat>,
}

pub fn lct_report(b: &BFunction, lct: Option<&Rat>) -> LctReport {
    let min_root = b.roots().keys().find(|g| g.is_positive()).cloned();
    let reference = lct.cloned().or_else(|| min_root.clone());
    let roots_in_window = match &reference {
        Some(l) => {
            let upper = l + Rat::one();
            b.roots().keys().filter(|g| *g >= l && **g < upper).cloned().collect()
        }
        None => Vec::new(),
    };
    LctReport {
        consistent: lct.map(|l| min_root.as_ref() == Some(l)),
        supplied_lct: lct.cloned(),
        min_root,
        roots_in_window,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int};

    fn b(roots: &[(Rat, u32)]) -> BFunction {
        BFunction::from_roots(roots.iter().cloned())
    }

    #[test]
    fn node_lcm() {
        let s = BFunction::s();
        let s1 = b(&[(rat_int(1), 1)]);
        let l = s.lcm(&s1);
        assert_eq!(l, b(&[(rat_int(0), 1), (rat_int(1), 1)]));
        assert_eq!(l.to_string(), "s*(s + 1)");
        assert_eq!(l.lcm(&l), l);
        let sq = b(&[(rat_int(1), 2)]);
        assert_eq!(s1.lcm(&sq), sq);
    }

    #[test]
    fn product_rule_examples() {
        let b1 = b(&[(rat(1, 3), 2), (rat_int(1), 1)]);
        assert_eq!(b1.product(&BFunction::s()), b1);
        let s1 = b(&[(rat_int(1), 1)]);
        assert_eq!(s1.product(&s1), b(&[(rat_int(2), 1)]));
        let sq = b(&[(rat_int(1), 2)]);
        let half = b(&[(rat(1, 2), 1)]);
        assert_eq!(sq.product(&half), b(&[(rat(3, 2), 2)]));
    }

    #[test]
    fn theta_substitution() {
        let cusp = ThetaPoly::from_factors([(rat_int(0), 1), (rat(1, 2), 1)]);
        assert_eq!(cusp.to_bs_polynomial(), b(&[(rat_int(1), 1), (rat(1, 2), 1)]));
        let sq = ThetaPoly::from_factors([(rat_int(0), 2)]);
        assert_eq!(sq.to_bs_polynomial(), b(&[(rat_int(1), 2)]));
        for n in 3..7 {
            let t = ThetaPoly::from_factors([(rat_int(0), 1), (rat_int(-(n - 3)), 1)]);
            let expected = BFunction::from_roots([(rat_int(1), 1), (rat_int(n - 2), 1)]);
            assert_eq!(t.to_bs_polynomial(), expected);
            assert_eq!(t.to_bs_polynomial().to_theta(), t);
        }
        assert_eq!(cusp.to_string(), "theta*(theta + 1/2)");
    }

    #[test]
    fn validation() {
        assert!(validate_b(&b(&[(rat_int(1), 1), (rat(1, 2), 1)])).is_empty());
        assert_eq!(validate_b(&b(&[(rat_int(0), 2), (rat_int(1), 1)])), vec![RootViolation::ZeroMultiplicity(2)]);
        assert_eq!(validate_b(&b(&[(rat_int(-1), 1)])), vec![RootViolation::NegativeRoot(rat_int(-1))]);
    }

    #[test]
    fn lct_reports() {
        let cusp = b(&[(rat_int(1), 1), (rat(1, 2), 1)]);
        let r = lct_report(&cusp, None);
        assert_eq!(r.min_root, Some(rat(1, 2)));
        assert_eq!(r.roots_in_window, vec![rat(1, 2), rat_int(1)]);
        let q = b(&[(rat_int(1), 2)]);
        assert_eq!(lct_report(&q, Some(&rat_int(1))).consistent, Some(true));
        let bad = b(&[(rat_int(2), 1)]);
        assert_eq!(lct_report(&bad, Some(&rat_int(1))).consistent, Some(false));
    }

    #[test]
    fn expansion() {
        let cusp = b(&[(rat_int(1), 1), (rat(1, 2), 1)]);
        // (s+1)(s+1/2) = s^2 + 3/2 s + 1/2
        assert_eq!(cusp.coefficients(), vec![rat(1, 2), rat(3, 2), rat_int(1)]);
        assert_eq!(cusp.eval(&rat_int(-1)), rat_int(0));
    }
}
