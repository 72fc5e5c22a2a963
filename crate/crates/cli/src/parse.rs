//! Expression grammar shared by polynomials, operators, module elements and
//! b-functions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | ident | '(' expr ')'
//! ```
//!
//! Factors must be joined by `*`; `2x` and `x(y+1)` are errors. An identifier
//! `d<var>` is the derivative along `var`. In elements, `g` is the defining
//! equation and may appear as a factor or in a divisor `g^k`, and
//! `dt` marks `d_t^k delta_f` in graph mode.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use bsv_core::bfunction::{BFunction, ThetaPoly};
use bsv_core::engine::Element;
use bsv_core::graph::GraphCtx;
use bsv_core::locoh::HyperData;
use bsv_core::poly::{Poly, Rat};
use bsv_core::weyl::WeylOp;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    NegativeExponent,
    ExponentTooLarge,
    UnknownVariable(String),
    MissingOperator,
    DerivativeNotAllowed(String),
    BadDivisor,
    DivisionByZero,
    MisplacedDt,
    NotLinearFactor,
    NotMonic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub kind: ErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match &self.kind {
            ErrorKind::UnexpectedChar(c) => format!("unexpected character '{c}'"),
            ErrorKind::UnexpectedToken(t) => format!("unexpected '{t}'"),
            ErrorKind::UnexpectedEnd => "unexpected end of input".to_string(),
            ErrorKind::NegativeExponent => "negative exponent".to_string(),
            ErrorKind::ExponentTooLarge => "exponent too large".to_string(),
            ErrorKind::UnknownVariable(v) => format!("unknown variable '{v}'"),
            ErrorKind::MissingOperator => "missing '*' between factors".to_string(),
            ErrorKind::DerivativeNotAllowed(v) => format!("derivative '{v}' not allowed here"),
            ErrorKind::BadDivisor => "divisor must be a nonzero constant or a power of g".to_string(),
            ErrorKind::DivisionByZero => "division by zero".to_string(),
            ErrorKind::MisplacedDt => "dt is only available in graph mode".to_string(),
            ErrorKind::NotLinearFactor => "expected a product of monic linear factors".to_string(),
            ErrorKind::NotMonic => "factor is not monic".to_string(),
        };
        write!(f, "at position {}: {}", self.pos, what)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(pos: usize, kind: ErrorKind) -> Result<T, ParseError> {
    Err(ParseError { pos, kind })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Num(n) => n.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Num(s.parse().expect("digits"))));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return err(start, ErrorKind::UnexpectedChar(other)),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Expr {
    Num(BigInt),
    Ident(usize, String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(usize, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    let at = self.here();
                    self.pos += 1;
                    lhs = Expr::Div(at, Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    return err(self.here(), ErrorKind::MissingOperator)
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.here();
        match self.toks.get(self.pos).cloned() {
            Some((_, Tok::Num(n))) => {
                self.pos += 1;
                let k = n.to_u32().ok_or(ParseError { pos: at, kind: ErrorKind::ExponentTooLarge })?;
                Ok(Expr::Pow(Box::new(base), k))
            }
            Some((_, Tok::Minus)) => err(at, ErrorKind::NegativeExponent),
            Some((_, t)) => err(at, ErrorKind::UnexpectedToken(t.text())),
            None => err(at, ErrorKind::UnexpectedEnd),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        match self.toks.get(self.pos).cloned() {
            Some((_, Tok::Num(n))) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some((_, Tok::Ident(s))) => {
                self.pos += 1;
                Ok(Expr::Ident(at, s))
            }
            Some((_, Tok::LParen)) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    Some(t) => err(self.here(), ErrorKind::UnexpectedToken(t.text())),
                    None => err(self.here(), ErrorKind::UnexpectedEnd),
                }
            }
            Some((_, t)) => err(at, ErrorKind::UnexpectedToken(t.text())),
            None => err(at, ErrorKind::UnexpectedEnd),
        }
    }
}

fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.chars().count() };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return err(p.here(), ErrorKind::UnexpectedToken(t.text()));
    }
    Ok(e)
}

/// Arithmetic needed to evaluate an expression tree.
trait Domain {
    type V: Clone;
    fn constant(&self, c: Rat) -> Self::V;
    fn ident(&self, pos: usize, name: &str) -> Result<Self::V, ParseError>;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn scale(&self, a: &Self::V, c: &Rat) -> Self::V;
    fn as_constant(&self, a: &Self::V) -> Option<Rat>;

    fn div(&self, pos: usize, a: &Self::V, b: &Self::V) -> Result<Self::V, ParseError> {
        match self.as_constant(b) {
            Some(c) if c.is_zero() => err(pos, ErrorKind::DivisionByZero),
            Some(c) => Ok(self.scale(a, &c.recip())),
            None => err(pos, ErrorKind::BadDivisor),
        }
    }

    fn eval(&self, e: &Expr) -> Result<Self::V, ParseError> {
        Ok(match e {
            Expr::Num(n) => self.constant(Rat::from_integer(n.clone())),
            Expr::Ident(pos, name) => self.ident(*pos, name)?,
            Expr::Neg(a) => self.scale(&self.eval(a)?, &-Rat::one()),
            Expr::Add(a, b) => self.add(&self.eval(a)?, &self.eval(b)?),
            Expr::Sub(a, b) => self.add(&self.eval(a)?, &self.scale(&self.eval(b)?, &-Rat::one())),
            Expr::Mul(a, b) => self.mul(&self.eval(a)?, &self.eval(b)?),
            Expr::Div(pos, a, b) => self.div(*pos, &self.eval(a)?, &self.eval(b)?)?,
            Expr::Pow(a, k) => {
                let base = self.eval(a)?;
                let mut acc = self.constant(Rat::one());
                for _ in 0..*k {
                    acc = self.mul(&acc, &base);
                }
                acc
            }
        })
    }
}

enum Symbol {
    Var(usize),
    Deriv(usize),
}

fn lookup(names: &[String], pos: usize, name: &str) -> Result<Symbol, ParseError> {
    if let Some(i) = names.iter().position(|n| n == name) {
        return Ok(Symbol::Var(i));
    }
    if let Some(rest) = name.strip_prefix('d') {
        if let Some(i) = names.iter().position(|n| n == rest) {
            return Ok(Symbol::Deriv(i));
        }
    }
    err(pos, ErrorKind::UnknownVariable(name.to_string()))
}

struct PolyDomain<'a> {
    names: &'a [String],
}

impl Domain for PolyDomain<'_> {
    type V = Poly;

    fn constant(&self, c: Rat) -> Poly {
        Poly::constant(self.names.len(), c)
    }

    fn ident(&self, pos: usize, name: &str) -> Result<Poly, ParseError> {
        match lookup(self.names, pos, name)? {
            Symbol::Var(i) => Ok(Poly::var(self.names.len(), i)),
            Symbol::Deriv(_) => err(pos, ErrorKind::DerivativeNotAllowed(name.to_string())),
        }
    }

    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.add(b)
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mul(b)
    }

    fn scale(&self, a: &Poly, c: &Rat) -> Poly {
        a.scale(c)
    }

    fn as_constant(&self, a: &Poly) -> Option<Rat> {
        a.as_constant()
    }
}

struct OpDomain<'a> {
    names: &'a [String],
}

impl Domain for OpDomain<'_> {
    type V = WeylOp;

    fn constant(&self, c: Rat) -> WeylOp {
        WeylOp::scalar(self.names.len(), c)
    }

    fn ident(&self, pos: usize, name: &str) -> Result<WeylOp, ParseError> {
        Ok(match lookup(self.names, pos, name)? {
            Symbol::Var(i) => WeylOp::var(self.names.len(), i),
            Symbol::Deriv(i) => WeylOp::d(self.names.len(), i),
        })
    }

    fn add(&self, a: &WeylOp, b: &WeylOp) -> WeylOp {
        a.add(b)
    }

    fn mul(&self, a: &WeylOp, b: &WeylOp) -> WeylOp {
        a.compose(b)
    }

    fn scale(&self, a: &WeylOp, c: &Rat) -> WeylOp {
        a.scale(c)
    }

    fn as_constant(&self, a: &WeylOp) -> Option<Rat> {
        let mut terms = a.terms();
        match (terms.next(), terms.next()) {
            (None, _) => Some(Rat::zero()),
            (Some((alpha, h)), None) if alpha.iter().all(|&k| k == 0) => h.as_constant(),
            _ => None,
        }
    }
}

/// Element under construction: `(d_t power, g power) -> numerator`.
type RawElem = BTreeMap<(u32, i64), Poly>;

struct ElemDomain<'a> {
    names: &'a [String],
    graph: bool,
}

impl ElemDomain<'_> {
    fn single(&self, key: (u32, i64), p: Poly) -> RawElem {
        let mut m = RawElem::new();
        if !p.is_zero() {
            m.insert(key, p);
        }
        m
    }
}

impl Domain for ElemDomain<'_> {
    type V = RawElem;

    fn constant(&self, c: Rat) -> RawElem {
        self.single((0, 0), Poly::constant(self.names.len(), c))
    }

    fn ident(&self, pos: usize, name: &str) -> Result<RawElem, ParseError> {
        let n = self.names.len();
        if name == "g" {
            return Ok(self.single((0, 1), Poly::one(n)));
        }
        if name == "dt" {
            if !self.graph {
                return err(pos, ErrorKind::MisplacedDt);
            }
            return Ok(self.single((1, 0), Poly::one(n)));
        }
        match lookup(self.names, pos, name)? {
            Symbol::Var(i) => Ok(self.single((0, 0), Poly::var(n, i))),
            Symbol::Deriv(_) => err(pos, ErrorKind::DerivativeNotAllowed(name.to_string())),
        }
    }

    fn add(&self, a: &RawElem, b: &RawElem) -> RawElem {
        let mut out = a.clone();
        for (k, p) in b {
            let sum = match out.get(k) {
                Some(q) => q.add(p),
                None => p.clone(),
            };
            if sum.is_zero() {
                out.remove(k);
            } else {
                out.insert(*k, sum);
            }
        }
        out
    }

    fn mul(&self, a: &RawElem, b: &RawElem) -> RawElem {
        let mut out = RawElem::new();
        for ((ka, ea), pa) in a {
            for ((kb, eb), pb) in b {
                let term = self.single((ka + kb, ea + eb), pa.mul(pb));
                out = self.add(&out, &term);
            }
        }
        out
    }

    fn scale(&self, a: &RawElem, c: &Rat) -> RawElem {
        a.iter().map(|(k, p)| (*k, p.scale(c))).filter(|(_, p)| !p.is_zero()).collect()
    }

    fn as_constant(&self, a: &RawElem) -> Option<Rat> {
        match a.len() {
            0 => Some(Rat::zero()),
            1 => a.get(&(0, 0)).and_then(Poly::as_constant),
            _ => None,
        }
    }

    fn div(&self, pos: usize, a: &RawElem, b: &RawElem) -> Result<RawElem, ParseError> {
        if b.is_empty() {
            return err(pos, ErrorKind::DivisionByZero);
        }
        if b.len() != 1 {
            return err(pos, ErrorKind::BadDivisor);
        }
        let (&(k, e), p) = b.iter().next().expect("one entry");
        let c = match p.as_constant() {
            Some(c) if k == 0 => c,
            _ => return err(pos, ErrorKind::BadDivisor),
        };
        Ok(a.iter().map(|((ka, ea), pa)| ((*ka, ea - e), pa.scale(&c.recip()))).collect())
    }
}

pub fn parse_poly(text: &str, names: &[String]) -> Result<Poly, ParseError> {
    PolyDomain { names }.eval(&parse_expr(text)?)
}

/// Parses an operator; products are compositions, so `dx*x = x*dx + 1`.
pub fn parse_op(text: &str, names: &[String]) -> Result<WeylOp, ParseError> {
    OpDomain { names }.eval(&parse_expr(text)?)
}

/// Where parsed elements live.
#[derive(Clone)]
pub enum ElemContext {
    Loc(Arc<HyperData>),
    Graph(Arc<GraphCtx>),
}

impl ElemContext {
    pub fn hyper(&self) -> &Arc<HyperData> {
        match self {
            ElemContext::Loc(h) => h,
            ElemContext::Graph(c) => c.hyper(),
        }
    }

    /// Operator variable names: the coordinates, plus `t` in graph mode.
    pub fn op_names(&self) -> Vec<String> {
        let mut names = self.hyper().weights().names().to_vec();
        if let ElemContext::Graph(_) = self {
            names.push("t".to_string());
        }
        names
    }
}

pub fn parse_element(text: &str, ctx: &ElemContext) -> Result<Element, ParseError> {
    let hyper = ctx.hyper();
    let names = hyper.weights().names();
    let graph = matches!(ctx, ElemContext::Graph(_));
    let expr = parse_expr(text)?;
    let raw = ElemDomain { names, graph }.eval(&expr)?;
    let g = hyper.g();
    let mut layers: BTreeMap<u32, BTreeMap<i64, Poly>> = BTreeMap::new();
    for ((k, e), p) in raw {
        // a numerator times g^e with e >= 0 is a polynomial and vanishes
        let (pole, num) = if e > 0 { (0, p.mul(&g.pow(e as u32))) } else { (-e, p) };
        let slot = layers.entry(k).or_default();
        let sum = match slot.get(&pole) {
            Some(q) => q.add(&num),
            None => num,
        };
        slot.insert(pole, sum);
    }
    Ok(match ctx {
        ElemContext::Loc(h) => Element::Loc(h.reduce(&layers.remove(&0).unwrap_or_default())),
        ElemContext::Graph(c) => {
            let mut out = c.zero();
            for (k, raw) in layers {
                out = out.add(&c.layer(c.hyper().reduce(&raw), k));
            }
            Element::Graph(out)
        }
    })
}

/// Product of monic linear factors in `var`, e.g. `"(s + 1)*(s + 1/2)"`.
/// Returns the constants `c` of the factors `var + c` with multiplicities.
fn parse_linear_product(text: &str, var: &str) -> Result<BTreeMap<Rat, u32>, ParseError> {
    let expr = parse_expr(text)?;
    let names = vec![var.to_string()];
    let dom = PolyDomain { names: &names };
    let mut out = BTreeMap::new();
    collect_factors(&expr, &dom, 1, &mut out)?;
    Ok(out)
}

fn collect_factors(e: &Expr, dom: &PolyDomain<'_>, mult: u32, out: &mut BTreeMap<Rat, u32>) -> Result<(), ParseError> {
    match e {
        Expr::Mul(a, b) => {
            collect_factors(a, dom, mult, out)?;
            collect_factors(b, dom, mult, out)
        }
        Expr::Pow(a, k) => collect_factors(a, dom, mult * k, out),
        _ => {
            let p = dom.eval(e)?;
            let pos = expr_pos(e);
            if p.as_constant() == Some(Rat::one()) {
                return Ok(());
            }
            if p.total_degree() != Some(1) {
                return err(pos, ErrorKind::NotLinearFactor);
            }
            if p.coeff(&[1]) != Rat::one() {
                return err(pos, ErrorKind::NotMonic);
            }
            *out.entry(p.coeff(&[0])).or_insert(0) += mult;
            Ok(())
        }
    }
}

fn expr_pos(e: &Expr) -> usize {
    match e {
        Expr::Ident(p, _) | Expr::Div(p, _, _) => *p,
        Expr::Neg(a) | Expr::Pow(a, _) => expr_pos(a),
        Expr::Add(a, _) | Expr::Sub(a, _) | Expr::Mul(a, _) => expr_pos(a),
        Expr::Num(_) => 0,
    }
}

/// A b-function in `s`, written as a product of factors `(s + gamma)`.
pub fn parse_bfunction(text: &str) -> Result<BFunction, ParseError> {
    Ok(BFunction::from_roots(parse_linear_product(text, "s")?))
}

/// A polynomial in `theta`, written as a product of factors `(theta + c)`.
pub fn parse_theta(text: &str) -> Result<ThetaPoly, ParseError> {
    Ok(ThetaPoly::from_factors(parse_linear_product(text, "theta")?))
}

/// A rational literal such as `-3/2`.
pub fn parse_rat(text: &str) -> Result<Rat, ParseError> {
    let expr = parse_expr(text)?;
    let dom = PolyDomain { names: &[] };
    let p = dom.eval(&expr)?;
    match p.as_constant() {
        Some(c) => Ok(c),
        None => err(0, ErrorKind::UnexpectedToken(text.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bsv_core::poly::{rat, rat_int, WeightSystem};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn polynomials() {
        let n = names(&["x", "y", "z"]);
        let p = parse_poly("x^3 + y^2", &n).unwrap();
        assert_eq!(p, Poly::var(3, 0).pow(3).add(&Poly::var(3, 1).pow(2)));
        let q = parse_poly("1/2*x*y - z", &n).unwrap();
        let want = Poly::var(3, 0).mul(&Poly::var(3, 1)).scale(&rat(1, 2)).sub(&Poly::var(3, 2));
        assert_eq!(q, want);
        assert_eq!(parse_poly(" x*y/2 ", &n).unwrap(), Poly::var(3, 0).mul(&Poly::var(3, 1)).scale(&rat(1, 2)));
    }

    #[test]
    fn polynomial_errors() {
        let n = names(&["x", "y"]);
        assert_eq!(parse_poly("x^-1", &n).unwrap_err().kind, ErrorKind::NegativeExponent);
        assert_eq!(
            parse_poly("x + w", &n).unwrap_err(),
            ParseError { pos: 4, kind: ErrorKind::UnknownVariable("w".into()) }
        );
        assert_eq!(parse_poly("2x", &n).unwrap_err(), ParseError { pos: 1, kind: ErrorKind::MissingOperator });
        assert_eq!(parse_poly("2 x", &n).unwrap_err(), ParseError { pos: 2, kind: ErrorKind::MissingOperator });
        assert_eq!(parse_poly("x/y", &n).unwrap_err().kind, ErrorKind::BadDivisor);
        assert_eq!(parse_poly("dx", &n).unwrap_err().kind, ErrorKind::DerivativeNotAllowed("dx".into()));
        assert_eq!(parse_poly("(x + y", &n).unwrap_err().kind, ErrorKind::UnexpectedEnd);
        assert_eq!(parse_poly("x # y", &n).unwrap_err(), ParseError { pos: 2, kind: ErrorKind::UnexpectedChar('#') });
    }

    #[test]
    fn operators() {
        let n = names(&["x", "y", "z"]);
        assert_eq!(parse_op("x*dx", &n).unwrap(), WeylOp::euler_along(3, 0));
        let half = parse_op("(x*dx + 1/2)", &n).unwrap();
        assert_eq!(half, WeylOp::euler_along(3, 0).add(&WeylOp::scalar(3, rat(1, 2))));
        let lap = parse_op("dy^2 + dz^2", &n).unwrap();
        assert_eq!(lap, WeylOp::d(3, 1).pow(2).add(&WeylOp::d(3, 2).pow(2)));
        assert_eq!(parse_op("dx*x", &n).unwrap(), WeylOp::euler_along(3, 0).add(&WeylOp::identity(3)));
    }

    #[test]
    fn elements() {
        let w = WeightSystem::new(vec!["x", "y"], vec![2, 3]).unwrap();
        let g = parse_poly("x^3 + y^2", w.names()).unwrap();
        let ctx = ElemContext::Loc(HyperData::new(g, w).unwrap());
        let e = parse_element("x/g", &ctx).unwrap();
        assert_eq!(e.display(), "x/g");
        assert_eq!(parse_element("(x*g + y)/g^2", &ctx).unwrap().display(), "x/g + y/g^2");
        assert!(parse_element("g/g", &ctx).unwrap().is_zero());
        assert_eq!(parse_element("x/(x + g)", &ctx).unwrap_err().kind, ErrorKind::BadDivisor);
        assert_eq!(parse_element("x*dt/g", &ctx).unwrap_err().kind, ErrorKind::MisplacedDt);
    }

    #[test]
    fn graph_elements() {
        let w = WeightSystem::standard(vec!["x", "y", "z"]);
        let g = parse_poly("x^2 + y^2 + z^2", w.names()).unwrap();
        let f = parse_poly("x", w.names()).unwrap();
        let gc = GraphCtx::new(HyperData::new(g, w).unwrap(), f).unwrap();
        let ctx = ElemContext::Graph(gc);
        let e = parse_element("x/g*dt^2 - 1/g", &ctx).unwrap();
        assert_eq!(e.display(), "-1/g + x/g*dt^2");
        assert_eq!(parse_element(&e.display(), &ctx).unwrap(), e);
        assert_eq!(ctx.op_names(), names(&["x", "y", "z", "t"]));
    }

    #[test]
    fn bfunctions() {
        let b = parse_bfunction("(s + 1)*(s + 1/2)").unwrap();
        assert_eq!(b, BFunction::from_roots([(rat_int(1), 1), (rat(1, 2), 1)]));
        assert_eq!(parse_bfunction(&b.to_string()).unwrap(), b);
        assert_eq!(parse_bfunction("s*(s + 1)^2").unwrap(), BFunction::from_roots([(rat_int(0), 1), (rat_int(1), 2)]));
        assert_eq!(parse_bfunction("1").unwrap(), BFunction::one());
        let t = parse_theta("theta*(theta + 1/2)").unwrap();
        assert_eq!(t, ThetaPoly::from_factors([(rat_int(0), 1), (rat(1, 2), 1)]));
        assert_eq!(parse_theta(&t.to_string()).unwrap(), t);
        assert_eq!(parse_bfunction("s^2 + 1").unwrap_err().kind, ErrorKind::NotLinearFactor);
        assert_eq!(parse_bfunction("2*s + 1").unwrap_err().kind, ErrorKind::NotMonic);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rat("-3/2").unwrap(), rat(-3, 2));
        assert!(parse_rat("x").is_err());
    }
}
