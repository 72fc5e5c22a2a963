//! Graph-embedding modules `sum_k M d_t^k delta_f` over `H^1_g(S)`, delta
//! modules with their Kashiwara V-filtration, and V-degrees of operators.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::bfunction::BFunction;
use crate::locoh::{HyperData, LocCohElem, LocohError};
use crate::poly::{Exponents, Poly, Rat, WDegree};
use crate::weyl::{WeylError, WeylOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("f must be nonzero")]
    ZeroFunction,
    #[error("f is not weighted homogeneous")]
    NotHomogeneous,
    #[error("f has the wrong number of variables")]
    ArityMismatch,
    #[error("element is not homogeneous")]
    ElementNotHomogeneous,
    #[error("Euler formula check failed")]
    FormulaMismatch,
    #[error(transparent)]
    Locoh(#[from] LocohError),
}

/// `H^1_g(S)` together with a weighted homogeneous function `f`.
#[derive(Debug)]
pub struct GraphCtx {
    hyper: Arc<HyperData>,
    f: Poly,
    f_degree: u64,
    f_partials: Vec<Poly>,
}

impl GraphCtx {
    pub fn new(hyper: Arc<HyperData>, f: Poly) -> Result<Arc<Self>, GraphError> {
        if f.nvars() != hyper.nvars() {
            return Err(GraphError::ArityMismatch);
        }
        let f_degree = match f.wdeg(hyper.weights()) {
            WDegree::Bottom => return Err(GraphError::ZeroFunction),
            WDegree::NotHomogeneous => return Err(GraphError::NotHomogeneous),
            WDegree::Homogeneous(d) => d,
        };
        let f_partials = (0..f.nvars()).map(|i| f.derivative(i)).collect();
        Ok(Arc::new(GraphCtx { hyper, f, f_degree, f_partials }))
    }

    pub fn hyper(&self) -> &Arc<HyperData> {
        &self.hyper
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn f_degree(&self) -> u64 {
        self.f_degree
    }

    /// Number of operator variables: the `x`s followed by `t`.
    pub fn op_nvars(&self) -> usize {
        self.hyper.nvars() + 1
    }

    pub fn t_index(&self) -> usize {
        self.hyper.nvars()
    }

    pub fn zero(self: &Arc<Self>) -> GraphElem {
        GraphElem { ctx: Arc::clone(self), layers: BTreeMap::new() }
    }

    /// `m * d_t^k * delta_f`.
    pub fn layer(self: &Arc<Self>, m: LocCohElem, k: u32) -> GraphElem {
        let mut e = self.zero();
        e.push(k, m);
        e
    }
}

/// Symbols acting on graph elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphSymbol {
    T,
    Dt,
    X(usize),
    Dx(usize),
    /// `s = -d_t t`.
    S,
    /// `t d_t = -s - 1`.
    ThetaT,
}

/// Element of the graph-embedding module.
#[derive(Debug, Clone)]
pub struct GraphElem {
    ctx: Arc<GraphCtx>,
    layers: BTreeMap<u32, LocCohElem>,
}

impl PartialEq for GraphElem {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) && self.layers == other.layers
    }
}

impl GraphElem {
    pub fn context(&self) -> &Arc<GraphCtx> {
        &self.ctx
    }

    pub fn layers(&self) -> &BTreeMap<u32, LocCohElem> {
        &self.layers
    }

    pub fn is_zero(&self) -> bool {
        self.layers.is_empty()
    }

    fn push(&mut self, k: u32, m: LocCohElem) {
        if m.is_zero() {
            return;
        }
        match self.layers.remove(&k) {
            Some(prev) => {
                let sum = prev.add(&m);
                if !sum.is_zero() {
                    self.layers.insert(k, sum);
                }
            }
            None => {
                self.layers.insert(k, m);
            }
        }
    }

    pub fn add(&self, other: &GraphElem) -> GraphElem {
        assert!(Arc::ptr_eq(&self.ctx, &other.ctx), "context mismatch");
        let mut out = self.clone();
        for (k, m) in &other.layers {
            out.push(*k, m.clone());
        }
        out
    }

    pub fn sub(&self, other: &GraphElem) -> GraphElem {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> GraphElem {
        let mut out = self.ctx.zero();
        for (k, m) in &self.layers {
            out.push(*k, m.scale(c));
        }
        out
    }

    pub fn pole_order(&self) -> u32 {
        self.layers.values().map(LocCohElem::pole_order).max().unwrap_or(0)
    }

    fn map_layers(&self, f: impl Fn(u32, &LocCohElem, &mut GraphElem)) -> GraphElem {
        let mut out = self.ctx.zero();
        for (k, m) in &self.layers {
            f(*k, m, &mut out);
        }
        out
    }

    /// Action of one generator of the Weyl algebra in `x, t`.
    pub fn act_symbol(&self, sym: GraphSymbol) -> GraphElem {
        let ctx = &self.ctx;
        match sym {
            GraphSymbol::T => self.map_layers(|k, m, out| {
                out.push(k, m.mul_poly(&ctx.f));
                if k > 0 {
                    out.push(k - 1, m.scale(&-Rat::from_integer(BigInt::from(k))));
                }
            }),
            GraphSymbol::Dt => self.map_layers(|k, m, out| out.push(k + 1, m.clone())),
            GraphSymbol::X(i) => self.map_layers(|k, m, out| out.push(k, m.mul_poly(&Poly::var(ctx.hyper.nvars(), i)))),
            GraphSymbol::Dx(i) => self.map_layers(|k, m, out| {
                out.push(k, m.derivative(i));
                let df = &ctx.f_partials[i];
                if !df.is_zero() {
                    out.push(k + 1, m.mul_poly(df).scale(&-Rat::one()));
                }
            }),
            GraphSymbol::S => self.act_symbol(GraphSymbol::T).act_symbol(GraphSymbol::Dt).scale(&-Rat::one()),
            GraphSymbol::ThetaT => self.act_symbol(GraphSymbol::Dt).act_symbol(GraphSymbol::T),
        }
    }

    /// Action of a normal-ordered operator in the variables `x_1..x_n, t`.
    pub fn act(&self, op: &WeylOp) -> GraphElem {
        assert_eq!(op.nvars(), self.ctx.op_nvars(), "operator arity");
        let t = self.ctx.t_index();
        let mut total = self.ctx.zero();
        for (alpha, coeff) in op.terms() {
            let mut cur = self.clone();
            for _ in 0..alpha[t] {
                cur = cur.act_symbol(GraphSymbol::Dt);
            }
            for (i, &a) in alpha[..t].iter().enumerate() {
                for _ in 0..a {
                    cur = cur.act_symbol(GraphSymbol::Dx(i));
                }
            }
            for (e, c) in coeff.terms() {
                let mut piece = cur.clone();
                for _ in 0..e[t] {
                    piece = piece.act_symbol(GraphSymbol::T);
                }
                let x_exps: Exponents = e[..t].to_vec();
                let piece = piece.map_layers(|k, m, out| out.push(k, m.mul_monomial(&x_exps)));
                total = total.add(&piece.scale(c));
            }
        }
        total
    }

    /// Total weight with `t` of weight `d_f`: `wdeg(h) - d*pole - d_f*(k+1)`.
    pub fn weight(&self) -> Result<i64, GraphError> {
        let df = self.ctx.f_degree as i64;
        let mut w = None;
        for (k, m) in &self.layers {
            let this = m.weight()? - df * (*k as i64 + 1);
            match w {
                None => w = Some(this),
                Some(prev) if prev != this => return Err(GraphError::ElementNotHomogeneous),
                _ => {}
            }
        }
        w.ok_or(GraphError::Locoh(LocohError::ZeroElement))
    }

    /// Coordinates `((layer, pole, monomial), coefficient)`.
    pub fn coords(&self) -> Vec<((u32, u32, Exponents), Rat)> {
        let mut out = Vec::new();
        for (k, m) in &self.layers {
            for ((pole, e), c) in m.coords() {
                out.push(((*k, pole, e.clone()), c.clone()));
            }
        }
        out
    }

    pub fn display(&self) -> String {
        if self.layers.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, m) in &self.layers {
            let body = m.display();
            let single = m.numerators().len() == 1 && m.numerators().values().all(|h| h.len() == 1);
            let dt = match k {
                0 => String::new(),
                1 => "*dt".to_string(),
                _ => format!("*dt^{k}"),
            };
            parts.push(if *k == 0 || single { format!("{body}{dt}") } else { format!("({body}){dt}") });
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

/// Evaluates `wdeg(h) - d*|alpha| + d_f*(lambda_s - k)` for a single-layer,
/// weight-homogeneous element and confirms the underlying operator identity
/// `theta_w(e) - d_f*s(e) + d_f*k*e = (wdeg(h) - d*|alpha|)*e` by direct action.
pub fn graph_euler_eigenvalue(e: &GraphElem, lambda_s: &Rat) -> Result<Rat, GraphError> {
    if e.layers.len() != 1 {
        return Err(GraphError::ElementNotHomogeneous);
    }
    let (k, m) = e.layers.iter().next().unwrap();
    let base = m.weight().map_err(|_| GraphError::ElementNotHomogeneous)?;
    let ctx = &e.ctx;
    let df = Rat::from_integer(BigInt::from(ctx.f_degree));
    let n = ctx.hyper.nvars();
    let mut theta_w = WeylOp::zero(n + 1);
    for (i, &w) in ctx.hyper.weights().weights().iter().enumerate() {
        theta_w = theta_w.add(&WeylOp::euler_along(n + 1, i).scale(&Rat::from_integer(BigInt::from(w))));
    }
    let kr = Rat::from_integer(BigInt::from(*k));
    let lhs = e.act(&theta_w).sub(&e.act_symbol(GraphSymbol::S).scale(&df)).add(&e.scale(&(&df * &kr)));
    let base_r = Rat::from_integer(BigInt::from(base));
    if lhs != e.scale(&base_r) {
        return Err(GraphError::FormulaMismatch);
    }
    Ok(base_r + df * (lambda_s - kr))
}

/// Which variable the V-filtration is taken along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VMode {
    /// Along the coordinate hyperplane `x_v = 0`.
    Direct(usize),
    /// Along `t = 0` in the graph embedding; `t` is the last operator variable.
    Graph,
}

/// V-degree of an operator: `deg_v - deg_dv` along the chosen variable.
pub fn v_degree(op: &WeylOp, mode: VMode) -> Result<i64, WeylError> {
    match mode {
        VMode::Direct(v) => op.v_degree(v),
        VMode::Graph => op.v_degree(op.nvars().saturating_sub(1)),
    }
}

/// The delta module `i_+ M_0 = sum_alpha M_0 d_y^alpha delta` along a
/// codimension-`codim` coordinate subspace, with `dim M_0 = base_dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaModule {
    pub base_dim: usize,
    pub codim: usize,
}

/// Basis vector `e_b * d^alpha * delta`.
pub type DeltaBasis = (usize, Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPiece {
    pub dim: usize,
    pub basis: Vec<DeltaBasis>,
}

impl DeltaModule {
    pub fn new(base_dim: usize, codim: usize) -> Result<Self, String> {
        if base_dim == 0 || codim == 0 {
            return Err("delta module needs base_dim >= 1 and codim >= 1".into());
        }
        Ok(DeltaModule { base_dim, codim })
    }

    /// Same data pushed forward along one extra normal coordinate.
    pub fn push_forward(&self) -> DeltaModule {
        DeltaModule { base_dim: self.base_dim, codim: self.codim + 1 }
    }

    fn multi_indices_upto(&self, total: u32) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..self.codim {
            let mut next = Vec::new();
            for p in &out {
                let used: u32 = p.iter().sum();
                for a in 0..=(total - used) {
                    let mut q = p.clone();
                    q.push(a);
                    next.push(q);
                }
            }
            out = next;
        }
        out.sort_by_key(|a| (a.iter().sum::<u32>(), a.clone()));
        out
    }

    /// `V^lambda`: the span of `M_0 d^alpha delta` with `|alpha| <= -lambda`.
    pub fn v_piece(&self, lambda: &Rat) -> VPiece {
        let bound = (-lambda).floor();
        if bound.is_negative() {
            return VPiece { dim: 0, basis: Vec::new() };
        }
        let bound = bound.to_integer().to_u32().expect("V-filtration index too large");
        let mut basis = Vec::new();
        for alpha in self.multi_indices_upto(bound) {
            for b in 0..self.base_dim {
                basis.push((b, alpha.clone()));
            }
        }
        VPiece { dim: basis.len(), basis }
    }

    /// `dim Gr_V^lambda`, nonzero only at integers `lambda <= 0`.
    pub fn gr_dim(&self, lambda: &Rat) -> usize {
        if !lambda.is_integer() {
            return 0;
        }
        let next = lambda + Rat::new(BigInt::one(), BigInt::from(2));
        self.v_piece(lambda).dim - self.v_piece(&next).dim
    }

    /// `b(s)` for the generating layer, as the minimal polynomial of
    /// `s = -sum d_i y_i` on `M_0 delta`.
    pub fn bfunction(&self) -> BFunction {
        let mut eigen: Vec<Rat> = Vec::new();
        for b in 0..self.base_dim {
            let v = DeltaVector::basis(self, b, vec![0; self.codim]);
            let mut s_v = DeltaVector::zero(self.codim);
            for i in 0..self.codim {
                s_v = s_v.add(&v.mul_y(i).d(i));
            }
            let s_v = s_v.scale(&-Rat::one());
            // s acts diagonally on this layer; read off the scalar
            let lambda = s_v.coeff(&(b, vec![0; self.codim]));
            assert_eq!(s_v, v.scale(&lambda), "s must act by a scalar on M_0 delta");
            if !eigen.contains(&lambda) {
                eigen.push(lambda);
            }
        }
        BFunction::from_roots(eigen.into_iter().map(|e| (-e, 1)))
    }
}

/// Finite combination of basis vectors of a delta module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaVector {
    codim: usize,
    coeffs: BTreeMap<DeltaBasis, Rat>,
}

impl DeltaVector {
    pub fn zero(codim: usize) -> Self {
        DeltaVector { codim, coeffs: BTreeMap::new() }
    }

    pub fn basis(m: &DeltaModule, b: usize, alpha: Vec<u32>) -> Self {
        let mut v = DeltaVector::zero(m.codim);
        v.coeffs.insert((b, alpha), Rat::one());
        v
    }

    fn push(&mut self, key: DeltaBasis, c: Rat) {
        let e = self.coeffs.entry(key.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn coeff(&self, key: &DeltaBasis) -> Rat {
        self.coeffs.get(key).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &DeltaVector) -> DeltaVector {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.push(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> DeltaVector {
        let mut out = DeltaVector::zero(self.codim);
        for (k, v) in &self.coeffs {
            out.push(k.clone(), v * c);
        }
        out
    }

    /// `d_i` raises `alpha_i`.
    pub fn d(&self, i: usize) -> DeltaVector {
        let mut out = DeltaVector::zero(self.codim);
        for ((b, a), c) in &self.coeffs {
            let mut a = a.clone();
            a[i] += 1;
            out.push((*b, a), c.clone());
        }
        out
    }

    /// `y_i d^alpha delta = -alpha_i d^(alpha - e_i) delta` since `y_i delta = 0`.
    pub fn mul_y(&self, i: usize) -> DeltaVector {
        let mut out = DeltaVector::zero(self.codim);
        for ((b, a), c) in &self.coeffs {
            if a[i] == 0 {
                continue;
            }
            let mut na = a.clone();
            na[i] -= 1;
            out.push((*b, na), c * Rat::from_integer(BigInt::from(-(a[i] as i64))));
        }
        out
    }
}
