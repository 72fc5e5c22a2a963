//! Functional-equation verification and divisibility certificates.
//!
//! A polynomial `b(theta)` is certified for a set of generators when every
//! `b(theta)(m_i)` is an explicit combination of operator monomials of
//! V-degree at least `min_v_degree` applied to the generators. Each target is
//! one linear system over the weight component of `m_i`; only monomials whose
//! weight shift lands in that component are admitted.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::bfunction::ThetaPoly;
use crate::graph::{GraphCtx, GraphElem, GraphError, GraphSymbol};
use crate::linsolve::solve_columns;
use crate::locoh::{HyperData, LocCohElem, LocohError};
use crate::poly::{format_monomial, Exponents, Poly, Rat, WDegree, WeightSystem};
use crate::weyl::WeylOp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("elements live in different modules")]
    ContextMismatch,
    #[error("empty window ({0}, {1}]")]
    EmptyWindow(String, String),
    #[error("d_f must be at least 1")]
    BadDegree,
    #[error("generator {0} is zero")]
    ZeroGenerator(usize),
    #[error("generator {0} is not weight-homogeneous")]
    InhomogeneousGenerator(usize),
    #[error("generator {0} does not match the problem mode")]
    ModeMismatch(usize),
    #[error("target {target}: b(theta) applied to the generator has pole order {pole}, above the cap {cap}")]
    CapOverflow { target: usize, pole: u32, cap: u32 },
    #[error("not found at caps {caps}; this bounds the search only and proves nothing about divisibility")]
    NotFoundAtCaps { caps: String, failed_targets: Vec<usize> },
    #[error("the lattice is empty")]
    EmptyLattice,
    #[error("target index {0} out of range")]
    BadTarget(usize),
}

/// A module element the engine can act on.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Loc(LocCohElem),
    Graph(GraphElem),
}

/// Coordinate key: `(graph layer, pole order, numerator monomial)`.
pub type CoordKey = (u32, u32, Exponents);

impl Element {
    pub fn is_zero(&self) -> bool {
        match self {
            Element::Loc(m) => m.is_zero(),
            Element::Graph(e) => e.is_zero(),
        }
    }

    pub fn same_module(&self, other: &Element) -> bool {
        match (self, other) {
            (Element::Loc(a), Element::Loc(b)) => a.same_context(b),
            (Element::Graph(a), Element::Graph(b)) => Arc::ptr_eq(a.context(), b.context()),
            _ => false,
        }
    }

    pub fn hyper(&self) -> &Arc<HyperData> {
        match self {
            Element::Loc(m) => m.context(),
            Element::Graph(e) => e.context().hyper(),
        }
    }

    /// Arity of operators acting on this element.
    pub fn op_nvars(&self) -> usize {
        match self {
            Element::Loc(m) => m.context().nvars(),
            Element::Graph(e) => e.context().op_nvars(),
        }
    }

    pub fn act(&self, op: &WeylOp) -> Element {
        match self {
            Element::Loc(m) => Element::Loc(m.act(op)),
            Element::Graph(e) => Element::Graph(e.act(op)),
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        match (self, other) {
            (Element::Loc(a), Element::Loc(b)) => Element::Loc(a.add(b)),
            (Element::Graph(a), Element::Graph(b)) => Element::Graph(a.add(b)),
            _ => panic!("element kinds differ"),
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Element {
        match self {
            Element::Loc(m) => Element::Loc(m.scale(c)),
            Element::Graph(e) => Element::Graph(e.scale(c)),
        }
    }

    pub fn zero_like(&self) -> Element {
        self.scale(&Rat::zero())
    }

    pub fn pole_order(&self) -> u32 {
        match self {
            Element::Loc(m) => m.pole_order(),
            Element::Graph(e) => e.pole_order(),
        }
    }

    /// Weight under the (extended) weighted Euler grading.
    pub fn weight(&self) -> Result<i64, LocohError> {
        match self {
            Element::Loc(m) => m.weight(),
            Element::Graph(e) => e.weight().map_err(|err| match err {
                GraphError::Locoh(l) => l,
                _ => LocohError::ElementNotHomogeneous,
            }),
        }
    }

    /// Largest weighted degree among canonical numerators.
    pub fn max_numerator_degree(&self) -> u64 {
        let w = self.hyper().weights().clone();
        let of = |m: &LocCohElem| {
            m.numerators().values().flat_map(|h| h.terms().map(|(e, _)| w.degree_of(e))).max().unwrap_or(0)
        };
        match self {
            Element::Loc(m) => of(m),
            Element::Graph(e) => e.layers().values().map(of).max().unwrap_or(0),
        }
    }

    pub fn coords(&self) -> BTreeMap<CoordKey, Rat> {
        match self {
            Element::Loc(m) => m.coords().map(|((k, e), c)| ((0, k, e.clone()), c.clone())).collect(),
            Element::Graph(g) => g.coords().into_iter().collect(),
        }
    }

    pub fn display(&self) -> String {
        match self {
            Element::Loc(m) => m.display(),
            Element::Graph(e) => e.display(),
        }
    }
}

impl From<LocCohElem> for Element {
    fn from(m: LocCohElem) -> Self {
        Element::Loc(m)
    }
}

impl From<GraphElem> for Element {
    fn from(e: GraphElem) -> Self {
        Element::Graph(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub holds: bool,
    /// `sum lhs - sum rhs` in canonical form.
    pub residual: Element,
}

/// Checks `sum P_i(m_i) = sum Q_j(n_j)` in the module.
pub fn verify_identity(lhs: &[(WeylOp, Element)], rhs: &[(WeylOp, Element)]) -> Result<IdentityCheck, EngineError> {
    let first = lhs.first().or(rhs.first()).map(|(_, e)| e.clone()).ok_or(EngineError::ContextMismatch)?;
    let mut total = first.zero_like();
    for (side, sign) in [(lhs, Rat::one()), (rhs, -Rat::one())] {
        for (op, e) in side {
            if !e.same_module(&first) || op.nvars() != e.op_nvars() {
                return Err(EngineError::ContextMismatch);
            }
            total = total.add(&e.act(op).scale(&sign));
        }
    }
    Ok(IdentityCheck { holds: total.is_zero(), residual: total })
}

/// Points of `(1/d_f) Z` in the half-open window `(lo, hi]`, ascending.
pub fn candidate_roots(d_f: u64, lo: &Rat, hi: &Rat) -> Result<Vec<Rat>, EngineError> {
    if d_f == 0 {
        return Err(EngineError::BadDegree);
    }
    if lo >= hi {
        return Err(EngineError::EmptyWindow(lo.to_string(), hi.to_string()));
    }
    let d = BigInt::from(d_f);
    let first: BigInt = (lo * Rat::from_integer(d.clone())).floor().to_integer() + 1;
    let mut out = Vec::new();
    let mut k = first;
    loop {
        let r = Rat::new(k.clone(), d.clone());
        if &r > hi {
            break;
        }
        out.push(r);
        k += 1;
    }
    Ok(out)
}

/// Theta-roots `gamma - 1` matching b-function roots `(s + gamma)`.
pub fn theta_lattice(gammas: &[Rat]) -> Vec<Rat> {
    gammas.iter().map(|g| g - Rat::one()).collect()
}

/// Where the V-filtration is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// `f` is the coordinate `x_v`; no graph embedding.
    Direct(usize),
    /// Graph embedding along `t`.
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Caps {
    pub pole: Option<u32>,
    pub dop: Option<u32>,
    pub coeff_deg: Option<u64>,
}

/// Caps after defaults are filled in for one target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedCaps {
    pub pole: u32,
    pub dop: u32,
    pub coeff_deg: u64,
}

impl fmt::Display for ResolvedCaps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pole={} dop={} coeff_deg={}", self.pole, self.dop, self.coeff_deg)
    }
}

pub const DEFAULT_DOP_CAP: u32 = 4;

/// `x^x * d^d * theta^euler_pow`, where `theta` is `x_v d_v` (direct mode;
/// `euler_pow` is zero in graph mode, where `t` is the last variable).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpMonomial {
    pub x: Exponents,
    pub d: Exponents,
    pub euler_pow: u32,
}

impl OpMonomial {
    pub fn to_weyl(&self, mode: Mode) -> WeylOp {
        let n = self.x.len();
        let base = WeylOp::monomial(n, self.x.clone(), self.d.clone(), Rat::one());
        match mode {
            Mode::Direct(v) if self.euler_pow > 0 => base.compose(&WeylOp::euler_along(n, v).pow(self.euler_pow)),
            _ => base,
        }
    }

    pub fn v_degree(&self, mode: Mode) -> i64 {
        let v = match mode {
            Mode::Direct(v) => v,
            Mode::Graph => self.x.len() - 1,
        };
        self.x[v] as i64 - self.d[v] as i64
    }

    pub fn display(&self, names: &[String], mode: Mode) -> String {
        let dnames: Vec<String> = names.iter().map(|n| format!("d{n}")).collect();
        let mut parts = Vec::new();
        let xm = format_monomial(&self.x, names);
        if !xm.is_empty() {
            parts.push(xm);
        }
        let dm = format_monomial(&self.d, &dnames);
        if !dm.is_empty() {
            parts.push(dm);
        }
        if let Mode::Direct(v) = mode {
            match self.euler_pow {
                0 => {}
                1 => parts.push(format!("({}*d{})", names[v], names[v])),
                p => parts.push(format!("({}*d{})^{}", names[v], names[v], p)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

#[derive(Debug, Clone)]
pub struct MembershipProblem {
    pub generators: Vec<Element>,
    pub mode: Mode,
    pub min_v_degree: i64,
    pub caps: Caps,
    /// Use only `C[x, d_{x_j}, j != v] * (v * generators)` instead of the full
    /// `V^1 D` set (direct mode only).
    pub restricted: bool,
}

/// One target's witness: `b(theta)(m_target) = sum c * mono(m_gen)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetCertificate {
    pub target: usize,
    pub caps: ResolvedCaps,
    pub terms: Vec<(Rat, OpMonomial, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub b_theta: ThetaPoly,
    pub mode: Mode,
    pub targets: Vec<TargetCertificate>,
}

impl MembershipProblem {
    pub fn new(generators: Vec<Element>, mode: Mode) -> Self {
        MembershipProblem { generators, mode, min_v_degree: 1, caps: Caps::default(), restricted: false }
    }

    fn check(&self) -> Result<(), EngineError> {
        for (i, g) in self.generators.iter().enumerate() {
            if g.is_zero() {
                return Err(EngineError::ZeroGenerator(i));
            }
            let ok = matches!((g, self.mode), (Element::Loc(_), Mode::Direct(_)) | (Element::Graph(_), Mode::Graph));
            if !ok || !g.same_module(&self.generators[0]) {
                return Err(EngineError::ModeMismatch(i));
            }
            if g.weight().is_err() {
                return Err(EngineError::InhomogeneousGenerator(i));
            }
        }
        Ok(())
    }

    /// The Euler operator `theta` of this mode.
    pub fn theta(&self) -> WeylOp {
        let n = self.generators[0].op_nvars();
        match self.mode {
            Mode::Direct(v) => WeylOp::euler_along(n, v),
            Mode::Graph => WeylOp::euler_along(n, n - 1),
        }
    }

    /// `b(theta)` as an operator.
    pub fn b_operator(&self, b: &ThetaPoly) -> WeylOp {
        let n = self.generators[0].op_nvars();
        let theta = self.theta();
        let mut op = WeylOp::identity(n);
        for c in b.linear_factors() {
            op = op.compose(&theta.add(&WeylOp::scalar(n, c)));
        }
        op
    }

    fn resolve_caps(&self, b: &ThetaPoly, target: &Element) -> ResolvedCaps {
        let max_pole = self.generators.iter().map(Element::pole_order).max().unwrap_or(0);
        let d = self.generators[0].hyper().degree();
        ResolvedCaps {
            pole: self.caps.pole.unwrap_or(max_pole + b.degree() + 1),
            dop: self.caps.dop.unwrap_or(DEFAULT_DOP_CAP),
            coeff_deg: self.caps.coeff_deg.unwrap_or(target.max_numerator_degree() + 2 * d),
        }
    }

    fn weights(&self) -> WeightSystem {
        self.generators[0].hyper().weights().clone()
    }

    fn graph_ctx(&self) -> Option<&Arc<GraphCtx>> {
        match &self.generators[0] {
            Element::Graph(e) => Some(e.context()),
            Element::Loc(_) => None,
        }
    }

    /// Operator weights per variable: the `x` weights, plus `d_f` for `t`.
    fn op_weights(&self) -> Vec<i64> {
        let mut w: Vec<i64> = self.weights().weights().iter().map(|&x| x as i64).collect();
        if let Some(g) = self.graph_ctx() {
            w.push(g.f_degree() as i64);
        }
        w
    }
}

/// Pole order and coordinates of one monomial applied to one generator.
type Image = (u32, BTreeMap<CoordKey, Rat>);

/// Memo of generator images under operator monomials.
#[derive(Default)]
pub struct ImageCache {
    /// `d^beta theta^p (m_j)` keyed by `(j, beta, p)`.
    partial: HashMap<(usize, Exponents, u32), Element>,
    /// Pole order and coordinates of the full image; `None` when it vanishes.
    full: HashMap<(usize, OpMonomial), Option<Image>>,
}

impl ImageCache {
    pub fn new() -> Self {
        ImageCache::default()
    }

    fn image(&mut self, prob: &MembershipProblem, j: usize, mono: &OpMonomial) -> Element {
        let key = (j, mono.d.clone(), mono.euler_pow);
        if !self.partial.contains_key(&key) {
            let img = self.derivative_part(prob, j, &mono.d, mono.euler_pow);
            self.partial.insert(key.clone(), img);
        }
        let base = &self.partial[&key];
        match base {
            Element::Loc(m) => Element::Loc(m.mul_monomial(&mono.x)),
            Element::Graph(e) => {
                let t = e.context().t_index();
                let mut cur = e.clone();
                for _ in 0..mono.x[t] {
                    cur = cur.act_symbol(GraphSymbol::T);
                }
                let xe: Exponents = mono.x[..t].to_vec();
                let mut out = e.context().zero();
                for (k, m) in cur.layers() {
                    out = out.add(&e.context().layer(m.mul_monomial(&xe), *k));
                }
                Element::Graph(out)
            }
        }
    }

    fn derivative_part(&mut self, prob: &MembershipProblem, j: usize, d: &Exponents, p: u32) -> Element {
        // build from a cached neighbour with one fewer derivative when possible
        if let Some(i) = d.iter().rposition(|&k| k > 0) {
            let mut prev = d.clone();
            prev[i] -= 1;
            let key = (j, prev.clone(), p);
            if !self.partial.contains_key(&key) {
                let img = self.derivative_part(prob, j, &prev, p);
                self.partial.insert(key.clone(), img);
            }
            let n = d.len();
            return self.partial[&key].act(&WeylOp::d(n, i));
        }
        let gen = &prob.generators[j];
        if p == 0 {
            return gen.clone();
        }
        let key = (j, d.clone(), p - 1);
        if !self.partial.contains_key(&key) {
            let img = self.derivative_part(prob, j, d, p - 1);
            self.partial.insert(key.clone(), img);
        }
        self.partial[&key].act(&prob.theta())
    }

    fn coords(
        &mut self,
        prob: &MembershipProblem,
        j: usize,
        mono: &OpMonomial,
        caps: &ResolvedCaps,
        target_weight: i64,
    ) -> Option<BTreeMap<CoordKey, Rat>> {
        let key = (j, mono.clone());
        if !self.full.contains_key(&key) {
            let img = self.image(prob, j, mono);
            let entry = if img.is_zero() {
                None
            } else {
                // grading soundness: only elements of the target's weight enter the system
                assert_eq!(img.weight(), Ok(target_weight), "weight mismatch during assembly");
                Some((img.pole_order(), img.coords()))
            };
            self.full.insert(key.clone(), entry);
        }
        match &self.full[&key] {
            Some((pole, c)) if *pole <= caps.pole => Some(c.clone()),
            _ => None,
        }
    }
}

/// Monomials of exact order `order` admissible for moving generator weight
/// `gen_weight` to `target_weight`.
fn candidate_monomials(
    prob: &MembershipProblem,
    caps: &ResolvedCaps,
    order: u32,
    gen_weight: i64,
    target_weight: i64,
) -> Vec<OpMonomial> {
    let ow = prob.op_weights();
    let nv = ow.len();
    let delta = target_weight - gen_weight;
    let mut out = Vec::new();
    let frozen_d = match prob.mode {
        Mode::Direct(v) => Some(v),
        Mode::Graph => None,
    };
    let v_index = match prob.mode {
        Mode::Direct(v) => v,
        Mode::Graph => nv - 1,
    };
    let min_xv = if prob.restricted { prob.min_v_degree.max(1) } else { prob.min_v_degree };
    let euler_range: Vec<u32> = match prob.mode {
        Mode::Direct(_) if !prob.restricted => (0..=order).collect(),
        _ => vec![0],
    };
    for p in euler_range {
        let dorder = order - p;
        for d in exps_of_total(nv, dorder, frozen_d) {
            let dw: i64 = d.iter().zip(&ow).map(|(&k, &w)| k as i64 * w).sum();
            let xw = delta + dw;
            if xw < 0 || xw as u64 > caps.coeff_deg {
                continue;
            }
            for x in weighted_exps(&ow, xw as u64) {
                let vdeg = x[v_index] as i64 - d[v_index] as i64;
                if vdeg < prob.min_v_degree || (x[v_index] as i64) < min_xv {
                    continue;
                }
                out.push(OpMonomial { x, d: d.clone(), euler_pow: p });
            }
        }
    }
    out
}

fn exps_of_total(n: usize, total: u32, frozen: Option<usize>) -> Vec<Exponents> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn rec(i: usize, left: u32, frozen: Option<usize>, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if i == cur.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let max = if frozen == Some(i) { 0 } else { left };
        for k in (0..=max).rev() {
            cur[i] = k;
            rec(i + 1, left - k, frozen, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, total, frozen, &mut cur, &mut out);
    out
}

fn weighted_exps(weights: &[i64], total: u64) -> Vec<Exponents> {
    let names: Vec<String> = (0..weights.len()).map(|i| format!("v{i}")).collect();
    let w = WeightSystem::new(names, weights.iter().map(|&x| x as u32).collect()).expect("positive weights");
    w.monomials_of_degree(total)
}

fn certify_target(
    prob: &MembershipProblem,
    b: &ThetaPoly,
    b_op: &WeylOp,
    target: usize,
    cache: &mut ImageCache,
) -> Result<TargetCertificate, EngineError> {
    let gen = &prob.generators[target];
    let goal = gen.act(b_op);
    let caps = prob.resolve_caps(b, &goal);
    if goal.is_zero() {
        return Ok(TargetCertificate { target, caps, terms: Vec::new() });
    }
    if goal.pole_order() > caps.pole {
        return Err(EngineError::CapOverflow { target, pole: goal.pole_order(), cap: caps.pole });
    }
    let target_weight = gen.weight().expect("checked homogeneous");
    let rhs = goal.coords();
    let mut columns: Vec<BTreeMap<CoordKey, Rat>> = Vec::new();
    let mut labels: Vec<(OpMonomial, usize)> = Vec::new();
    for order in 0..=caps.dop {
        for (j, g) in prob.generators.iter().enumerate() {
            let gw = g.weight().expect("checked homogeneous");
            for mono in candidate_monomials(prob, &caps, order, gw, target_weight) {
                if let Some(c) = cache.coords(prob, j, &mono, &caps, target_weight) {
                    columns.push(c);
                    labels.push((mono, j));
                }
            }
        }
        if columns.is_empty() {
            continue;
        }
        if let Some(sol) = solve_columns(&columns, &rhs) {
            let terms =
                sol.into_iter().zip(labels).filter(|(c, _)| !c.is_zero()).map(|(c, (m, j))| (c, m, j)).collect();
            return Ok(TargetCertificate { target, caps, terms });
        }
    }
    Err(EngineError::NotFoundAtCaps { caps: caps.to_string(), failed_targets: vec![target] })
}

/// Certify `b(theta)` for every generator.
pub fn certify_divides(b: &ThetaPoly, prob: &MembershipProblem) -> Result<Certificate, EngineError> {
    let all: Vec<usize> = (0..prob.generators.len()).collect();
    certify_targets(b, prob, &all)
}

/// Certify `b(theta)` for the chosen generators only (the rest still serve as
/// module generators on the right-hand side).
pub fn certify_targets(b: &ThetaPoly, prob: &MembershipProblem, targets: &[usize]) -> Result<Certificate, EngineError> {
    let mut caches: Vec<ImageCache> = targets.iter().map(|_| ImageCache::new()).collect();
    certify_with_caches(b, prob, targets, &mut caches)
}

fn certify_with_caches(
    b: &ThetaPoly,
    prob: &MembershipProblem,
    targets: &[usize],
    caches: &mut [ImageCache],
) -> Result<Certificate, EngineError> {
    prob.check()?;
    if let Some(&bad) = targets.iter().find(|&&t| t >= prob.generators.len()) {
        return Err(EngineError::BadTarget(bad));
    }
    let b_op = prob.b_operator(b);
    let results: Vec<Result<TargetCertificate, EngineError>> = targets
        .par_iter()
        .zip(caches.par_iter_mut())
        .map(|(&t, cache)| certify_target(prob, b, &b_op, t, cache))
        .collect();
    let mut certs = Vec::new();
    let mut failed = Vec::new();
    let mut caps_seen = None;
    for r in results {
        match r {
            Ok(c) => certs.push(c),
            Err(EngineError::NotFoundAtCaps { caps, failed_targets }) => {
                caps_seen.get_or_insert(caps);
                failed.extend(failed_targets);
            }
            Err(e) => return Err(e),
        }
    }
    if !failed.is_empty() {
        return Err(EngineError::NotFoundAtCaps { caps: caps_seen.unwrap_or_default(), failed_targets: failed });
    }
    let cert = Certificate { b_theta: b.clone(), mode: prob.mode, targets: certs };
    assert!(cert.replay(prob), "certificate failed to replay");
    Ok(cert)
}

impl Certificate {
    /// Re-expands every combination and checks it against `b(theta)(m)`.
    pub fn replay(&self, prob: &MembershipProblem) -> bool {
        let b_op = prob.b_operator(&self.b_theta);
        self.targets.iter().all(|t| {
            let gen = &prob.generators[t.target];
            let mut acc = gen.act(&b_op);
            for (c, mono, j) in &t.terms {
                if mono.v_degree(self.mode) < prob.min_v_degree {
                    return false;
                }
                let img = prob.generators[*j].act(&mono.to_weyl(self.mode));
                acc = acc.sub(&img.scale(c));
            }
            acc.is_zero()
        })
    }

    pub fn to_bs_polynomial(&self) -> crate::bfunction::BFunction {
        self.b_theta.to_bs_polynomial()
    }
}

/// Monic products of `(theta - r)` over the lattice, by total degree and then
/// lexicographically ascending root vectors; returns the first certified one.
pub fn search_minimal_b(
    prob: &MembershipProblem,
    lattice: &[Rat],
    max_roots: u32,
) -> Result<(ThetaPoly, Certificate), EngineError> {
    let all: Vec<usize> = (0..prob.generators.len()).collect();
    search_minimal_b_targets(prob, lattice, max_roots, &all)
}

pub fn search_minimal_b_targets(
    prob: &MembershipProblem,
    lattice: &[Rat],
    max_roots: u32,
    targets: &[usize],
) -> Result<(ThetaPoly, Certificate), EngineError> {
    let mut lat: Vec<Rat> = lattice.to_vec();
    lat.sort();
    lat.dedup();
    if lat.is_empty() {
        return Err(EngineError::EmptyLattice);
    }
    prob.check()?;
    let mut caches: Vec<ImageCache> = targets.iter().map(|_| ImageCache::new()).collect();
    let mut last_caps = String::new();
    for degree in 0..=max_roots {
        for idx in nondecreasing(lat.len(), degree as usize) {
            let roots: Vec<&Rat> = idx.iter().map(|&i| &lat[i]).collect();
            let b = ThetaPoly::from_theta_roots(roots);
            match certify_with_caches(&b, prob, targets, &mut caches) {
                Ok(cert) => return Ok((b, cert)),
                Err(EngineError::NotFoundAtCaps { caps, .. }) => last_caps = caps,
                Err(e) => return Err(e),
            }
        }
    }
    Err(EngineError::NotFoundAtCaps { caps: last_caps, failed_targets: targets.to_vec() })
}

/// Non-decreasing index vectors of length `k` over `0..n`, lexicographic.
fn nondecreasing(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Convenience: `h / g^k` as an [`Element`].
pub fn fraction(ctx: &Arc<HyperData>, h: Poly, k: u32) -> Element {
    Element::Loc(ctx.fraction(h, k))
}

/// Weighted degree of a homogeneous polynomial, if any.
pub fn homogeneous_degree(p: &Poly, w: &WeightSystem) -> Option<u64> {
    match p.wdeg(w) {
        WDegree::Homogeneous(d) => Some(d),
        _ => None,
    }
}

/// Sign-aware rendering used in reports: `c*mono(gen)`.
pub fn format_term(c: &Rat, mono: &str, gen: &str) -> String {
    if c.is_one() {
        format!("{mono}({gen})")
    } else if (-c.clone()).is_one() {
        format!("-{mono}({gen})")
    } else if c.is_negative() {
        format!("-{}*{mono}({gen})", -c.clone())
    } else {
        format!("{c}*{mono}({gen})")
    }
}
