//! Scenario files: TOML documents describing a space, a module, and the
//! computations to run on it.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use bsv_core::engine::{Caps, Element, MembershipProblem, Mode};
use bsv_core::graph::GraphCtx;
use bsv_core::locoh::HyperData;
use bsv_core::poly::{Poly, WeightSystem};
use serde::{Deserialize, Serialize};

use crate::parse::{parse_element, parse_poly, ElemContext};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: Option<String>,
    pub description: Option<String>,
    pub space: Option<Space>,
    pub problem: Option<Problem>,
    #[serde(default)]
    pub caps: CapsSection,
    #[serde(default)]
    pub expect: Expect,
    #[serde(default)]
    pub identities: Vec<Identity>,
    pub certify: Option<Certify>,
    pub search: Option<Search>,
    pub grade: Option<Grade>,
    pub combine: Option<Combine>,
    pub delta: Option<Delta>,
    pub ledger: Option<LedgerSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Space {
    pub vars: Vec<String>,
    pub weights: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub g: String,
    pub f: Option<String>,
    /// `"direct:<var>"` or `"graph"`.
    pub mode: String,
    #[serde(default)]
    pub generators: Vec<String>,
    pub min_v_degree: Option<i64>,
    #[serde(default)]
    pub restricted: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsSection {
    pub pole: Option<u32>,
    pub dop: Option<u32>,
    pub coeff_deg: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    pub b: Option<String>,
    pub lct: Option<String>,
}

/// `sum lhs = sum rhs`, each side a list of `[operator, element]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Identity {
    pub name: Option<String>,
    pub lhs: Vec<[String; 2]>,
    #[serde(default)]
    pub rhs: Vec<[String; 2]>,
    /// Whether the identity is expected to hold; defaults to true.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certify {
    pub b_theta: String,
    pub targets: Option<Vec<usize>>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Search {
    /// Window `(lo, hi]` for the b-function roots `gamma`.
    pub window: [String; 2],
    pub max_roots: Option<u32>,
    pub targets: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grade {
    #[serde(default)]
    pub elements: Vec<String>,
    /// Value substituted for `s` in the graph-mode eigenvalue.
    pub lambda_s: Option<String>,
    #[serde(default)]
    pub basis: Vec<BasisRequest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisRequest {
    pub weight: i64,
    pub pole_cap: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Combine {
    /// `"lcm"` or `"product"`.
    pub op: String,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Delta {
    pub base_dim: usize,
    pub codim: usize,
    #[serde(default)]
    pub lambdas: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerSection {
    /// Pairs `[k, a]`: coefficient in the relative canonical divisor and in `F`.
    pub divisors: Vec<[u64; 2]>,
    pub bound: String,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        toml::from_str(text).context("invalid scenario")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }
}

/// A scenario's module after parsing and validation.
pub struct Loaded {
    pub weights: WeightSystem,
    pub ctx: ElemContext,
    pub mode: Mode,
    pub generators: Vec<Element>,
    pub generator_text: Vec<String>,
    pub problem: MembershipProblem,
}

impl Loaded {
    pub fn op_names(&self) -> Vec<String> {
        self.ctx.op_names()
    }

    /// Weight of the variable the V-filtration is taken along.
    pub fn d_f(&self) -> u64 {
        match (&self.ctx, self.mode) {
            (ElemContext::Graph(c), _) => c.f_degree(),
            (_, Mode::Direct(v)) => self.weights.weights()[v] as u64,
            (_, Mode::Graph) => unreachable!("graph mode has a graph context"),
        }
    }

    pub fn element(&self, text: &str) -> Result<Element> {
        parse_element(text, &self.ctx).map_err(|e| anyhow!("element '{text}': {e}"))
    }
}

pub fn weight_system(space: &Space) -> Result<WeightSystem> {
    for (i, v) in space.vars.iter().enumerate() {
        if v == "g" || v == "t" || v == "s" || v == "theta" {
            bail!("variable name '{v}' is reserved");
        }
        if space.vars[..i].contains(v) {
            bail!("variable '{v}' declared twice");
        }
        if let Some(rest) = v.strip_prefix('d') {
            if space.vars.iter().any(|w| w == rest) || rest == "t" {
                bail!("variable '{v}' clashes with the derivative d{rest}");
            }
        }
    }
    let weights = space.weights.clone().unwrap_or_else(|| vec![1; space.vars.len()]);
    WeightSystem::new(space.vars.clone(), weights).map_err(|e| anyhow!("weights: {e}"))
}

pub fn load(sc: &Scenario, caps_override: &Caps) -> Result<Loaded> {
    let space = sc.space.as_ref().ok_or_else(|| anyhow!("missing [space]"))?;
    let prob = sc.problem.as_ref().ok_or_else(|| anyhow!("missing [problem]"))?;
    let weights = weight_system(space)?;
    let names = weights.names().to_vec();
    let g = parse_poly(&prob.g, &names).map_err(|e| anyhow!("g: {e}"))?;
    let hyper = HyperData::new(g, weights.clone()).map_err(|e| anyhow!("g: {e}"))?;
    let (ctx, mode) = if prob.mode == "graph" {
        let ftext = prob.f.as_ref().ok_or_else(|| anyhow!("graph mode needs f"))?;
        let f = parse_poly(ftext, &names).map_err(|e| anyhow!("f: {e}"))?;
        let gc = GraphCtx::new(Arc::clone(&hyper), f).map_err(|e| anyhow!("f: {e}"))?;
        (ElemContext::Graph(gc), Mode::Graph)
    } else if let Some(v) = prob.mode.strip_prefix("direct:") {
        let idx = weights.index_of(v).ok_or_else(|| anyhow!("mode: unknown variable '{v}'"))?;
        if let Some(ftext) = &prob.f {
            let f = parse_poly(ftext, &names).map_err(|e| anyhow!("f: {e}"))?;
            if f != Poly::var(names.len(), idx) {
                bail!("direct mode along {v} needs f = {v}");
            }
        }
        (ElemContext::Loc(hyper), Mode::Direct(idx))
    } else {
        bail!("mode must be \"graph\" or \"direct:<var>\", got \"{}\"", prob.mode);
    };
    let mut generators = Vec::new();
    for text in &prob.generators {
        let e = parse_element(text, &ctx).map_err(|e| anyhow!("generator '{text}': {e}"))?;
        if e.is_zero() {
            bail!("generator '{text}' is zero");
        }
        if e.weight().is_err() {
            bail!("generator '{text}' is not weight-homogeneous");
        }
        generators.push(e);
    }
    let mut problem = MembershipProblem::new(generators.clone(), mode);
    if let Some(m) = prob.min_v_degree {
        problem.min_v_degree = m;
    }
    problem.restricted = prob.restricted;
    problem.caps = Caps {
        pole: caps_override.pole.or(sc.caps.pole),
        dop: caps_override.dop.or(sc.caps.dop),
        coeff_deg: caps_override.coeff_deg.or(sc.caps.coeff_deg),
    };
    Ok(Loaded { weights, ctx, mode, generators, generator_text: prob.generators.clone(), problem })
}
