//! Command dispatch. Every command produces a [`Report`] with one entry per
//! checked item; the exit code follows from the worst status.

use std::fmt;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Result};
use bsv_core::bfunction::{lct_report, validate_b, BFunction};
use bsv_core::engine::{
    candidate_roots, certify_targets, search_minimal_b_targets, theta_lattice, verify_identity, Caps, Certificate,
    Element, EngineError,
};
use bsv_core::graph::{graph_euler_eigenvalue, DeltaModule};
use bsv_core::ledger::{candidate_jumps, lct_ledger, shift_check, Ledger};
use bsv_core::poly::Rat;
use bsv_core::weyl::WeylOp;
use num_traits::Zero;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::parse::{parse_bfunction, parse_op, parse_rat, parse_theta};
use crate::scenario::{load, Loaded, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    /// Refuted identity, failed expectation, or nothing found at the caps.
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Certify,
    Search,
    Grade,
    Combine,
    Kashiwara,
    Jump,
    /// Every section present in the scenario.
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Certify => "certify",
            Command::Search => "search",
            Command::Grade => "grade",
            Command::Combine => "combine",
            Command::Kashiwara => "kashiwara",
            Command::Jump => "jump",
            Command::All => "preset",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub caps: Caps,
    pub timestamp: bool,
}

/// One checked item.
#[derive(Debug, Clone)]
pub struct Item {
    pub status: Status,
    pub text: String,
    pub json: Value,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub scenario: Option<String>,
    pub digest: String,
    pub caps: Caps,
    pub items: Vec<Item>,
    pub elapsed_ms: Option<u128>,
    pub timestamp: Option<u64>,
}

impl Report {
    pub fn status(&self) -> Status {
        self.items.iter().map(|i| i.status).max().unwrap_or(Status::Ok)
    }

    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Ok => 0,
            Status::Failed => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("scenario".into(), json!(self.scenario));
        m.insert("input_digest".into(), json!(self.digest));
        m.insert(
            "caps".into(),
            json!({"pole": self.caps.pole, "dop": self.caps.dop, "coeff_deg": self.caps.coeff_deg}),
        );
        m.insert("status".into(), json!(status_word(self.status())));
        m.insert("results".into(), Value::Array(self.items.iter().map(|i| i.json.clone()).collect()));
        if let Some(ms) = self.elapsed_ms {
            m.insert("timing_ms".into(), json!(ms));
        }
        if let Some(ts) = self.timestamp {
            m.insert("timestamp".into(), json!(ts));
        }
        Value::Object(m)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.scenario {
            Some(name) => writeln!(f, "{} {name}", self.command)?,
            None => writeln!(f, "{}", self.command)?,
        }
        for item in &self.items {
            let tag = match item.status {
                Status::Ok => "ok  ",
                Status::Failed => "FAIL",
            };
            let mut lines = item.text.lines();
            if let Some(first) = lines.next() {
                writeln!(f, "  [{tag}] {first}")?;
            }
            for l in lines {
                writeln!(f, "         {l}")?;
            }
        }
        write!(f, "status: {}", status_word(self.status()))?;
        if let Some(ms) = self.elapsed_ms {
            write!(f, " ({ms} ms)")?;
        }
        writeln!(f)
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Failed => "failed",
    }
}

fn item(ok: bool, text: String, mut json: Value) -> Item {
    let status = if ok { Status::Ok } else { Status::Failed };
    if let Value::Object(m) = &mut json {
        m.insert("status".into(), json!(status_word(status)));
    }
    Item { status, text, json }
}

pub fn digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

/// Runs `cmd` on a scenario given as TOML text.
pub fn run(cmd: Command, text: &str, opts: &Options) -> Result<Report> {
    let start = Instant::now();
    let sc = Scenario::from_toml(text)?;
    let loaded = match &sc.problem {
        Some(_) => Some(load(&sc, &opts.caps)?),
        None => None,
    };
    let mut items = Vec::new();
    let needs = |present: bool, section: &str| -> Result<bool> {
        match (cmd, present) {
            (Command::All, p) => Ok(p),
            (_, true) => Ok(true),
            (_, false) => bail!("scenario has no {section} section"),
        }
    };
    let want = |c: Command| cmd == c || cmd == Command::All;
    if want(Command::Verify) && needs(!sc.identities.is_empty(), "[[identities]]")? {
        items.extend(verify(&sc, need_problem(&loaded)?)?);
    }
    if want(Command::Grade) && needs(sc.grade.is_some(), "[grade]")? {
        items.extend(grade(&sc, need_problem(&loaded)?)?);
    }
    if want(Command::Certify)
        && needs(sc.certify.is_some() || (cmd == Command::Certify && sc.expect.b.is_some()), "[certify]")?
    {
        items.push(certify(&sc, need_problem(&loaded)?)?);
    }
    if want(Command::Search) && needs(sc.search.is_some(), "[search]")? {
        items.push(search(&sc, need_problem(&loaded)?)?);
    }
    if want(Command::Combine) && needs(sc.combine.is_some(), "[combine]")? {
        items.push(combine(&sc)?);
    }
    if want(Command::Kashiwara) && needs(sc.delta.is_some(), "[delta]")? {
        items.extend(kashiwara(&sc)?);
    }
    if want(Command::Jump) && needs(sc.ledger.is_some(), "[ledger]")? {
        items.extend(jump(&sc)?);
    }
    let (elapsed_ms, timestamp) = if opts.timestamp {
        let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        (Some(start.elapsed().as_millis()), Some(ts))
    } else {
        (None, None)
    };
    Ok(Report {
        command: cmd.name(),
        scenario: sc.name.clone(),
        digest: digest(text),
        caps: loaded.as_ref().map(|l| l.problem.caps).unwrap_or(opts.caps),
        items,
        elapsed_ms,
        timestamp,
    })
}

fn need_problem(l: &Option<Loaded>) -> Result<&Loaded> {
    l.as_ref().ok_or_else(|| anyhow!("scenario has no [problem] section"))
}

fn op(l: &Loaded, text: &str) -> Result<WeylOp> {
    parse_op(text, &l.op_names()).map_err(|e| anyhow!("operator '{text}': {e}"))
}

fn rat(text: &str) -> Result<Rat> {
    parse_rat(text).map_err(|e| anyhow!("number '{text}': {e}"))
}

fn bfun(text: &str) -> Result<BFunction> {
    parse_bfunction(text).map_err(|e| anyhow!("b-function '{text}': {e}"))
}

fn side(l: &Loaded, pairs: &[[String; 2]]) -> Result<Vec<(WeylOp, Element)>> {
    pairs.iter().map(|[o, e]| Ok((op(l, o)?, l.element(e)?))).collect()
}

fn verify(sc: &Scenario, l: &Loaded) -> Result<Vec<Item>> {
    let mut out = Vec::new();
    for (i, id) in sc.identities.iter().enumerate() {
        let name = id.name.clone().unwrap_or_else(|| format!("identity {}", i + 1));
        let check = verify_identity(&side(l, &id.lhs)?, &side(l, &id.rhs)?)?;
        let expected = id.holds.unwrap_or(true);
        let residual = check.residual.display();
        let text = if check.holds {
            format!("identity '{name}' holds")
        } else {
            format!("identity '{name}' does not hold; residual lhs - rhs = {residual}")
        };
        let json = json!({
            "kind": "identity",
            "name": name,
            "holds": check.holds,
            "expected": expected,
            "residual": residual,
        });
        out.push(item(check.holds == expected, text, json));
    }
    Ok(out)
}

fn grade(sc: &Scenario, l: &Loaded) -> Result<Vec<Item>> {
    let gr = sc.grade.as_ref().expect("checked");
    let lambda_s = gr.lambda_s.as_deref().map(rat).transpose()?.unwrap_or_else(Rat::zero);
    let mut out = Vec::new();
    for text in &gr.elements {
        let e = l.element(text)?;
        let weight = e.weight().ok();
        let eigen = match &e {
            Element::Loc(m) => m.euler_eigenvalue().ok(),
            Element::Graph(g) => graph_euler_eigenvalue(g, &lambda_s).ok(),
        };
        let ok = eigen.is_some();
        let shown = eigen.as_ref().map(|r| r.to_string()).unwrap_or_else(|| "not homogeneous".into());
        out.push(item(
            ok,
            format!("{} : weight {}, Euler eigenvalue {shown}", e.display(), weight.map_or("-".into(), |w| w.to_string())),
            json!({"kind": "grade", "element": e.display(), "weight": weight, "eigenvalue": eigen.map(|r| r.to_string())}),
        ));
    }
    for req in &gr.basis {
        let basis: Vec<String> =
            l.ctx.hyper().weight_basis(req.weight, req.pole_cap).iter().map(|m| m.display()).collect();
        out.push(item(
            true,
            format!(
                "weight {} basis up to pole {} ({}): [{}]",
                req.weight,
                req.pole_cap,
                basis.len(),
                basis.join(", ")
            ),
            json!({"kind": "weight_basis", "weight": req.weight, "pole_cap": req.pole_cap, "basis": basis}),
        ));
    }
    Ok(out)
}

fn certificate_json(cert: &Certificate, l: &Loaded) -> Value {
    let names = l.op_names();
    let targets: Vec<Value> = cert
        .targets
        .iter()
        .map(|t| {
            let terms: Vec<Value> = t
                .terms
                .iter()
                .map(|(c, m, j)| {
                    json!({"coeff": c.to_string(), "operator": m.display(&names, cert.mode), "generator": l.generator_text[*j]})
                })
                .collect();
            json!({
                "generator": l.generator_text[t.target],
                "caps": {"pole": t.caps.pole, "dop": t.caps.dop, "coeff_deg": t.caps.coeff_deg},
                "terms": terms,
            })
        })
        .collect();
    json!({"b_theta": cert.b_theta.to_string(), "b": cert.to_bs_polynomial().to_string(), "targets": targets})
}

fn certificate_text(cert: &Certificate, l: &Loaded) -> String {
    let names = l.op_names();
    let mut s = String::new();
    for t in &cert.targets {
        let terms: Vec<String> = t
            .terms
            .iter()
            .map(|(c, m, j)| format!("({c})*{}[{}]", m.display(&names, cert.mode), l.generator_text[*j]))
            .collect();
        let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        s.push_str(&format!("\n{}({}) = {rhs}   [{}]", cert.b_theta, l.generator_text[t.target], t.caps));
    }
    s
}

/// Compares a certified `b` with the expectation; `None` when nothing is expected.
fn expectation(sc: &Scenario, b: &BFunction) -> Result<Option<bool>> {
    sc.expect.b.as_deref().map(|t| Ok(&bfun(t)? == b)).transpose()
}

fn not_found_item(kind: &str, e: &EngineError, extra: Value) -> Option<Item> {
    match e {
        EngineError::NotFoundAtCaps { caps, failed_targets } => Some(item(
            false,
            format!("{kind}: {e}"),
            json!({"kind": kind, "found": false, "caps": caps, "failed_targets": failed_targets, "detail": extra}),
        )),
        EngineError::CapOverflow { target, pole, cap } => Some(item(
            false,
            format!("{kind}: {e}"),
            json!({"kind": kind, "found": false, "cap_overflow": {"target": target, "pole": pole, "cap": cap}, "detail": extra}),
        )),
        _ => None,
    }
}

fn certify(sc: &Scenario, l: &Loaded) -> Result<Item> {
    let (b, targets, note) = match &sc.certify {
        Some(c) => (
            parse_theta(&c.b_theta).map_err(|e| anyhow!("b_theta '{}': {e}", c.b_theta))?,
            c.targets.clone(),
            c.note.clone(),
        ),
        None => (bfun(sc.expect.b.as_deref().expect("checked"))?.to_theta(), None, None),
    };
    let all: Vec<usize> = (0..l.generators.len()).collect();
    let targets = targets.unwrap_or(all.clone());
    let partial = targets != all;
    match certify_targets(&b, &l.problem, &targets) {
        Ok(cert) => {
            let bs = cert.to_bs_polynomial();
            let matches = if partial { None } else { expectation(sc, &bs)? };
            let mut text = format!("certified {b} (b(s) = {bs})");
            if partial {
                text.push_str(" on a subset of the generators");
            }
            if let Some(m) = matches {
                text.push_str(if m { "; matches expected b" } else { "; differs from expected b" });
            }
            if let Some(n) = &note {
                text.push_str(&format!("\nnote: {n}"));
            }
            text.push_str(&certificate_text(&cert, l));
            let mut j = certificate_json(&cert, l);
            let obj = j.as_object_mut().expect("object");
            obj.insert("kind".into(), json!("certificate"));
            obj.insert("found".into(), json!(true));
            obj.insert("partial".into(), json!(partial));
            obj.insert("matches_expected".into(), json!(matches));
            obj.insert("note".into(), json!(note));
            obj.insert("replayed".into(), json!(cert.replay(&l.problem)));
            Ok(item(matches != Some(false), text, j))
        }
        Err(e) => not_found_item("certificate", &e, json!({"b_theta": b.to_string()})).ok_or_else(|| anyhow!("{e}")),
    }
}

fn search(sc: &Scenario, l: &Loaded) -> Result<Item> {
    let s = sc.search.as_ref().expect("checked");
    let lo = rat(&s.window[0])?;
    let hi = rat(&s.window[1])?;
    let gammas = candidate_roots(l.d_f(), &lo, &hi)?;
    let lattice = theta_lattice(&gammas);
    let max_roots = s.max_roots.unwrap_or(2);
    let targets = s.targets.clone().unwrap_or_else(|| (0..l.generators.len()).collect());
    let lattice_text: Vec<String> = gammas.iter().map(|g| g.to_string()).collect();
    match search_minimal_b_targets(&l.problem, &lattice, max_roots, &targets) {
        Ok((b, cert)) => {
            let bs = cert.to_bs_polynomial();
            let matches = expectation(sc, &bs)?;
            let lct = sc.expect.lct.as_deref().map(rat).transpose()?;
            let report = lct_report(&bs, lct.as_ref());
            let violations: Vec<String> = validate_b(&bs).iter().map(|v| v.to_string()).collect();
            let mut text = format!("found {b} (b(s) = {bs}) over gamma in [{}]", lattice_text.join(", "));
            if let Some(m) = matches {
                text.push_str(if m { "; matches expected b" } else { "; differs from expected b" });
            }
            if let Some(r) = &report.min_root {
                text.push_str(&format!("\nsmallest positive root {r}"));
            }
            if let Some(c) = report.consistent {
                text.push_str(if c {
                    "; consistent with the expected lct"
                } else {
                    "; INCONSISTENT with the expected lct"
                });
            }
            if !violations.is_empty() {
                text.push_str(&format!("\nroot violations: {}", violations.join(", ")));
            }
            text.push_str(&certificate_text(&cert, l));
            let mut j = certificate_json(&cert, l);
            let obj = j.as_object_mut().expect("object");
            obj.insert("kind".into(), json!("search"));
            obj.insert("found".into(), json!(true));
            obj.insert("lattice".into(), json!(lattice_text));
            obj.insert("matches_expected".into(), json!(matches));
            obj.insert("min_root".into(), json!(report.min_root.map(|r| r.to_string())));
            obj.insert("lct_consistent".into(), json!(report.consistent));
            obj.insert("violations".into(), json!(violations));
            let ok = matches != Some(false) && report.consistent != Some(false);
            Ok(item(ok, text, j))
        }
        Err(e) => not_found_item("search", &e, json!({"lattice": lattice_text, "max_roots": max_roots}))
            .ok_or_else(|| anyhow!("{e}")),
    }
}

fn combine(sc: &Scenario) -> Result<Item> {
    let c = sc.combine.as_ref().expect("checked");
    let inputs: Vec<BFunction> = c.inputs.iter().map(|t| bfun(t)).collect::<Result<_>>()?;
    let Some((first, rest)) = inputs.split_first() else { bail!("[combine] needs at least one input") };
    let result = match c.op.as_str() {
        "lcm" => rest.iter().fold(first.clone(), |acc, b| acc.lcm(b)),
        "product" => rest.iter().fold(first.clone(), |acc, b| acc.product(b)),
        other => bail!("unknown combine op '{other}' (use lcm or product)"),
    };
    let violations: Vec<String> = validate_b(&result).iter().map(|v| v.to_string()).collect();
    let lct = sc.expect.lct.as_deref().map(rat).transpose()?;
    let report = lct_report(&result, lct.as_ref());
    let matches = expectation(sc, &result)?;
    let shown: Vec<String> = inputs.iter().map(|b| b.to_string()).collect();
    let mut text = format!("{}({}) = {result}", c.op, shown.join(", "));
    if let Some(m) = matches {
        text.push_str(if m { "; matches expected b" } else { "; differs from expected b" });
    }
    if !violations.is_empty() {
        text.push_str(&format!("\nroot violations: {}", violations.join(", ")));
    }
    let ok = matches != Some(false) && report.consistent != Some(false);
    Ok(item(
        ok,
        text,
        json!({
            "kind": "combine",
            "op": c.op,
            "inputs": shown,
            "result": result.to_string(),
            "matches_expected": matches,
            "violations": violations,
            "min_root": report.min_root.map(|r| r.to_string()),
            "lct_consistent": report.consistent,
        }),
    ))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn kashiwara(sc: &Scenario) -> Result<Vec<Item>> {
    let d = sc.delta.as_ref().expect("checked");
    let m = DeltaModule::new(d.base_dim, d.codim).map_err(|e| anyhow!("[delta]: {e}"))?;
    let pushed = m.push_forward();
    let mut out = Vec::new();
    for text in &d.lambdas {
        let lambda = rat(text)?;
        let piece = m.v_piece(&lambda);
        let up = pushed.v_piece(&lambda);
        let predicted = closed_form(d.base_dim, d.codim, &lambda);
        let predicted_up = closed_form(d.base_dim, d.codim + 1, &lambda);
        let ok = piece.dim == predicted && up.dim == predicted_up;
        out.push(item(
            ok,
            format!(
                "dim V^{lambda} = {} (closed form {predicted}); after one more coordinate {} (closed form {predicted_up}); dim Gr = {}",
                piece.dim,
                up.dim,
                m.gr_dim(&lambda)
            ),
            json!({
                "kind": "v_piece",
                "lambda": lambda.to_string(),
                "dim": piece.dim,
                "closed_form": predicted,
                "dim_pushed": up.dim,
                "closed_form_pushed": predicted_up,
                "gr_dim": m.gr_dim(&lambda),
            }),
        ));
    }
    let b = m.bfunction();
    let b_up = pushed.bfunction();
    out.push(item(
        b == b_up,
        format!("b-function {b}; after one more coordinate {b_up}"),
        json!({"kind": "delta_bfunction", "b": b.to_string(), "b_pushed": b_up.to_string()}),
    ));
    Ok(out)
}

/// `base_dim * #{alpha in N^c : |alpha| <= -lambda}`.
fn closed_form(base_dim: usize, codim: usize, lambda: &Rat) -> usize {
    let top = (-lambda).floor().to_integer();
    if top < 0.into() {
        return 0;
    }
    let n: usize = top.try_into().unwrap_or(usize::MAX);
    base_dim * binomial(n + codim, codim)
}

fn jump(sc: &Scenario) -> Result<Vec<Item>> {
    let ls = sc.ledger.as_ref().expect("checked");
    let ledger = Ledger::new(ls.divisors.iter().map(|[k, a]| (*k, *a)).collect())?;
    let bound = rat(&ls.bound)?;
    let lct = lct_ledger(&ledger);
    let jumps = candidate_jumps(&ledger, &bound)?;
    let shifts = shift_check(&ledger, &bound)?;
    let expected = sc.expect.lct.as_deref().map(rat).transpose()?;
    let lct_ok = expected.as_ref().map(|e| e == &lct);
    let jumps_text: Vec<String> = jumps.iter().map(|j| j.to_string()).collect();
    let mut lct_text = format!("valuation-level lct {lct}");
    if let Some(ok) = lct_ok {
        lct_text.push_str(if ok { "; matches expected" } else { "; differs from expected" });
    }
    Ok(vec![
        item(
            lct_ok != Some(false),
            lct_text,
            json!({"kind": "lct", "lct": lct.to_string(), "matches_expected": lct_ok}),
        ),
        item(
            true,
            format!("candidate jumps in (0, {bound}]: [{}] (true jumping numbers are a subset)", jumps_text.join(", ")),
            json!({"kind": "jumps", "bound": bound.to_string(), "jumps": jumps_text}),
        ),
        item(
            shifts.passed(),
            format!(
                "shift by 1: {} closure failures, {} floor failures over {} samples",
                shifts.closure_failures.len(),
                shifts.floor_failures.len(),
                shifts.samples
            ),
            json!({
                "kind": "shift_check",
                "passed": shifts.passed(),
                "closure_failures": shifts.closure_failures.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                "floor_failures": shifts.floor_failures.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                "samples": shifts.samples,
            }),
        ),
    ])
}
