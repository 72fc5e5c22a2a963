//! Built-in scenarios.

use anyhow::{bail, Result};

pub const NAMES: &[&str] = &[
    "node",
    "quadric-n3",
    "quadric-general:N (N = 3..6)",
    "tau-x1-x2:N (N = 3..4)",
    "cusp-fx",
    "cusp-fy",
    "delta-zero",
];

/// Every concrete preset name, with parameters expanded.
pub fn all() -> Vec<String> {
    let mut out = vec!["node".to_string(), "quadric-n3".to_string()];
    out.extend((3..=6).map(|n| format!("quadric-general:{n}")));
    out.extend((3..=4).map(|n| format!("tau-x1-x2:{n}")));
    out.extend(["cusp-fx", "cusp-fy", "delta-zero"].map(String::from));
    out
}

pub fn preset(name: &str) -> Result<String> {
    let (base, param) = match name.split_once(':') {
        Some((b, p)) => (b, Some(p.parse::<usize>().map_err(|_| anyhow::anyhow!("bad preset parameter '{p}'"))?)),
        None => (name, None),
    };
    Ok(match (base, param) {
        ("node", None) => NODE.to_string(),
        ("quadric-n3", None) => QUADRIC_N3.to_string(),
        ("quadric-general", Some(n)) if (3..=6).contains(&n) => quadric_general(n),
        ("tau-x1-x2", Some(n)) if (3..=4).contains(&n) => tau(n),
        ("cusp-fx", None) => CUSP_FX.to_string(),
        ("cusp-fy", None) => CUSP_FY.to_string(),
        ("delta-zero", None) => DELTA_ZERO.to_string(),
        _ => bail!("unknown preset '{name}'; available: {}", NAMES.join(", ")),
    })
}

const NODE: &str = r#"name = "node"
description = "X = V(xy) with f = x: the component x = 0 contributes s, the component y = 0 contributes s + 1"

[expect]
b = "s*(s + 1)"

[combine]
op = "lcm"
inputs = ["s", "s + 1"]

[delta]
base_dim = 1
codim = 1
lambdas = ["0", "-1", "-2", "1/2"]
"#;

const QUADRIC_N3: &str = r#"name = "quadric-n3"
description = "g = x^2 + y^2 + z^2 with f = x, lowest Hodge piece generated by 1/g"

[space]
vars = ["x", "y", "z"]

[problem]
g = "x^2 + y^2 + z^2"
f = "x"
mode = "direct:x"
generators = ["1/g"]

[expect]
b = "(s + 1)^2"
lct = "1"

[[identities]]
name = "(x dx)^2 on 1/g"
lhs = [["(x*dx)^2", "1/g"]]
rhs = [["1", "(-4*g*x^2 + 8*x^4)/g^3"]]

[[identities]]
name = "(dy^2 + dz^2) on 1/g"
lhs = [["dy^2 + dz^2", "1/g"]]
rhs = [["1", "(4*g - 8*x^2)/g^3"]]

[[identities]]
name = "functional equation"
lhs = [["(x*dx)^2", "1/g"]]
rhs = [["-x*(dy^2 + dz^2)", "x/g"]]

[certify]
b_theta = "theta^2"

[search]
window = ["0", "2"]
max_roots = 2

[grade]
elements = ["1/g", "x/g"]
basis = [{ weight = -2, pole_cap = 1 }, { weight = -1, pole_cap = 1 }, { weight = 0, pole_cap = 1 }]
"#;

fn var_list(names: &[String]) -> String {
    names.iter().map(|v| format!("\"{v}\"")).collect::<Vec<_>>().join(", ")
}

fn theta_text(shift: i64) -> String {
    match shift {
        0 => "theta^2".to_string(),
        c if c > 0 => format!("theta*(theta + {c})"),
        c => format!("theta*(theta - {})", -c),
    }
}

fn bs_text(gamma: usize) -> String {
    if gamma == 1 {
        "(s + 1)^2".to_string()
    } else {
        format!("(s + 1)*(s + {gamma})")
    }
}

fn quadric_general(n: usize) -> String {
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let g = vars.iter().map(|v| format!("{v}^2")).collect::<Vec<_>>().join(" + ");
    let lap = vars[1..].iter().map(|v| format!("d{v}^2")).collect::<Vec<_>>().join(" + ");
    let shift = 3 - n as i64;
    let euler = if shift == 0 { "(x1*dx1)^2".to_string() } else { format!("x1*dx1*(x1*dx1 - {})", n - 3) };
    format!(
        r#"name = "quadric-general:{n}"
description = "g = x1^2 + ... + x{n}^2 with f = x1"

[space]
vars = [{vars}]

[problem]
g = "{g}"
f = "x1"
mode = "direct:x1"
generators = ["1/g"]

[expect]
b = "{b}"

[[identities]]
name = "functional equation"
lhs = [["{euler}", "1/g"]]
rhs = [["-x1*({lap})", "x1/g"]]

[certify]
b_theta = "{theta}"
"#,
        vars = var_list(&vars),
        b = bs_text(n - 2),
        theta = theta_text(shift),
    )
}

/// Works in the coordinates `u = x1 - x2`, `w = x2`, so that `f = u` and
/// `tau = (x1 - x2) d_{x1}` becomes `u du`.
fn tau(n: usize) -> String {
    let rest: Vec<String> = (3..=n).map(|i| format!("x{i}")).collect();
    let mut vars = vec!["u".to_string(), "w".to_string()];
    vars.extend(rest.iter().cloned());
    let mut g = "(u + w)^2 + w^2".to_string();
    for v in &rest {
        g.push_str(&format!(" + {v}^2"));
    }
    let lap = rest.iter().map(|v| format!("d{v}^2")).collect::<Vec<_>>().join(" + ");
    let lambda = 3 - n as i64;
    let tau_op = if lambda == 0 { "(u*du)^2".to_string() } else { format!("u*du*(u*du - {})", -lambda) };
    let five = 5 - n as i64;
    let rhs = format!("-2*u*({five}*(u + w) - w)/g^2 + 8*u^2*(u + w)^2/g^3");
    let half = n as i64 - 6;
    let e_op = format!("{half}/2*dw - 1/2*(u + 2*w)*dw^2 - 1/2*(3*u + 4*w)*({lap})");
    format!(
        r#"name = "tau-x1-x2:{n}"
description = "g = x1^2 + ... + x{n}^2 with f = x1 - x2, written with u = x1 - x2 and w = x2"

[space]
vars = [{vars}]

[problem]
g = "{g}"
f = "u"
mode = "direct:u"
generators = ["1/g"]

[expect]
b = "{b}"

[[identities]]
name = "tau(tau + lambda) on 1/g, lambda = {lambda}"
lhs = [["{tau_op}", "1/g"]]
rhs = [["1", "{rhs}"]]

[[identities]]
name = "second operator on u/g"
lhs = [["{e_op}", "u/g"]]
rhs = [["1", "{rhs}"]]

[[identities]]
name = "functional equation"
lhs = [["{tau_op}", "1/g"]]
rhs = [["{e_op}", "u/g"]]

[certify]
b_theta = "{theta}"
"#,
        vars = var_list(&vars),
        b = bs_text(n - 2),
        theta = theta_text(lambda),
    )
}

const CUSP_FX: &str = r#"name = "cusp-fx"
description = "g = x^3 + y^2 with weights (2, 3) and f = x; lowest Hodge piece generated by x/g and y/g"

[space]
vars = ["x", "y"]
weights = [2, 3]

[problem]
g = "x^3 + y^2"
f = "x"
mode = "direct:x"
generators = ["x/g", "y/g"]

[expect]
b = "(s + 1)*(s + 1/2)"
lct = "1/2"

[[identities]]
name = "(x dx + 1/2) on x/g"
lhs = [["x*dx + 1/2", "x/g"]]
rhs = [["-3/2*dy", "x*y/g"]]

[[identities]]
name = "x dx on y/g"
lhs = [["x*dx", "y/g"]]
rhs = [["3/2*x*dy", "x^2/g"]]

[certify]
b_theta = "theta*(theta + 1/2)"

[search]
window = ["0", "2"]
max_roots = 2

[grade]
elements = ["x/g", "y/g", "x*y/g"]
"#;

const CUSP_FY: &str = r#"name = "cusp-fy"
description = "g = x^3 + y^2 with f = y; only the generator y/g is settled, x/g is left open"

[space]
vars = ["x", "y"]
weights = [2, 3]

[problem]
g = "x^3 + y^2"
f = "y"
mode = "direct:y"
generators = ["x/g", "y/g"]

[[identities]]
name = "(y dy + 1/3) on y/g"
lhs = [["y*dy + 1/3", "y/g"]]
rhs = [["-2/3*dx", "x*y/g"]]

[certify]
b_theta = "theta + 1/3"
targets = [1]
note = "partial: root 1/3 certified on y/g only; the generator x/g is open"
"#;

const DELTA_ZERO: &str = r#"name = "delta-zero"
description = "f vanishes identically on the support: H^1 of the coordinate x, i.e. the delta module along x = 0"

[space]
vars = ["x", "y"]

[problem]
g = "x^2"
f = "x"
mode = "direct:x"
generators = ["x/g"]

[expect]
b = "s"

[search]
window = ["-1", "1"]
max_roots = 1

[delta]
base_dim = 1
codim = 1
lambdas = ["0", "-1", "-2"]
"#;
