use std::path::Path;
use std::process::{Command as Proc, Output};

use bsv::parse::{parse_element, parse_op, parse_poly};
use bsv::presets::{all, preset};
use bsv::run::{run, Command, Options, Status};
use bsv::scenario::{load, Scenario};
use bsv_core::engine::Caps;

fn bsv(args: &[&str]) -> Output {
    Proc::new(env!("CARGO_BIN_EXE_bsv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const FALSE_IDENTITY: &str = r#"
[space]
vars = ["x", "y"]

[problem]
g = "x^2 + y^2"
mode = "direct:x"
generators = ["1/g"]

[[identities]]
name = "wrong sign"
lhs = [["dx", "1/g"]]
rhs = [["1", "2*x/g^2"]]
"#;

#[test]
fn every_preset_passes() {
    let opts = Options { caps: Caps::default(), timestamp: false };
    for name in all() {
        let report = run(Command::All, &preset(&name).unwrap(), &opts).unwrap();
        assert_eq!(report.status(), Status::Ok, "{name}:\n{report}");
        assert_eq!(report.exit_code(), 0);
    }
}

#[test]
fn preset_binary_runs() {
    let o = bsv(&["preset", "cusp-fx"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("(s + 1/2)*(s + 1)"), "{text}");
    let o = bsv(&["preset", "node"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("s*(s + 1)"));
}

#[test]
fn preset_print_and_list() {
    let o = bsv(&["preset", "quadric-general:5", "--print"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), preset("quadric-general:5").unwrap());
    let o = bsv(&["preset", "--list"]);
    assert!(stdout(&o).lines().any(|l| l == "cusp-fy"));
}

#[test]
fn printed_forms_reparse() {
    for name in all() {
        let sc = Scenario::from_toml(&preset(&name).unwrap()).unwrap();
        let Some(prob) = &sc.problem else { continue };
        let l = load(&sc, &Caps::default()).unwrap();
        let names = l.weights.names().to_vec();
        let mut polys = vec![prob.g.clone()];
        polys.extend(prob.f.clone());
        for t in &polys {
            let p = parse_poly(t, &names).unwrap();
            let back = parse_poly(&p.display(&names, &l.weights), &names).unwrap();
            assert_eq!(back, p, "{name}: {t}");
        }
        let mut elems = prob.generators.clone();
        let ops_names = l.op_names();
        for id in &sc.identities {
            for [o, e] in id.lhs.iter().chain(&id.rhs) {
                elems.push(e.clone());
                let op = parse_op(o, &ops_names).unwrap();
                let back = parse_op(&op.display(&ops_names), &ops_names).unwrap();
                assert_eq!(back, op, "{name}: {o}");
            }
        }
        for t in &elems {
            let e = parse_element(t, &l.ctx).unwrap();
            let back = parse_element(&e.display(), &l.ctx).unwrap();
            assert_eq!(back, e, "{name}: {t} printed as {}", e.display());
        }
    }
}

#[test]
fn json_is_stable_without_timestamp() {
    let args = ["--json", "--no-timestamp", "preset", "cusp-fx"];
    let a = bsv(&args);
    let b = bsv(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["input_digest"].as_str().unwrap().starts_with("sha256:"));
    assert!(v.get("timestamp").is_none());
    assert!(v["results"].as_array().unwrap().iter().all(|r| r["status"] == "ok"));
}

#[test]
fn false_identity_exits_one_with_residual() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "false.toml", FALSE_IDENTITY);
    let o = bsv(&["verify", &file]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("residual lhs - rhs = -4*x/g^2"), "{}", stdout(&o));
    let o = bsv(&["--json", "verify", &file]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"][0]["residual"], "-4*x/g^2");
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = bsv(&["verify", "/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let bad = write(dir.path(), "bad.toml", &FALSE_IDENTITY.replace("2*x/g^2", "2x/g^2"));
    let o = bsv(&["verify", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
    let unknown = write(dir.path(), "unknown.toml", &format!("{FALSE_IDENTITY}\n[extra]\nkey = 1\n"));
    assert_eq!(bsv(&["verify", &unknown]).status.code(), Some(2));
    let inhomogeneous = write(dir.path(), "inhom.toml", &FALSE_IDENTITY.replace("[\"1/g\"]", "[\"1/g + x/g\"]"));
    assert_eq!(bsv(&["verify", &inhomogeneous]).status.code(), Some(2));
    assert_eq!(bsv(&["preset", "quadric-general:9"]).status.code(), Some(2));
}

#[test]
fn caps_flags_override() {
    let o = bsv(&["--pole-cap", "1", "certify", "preset:quadric-n3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("above the cap 1"));
    let o = bsv(&["--json", "--no-timestamp", "--dop-cap", "2", "certify", "preset:quadric-n3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["caps"]["dop"], 2);
}

#[test]
fn ledger_and_delta_commands() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "ledger.toml",
        "[expect]\nlct = \"2/3\"\n\n[ledger]\ndivisors = [[1, 3], [0, 1]]\nbound = \"2\"\n",
    );
    let o = bsv(&["jump", &file]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("valuation-level lct 2/3"));
    let o = bsv(&["kashiwara", "preset:delta-zero"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("b-function s;"));
}
