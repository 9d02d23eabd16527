use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn ppc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppc")).args(args).output().expect("run ppc")
}

fn spec(name: &str) -> String {
    specs().join(name).display().to_string()
}

fn json(cmd: &str, file: &str) -> (i32, serde_json::Value, String) {
    let out = ppc(&[cmd, &spec(file), "--format", "json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), v, text)
}

#[test]
fn exit_codes() {
    assert_eq!(ppc(&["soliton", &spec("sl2.toml")]).status.code(), Some(0));
    assert_eq!(ppc(&["soliton", &spec("normal_unsteady_rejected.toml")]).status.code(), Some(1));
    assert_eq!(ppc(&["check", &spec("darboux_invalid.toml")]).status.code(), Some(2));
    assert_eq!(ppc(&["crossval", &spec("sl2.toml")]).status.code(), Some(2));
    assert_eq!(ppc(&["check", &spec("does_not_exist.toml")]).status.code(), Some(2));
    assert_eq!(ppc(&["bogus", &spec("sl2.toml")]).status.code(), Some(2));
}

#[test]
fn schema_error_names_missing_function() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "[structure]\nvariant = \"paracontact\"\n[functions]\na1 = \"1\"\na2 = \"1\"\na3 = \"1\"\na5 = \"0\"\n",
    )
    .unwrap();
    let out = ppc(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`a4`"));
}

#[test]
fn syntax_error_has_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "[structure]\nvariant = \"paracontact\"\n[functions]\na1 = \"1 +\"\na2 = \"1\"\na3 = \"1\"\na4 = \"0\"\na5 = \"0\"\n",
    )
    .unwrap();
    let out = ppc(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("functions.a1") && err.contains("byte"), "{err}");
}

#[test]
fn sl2_soliton_summary() {
    let (code, v, _) = json("soliton", "sl2.toml");
    assert_eq!(code, 0);
    let s = &v["summary"]["soliton"];
    assert_eq!(s["soliton"]["lambda"], -2.0);
    assert_eq!(s["soliton"]["scalar_curvature"], -6.0);
    assert_eq!(s["kappa_mu"]["kappa"], -1.0);
    assert_eq!(s["kappa_mu"]["mu"], -2.0);
    assert_eq!(s["segre"]["label"], "segre_degenerate_21");
}

#[test]
fn probe_verdicts() {
    let (c0, v0, _) = json("probe-homogeneity", "darboux_example_beta0.toml");
    let (c2, v2, _) = json("probe-homogeneity", "darboux_example_beta2.toml");
    assert_eq!((c0, c2), (0, 0));
    assert_eq!(v0["summary"]["probe-homogeneity"]["probe"]["homogeneous"], true);
    assert_eq!(v2["summary"]["probe-homogeneity"]["probe"]["homogeneous"], false);
}

#[test]
fn crossval_example() {
    let (code, v, _) = json("crossval", "darboux_example_beta2.toml");
    assert_eq!(code, 0);
    let r = &v["summary"]["crossval"];
    assert!((r["chart_scalar_curvature_min"].as_f64().unwrap() + 6.0).abs() <= 1e-8);
    assert!((r["chart_scalar_curvature_max"].as_f64().unwrap() + 6.0).abs() <= 1e-8);
}

#[test]
fn normal_specs() {
    let (code, v, _) = json("soliton", "normal_steady.toml");
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["soliton"]["soliton"]["verdict"], "steady");
    let (code, v, _) = json("soliton", "normal_einstein.toml");
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["soliton"]["soliton"]["verdict"], "trivial_unsteady");
    let (code, v, _) = json("soliton", "normal_unsteady_rejected.toml");
    assert_eq!(code, 1);
    let reasons = v["summary"]["soliton"]["soliton"]["reasons"].as_array().unwrap();
    assert!(reasons.iter().any(|r| r.as_str().unwrap().starts_with("lambda b1")));
}

#[test]
fn deterministic_and_round_trips() {
    for file in ["sl2.toml", "darboux_example_beta2.toml", "normal_steady.toml"] {
        let (_, v, a) = json("report", file);
        let (_, _, b) = json("report", file);
        assert_eq!(a, b, "{file}");
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(again, a, "{file}");
    }
}

#[test]
fn seed_and_points_flags() {
    let run = |extra: &[&str]| {
        let mut args = vec!["check", "--format", "json"];
        let f = spec("darboux_example_beta2.toml");
        args.push(&f);
        args.extend_from_slice(extra);
        let out = ppc(&args);
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()
    };
    let a = run(&["--seed", "11", "--points", "5"]);
    assert_eq!(a["sampling"]["seed"], 11);
    assert_eq!(a["sampling"]["evaluated"], 5);
    let b = run(&["--seed", "12", "--points", "5"]);
    assert_ne!(a["checks"], b["checks"]);
}

fn numbers(v: &serde_json::Value, out: &mut Vec<String>) {
    match v {
        serde_json::Value::Number(n) => out.push(n.to_string()),
        serde_json::Value::Array(a) => a.iter().for_each(|x| numbers(x, out)),
        serde_json::Value::Object(m) => m.values().for_each(|x| numbers(x, out)),
        _ => {}
    }
}

#[test]
fn text_and_json_carry_the_same_numbers() {
    for file in ["sl2.toml", "darboux_example_beta2.toml"] {
        let (_, v, _) = json("report", file);
        let text = String::from_utf8(ppc(&["report", &spec(file)]).stdout).unwrap();
        let mut nums = Vec::new();
        numbers(&v, &mut nums);
        for n in nums {
            assert!(text.contains(&n), "{file}: {n} missing from text report");
        }
    }
}

#[test]
fn skip_singular() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pole.toml");
    let text = std::fs::read_to_string(specs().join("normal_steady.toml"))
        .unwrap()
        .replace("exclude = [\"z + 3\"]", "fixed_points = [[0.0, 0.0, -3.0]]");
    std::fs::write(&path, text).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(ppc(&["check", p]).status.code(), Some(2));
    let out = ppc(&["check", p, "--skip-singular", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sampling"]["skipped"].as_array().unwrap().len(), 1);
}
