//! The command-line contract: exit codes, reports and written documents.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn lts(args: &[&str]) -> lts_cli::Outcome {
    let mut full = vec!["lts"];
    full.extend_from_slice(args);
    lts_cli::run(full)
}

fn lts_json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = lts(&full);
    (out.code, serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout)))
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_lts");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["verify", &data("meson2.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("result: valid"));
    let usage = status(&["cohomology", &data("meson2.json"), "--degree", "2"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("odd degrees only"));
    let missing = status(&["verify", "/nonexistent/system.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let cap = status(&["cohomology", &data("meson2.json"), "--degree", "5", "--max-degree", "5"]);
    assert_eq!(cap.status.code(), Some(3));
    let env_cap = Command::new(bin)
        .args(["cohomology", &data("meson2.json"), "--degree", "3"])
        .env("LTS_MAX_DEGREE", "3")
        .output()
        .unwrap();
    assert_eq!(env_cap.status.code(), Some(3));
    assert_eq!(status(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(status(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_accepts_bundled_systems_and_actions() {
    for name in [
        "meson1.json", "meson2.json", "meson3.json", "meson4.json", "matrix2.json", "skew3.json", "sym2.json",
        "rect22.json", "sl2.json", "function-meson2-3.json", "abelian2.json",
    ] {
        assert_eq!(lts(&["verify", &data(name)]).code, 0, "{name}");
    }
    for (system, action) in [
        ("meson2.json", "meson2-swap.json"),
        ("skew3.json", "skew3-sign.json"),
        ("rect22.json", "rect22-transpose.json"),
    ] {
        let (code, report) = lts_json(&["verify", &data(system), "--action", &data(action)]);
        assert_eq!(code, 0, "{system}");
        assert_eq!(report["action"]["order"], 2);
    }
}

#[test]
fn corrupted_bracket_reports_a_cyclic_witness() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("meson2.json")).unwrap();
    let bad = text.replace("\"bracket\": [\n", "\"bracket\": [\n    [0,0,1,{\"0\":\"1\"}],\n");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, bad).unwrap();
    let p = path.to_string_lossy();
    let out = lts(&["verify", &p]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("axiom LT2 fails at (g1,g1,g2)"), "{}", out.stdout);
    let (code, report) = lts_json(&["verify", &p]);
    assert_eq!(code, 1);
    let lt2 = report["violations"].as_array().unwrap().iter().find(|v| v["axiom"] == "LT2").unwrap();
    assert_eq!(lt2["witness"], serde_json::json!([0, 0, 1]));
    assert_eq!(lt2["residual"], serde_json::json!({"0": "1"}));
}

#[test]
fn action_that_breaks_the_bracket_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad-action.json");
    let text = std::fs::read_to_string(data("meson2-swap.json")).unwrap().replace("[[\"0\",\"1\"],[\"1\",\"0\"]]", "[[\"0\",\"1\"],[\"-1\",\"0\"]]");
    std::fs::write(&path, text).unwrap();
    let out = lts(&["verify", &data("meson2.json"), "--action", &path.to_string_lossy()]);
    assert_eq!(out.code, 1, "{}", out.stdout);
    assert!(out.stdout.contains("invalid"));
}

#[test]
fn cohomology_dimensions() {
    let m2 = data("meson2.json");
    let swap = data("meson2-swap.json");
    let cases: Vec<(Vec<&str>, [u64; 4])> = vec![
        (vec!["--degree", "1"], [4, 1, 0, 1]),
        (vec!["--degree", "3"], [4, 3, 3, 0]),
        (vec!["--degree", "1", "--equivariant", &swap], [2, 0, 0, 0]),
        (vec!["--degree", "3", "--equivariant", &swap], [2, 2, 2, 0]),
        (vec!["--degree", "5", "--equivariant", &swap], [8, 2, 0, 2]),
    ];
    for (flags, [c, z, b, h]) in cases {
        let mut args = vec!["cohomology", m2.as_str()];
        args.extend(flags.iter().copied());
        let (code, r) = lts_json(&args);
        assert_eq!(code, 0);
        assert_eq!([&r["dimC"], &r["dimZ"], &r["dimB"], &r["dimH"]], [c, z, b, h].map(Value::from).each_ref(), "{flags:?}");
    }
    let text = lts(&["cohomology", &m2, "--degree", "3"]).stdout;
    assert!(text.contains("dim C^3 = 4"), "{text}");
}

#[test]
fn representatives_are_cocycles_outside_the_coboundaries() {
    let (code, r) = lts_json(&["cohomology", &data("meson2.json"), "--degree", "5", "--representatives"]);
    assert_eq!(code, 0);
    assert_eq!(r["representatives"].as_array().unwrap().len(), 3);
}

#[test]
fn prime_fields_are_selectable() {
    let (code, r) = lts_json(&["--field", "gf:3", "cohomology", &data("meson2.json"), "--degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["field"], "gf:3");
    assert_eq!(lts(&["--field", "gf:4", "verify", &data("meson2.json")]).code, 2);
    assert_eq!(lts(&["--field", "reals", "verify", &data("meson2.json")]).code, 2);
    // invariants are computed as fixed points, so characteristic 2 still works
    // even though it divides the order of the swap group
    let (code, r) = lts_json(&["--field", "gf:2", "cohomology", &data("meson2.json"), "--degree", "3", "--equivariant", &data("meson2-swap.json")]);
    assert_eq!(code, 0);
    assert_eq!((&r["dimC"], &r["dimB"], &r["dimH"]), (&Value::from(2), &Value::from(0), &Value::from(2)));
}

#[test]
fn example_deformation_through_the_commands() {
    let ex = data("meson2-example-deformation.json");
    let (code, r) = lts_json(&["deform-check", &ex, "--order", "2"]);
    assert_eq!((code, &r["passed"]), (0, &Value::Bool(true)));
    let (code, r) = lts_json(&["deform-check", &ex, "--order", "4"]);
    assert_eq!((code, &r["passed"]), (0, &Value::Bool(true)));
    assert_eq!(r["residuals"].as_array().unwrap().len(), 5);
    let (code, r) = lts_json(&["deform-obstruct", &ex]);
    assert_eq!(code, 0);
    assert_eq!(r["obstructionOrder"], 3);
    assert_eq!(r["obstructionZero"], true);
    assert_eq!(r["extendable"], true);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("extended.json");
    let o = out.to_string_lossy().into_owned();
    assert_eq!(lts(&["deform-extend", &ex, "--out", &o]).code, 0);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written["order"], 3);
    assert_eq!(written["terms"].as_array().unwrap().len(), 1, "μ_3 = 0 is omitted");
    let (code, r) = lts_json(&["deform-check", &o]);
    assert_eq!((code, &r["order"]), (0, &Value::from(3)));

    let triv = data("meson2-trivial-deformation.json");
    let iso = dir.path().join("iso.json");
    let (code, r) = lts_json(&["deform-equiv", &triv, &ex, "--out", &iso.to_string_lossy()]);
    assert_eq!(code, 0);
    assert_eq!(r["equivalent"], true);
    assert_eq!(r["isomorphism"], serde_json::json!([{ "order": 2, "matrix": [["0", "-1/2"], ["-1/2", "0"]] }]));
    let iso_doc: Value = serde_json::from_str(&std::fs::read_to_string(&iso).unwrap()).unwrap();
    assert_eq!(iso_doc["schema"], "lts-isomorphism/1");

    let (code, r) = lts_json(&["deform-trivialize", &ex]);
    assert_eq!((code, &r["trivial"]), (0, &Value::Bool(true)));
    let (code, r) = lts_json(&["rigidity", &data("meson2.json"), "--equivariant", &data("meson2-swap.json")]);
    assert_eq!((code, &r["rigid"], &r["dimH3"]), (0, &Value::Bool(true), &Value::from(0)));
}

#[test]
fn obstructed_deformation_is_not_extendable() {
    let ob = data("abelian2-obstructed-deformation.json");
    let (code, r) = lts_json(&["deform-obstruct", &ob]);
    assert_eq!(code, 0);
    assert_eq!(r["obstructionZero"], false);
    assert_eq!(r["cocycle"], true);
    assert_eq!(r["extendable"], false);
    let out = lts(&["deform-extend", &ob]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("not extendable"));
    // the abelian plane is not rigid
    let (code, r) = lts_json(&["rigidity", &data("abelian2.json")]);
    assert_eq!((code, &r["rigid"]), (0, &Value::Bool(false)));
}

#[test]
fn inequivalent_deformations_report_the_class() {
    let dir = tempfile::tempdir().unwrap();
    let triv = dir.path().join("triv.json");
    std::fs::write(
        &triv,
        format!(
            "{{\n  \"schema\": \"lts-deformation/1\",\n  \"system\": {:?},\n  \"order\": 1,\n  \"terms\": []\n}}\n",
            data("abelian2.json")
        ),
    )
    .unwrap();
    let (code, r) = lts_json(&["deform-equiv", &triv.to_string_lossy(), &data("abelian2-obstructed-deformation.json")]);
    assert_eq!(code, 1);
    assert_eq!(r["equivalent"], false);
    assert_eq!(r["obstructedOrder"], 1);
    assert_eq!(r["plainSolvable"], false);
    let (code, _) = lts_json(&["deform-trivialize", &data("abelian2-obstructed-deformation.json")]);
    assert_eq!(code, 1);
}

#[test]
fn build_writes_documents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m3.json");
    assert_eq!(lts(&["build", "meson", "3", "--out", &out.to_string_lossy()]).code, 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), std::fs::read_to_string(data("meson3.json")).unwrap());
    assert_eq!(lts(&["build", "meson", "0"]).code, 2);
    let gf = lts(&["--field", "gf:5", "build", "sign-action", "2"]);
    assert!(gf.stdout.contains("\"4\""), "{}", gf.stdout);
}
