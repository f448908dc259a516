use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pairtransfer"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn temp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pairtransfer-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn catalog_lists_and_prints() {
    let o = run(&["catalog"]);
    assert_eq!(code(&o), 0);
    let names = String::from_utf8(o.stdout).unwrap();
    assert!(names.lines().any(|l| l == "sl2-borel"));
    let o = run(&["catalog", "solvable"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["dim_g"], 2);
    assert_eq!(code(&run(&["catalog", "missing"])), 2);
}

#[test]
fn stasheff_defects_are_zero() {
    let o = run(&["stasheff", "catalog:solvable", "--max-arity", "3"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["pass"], true);
    for d in r["stasheff"].as_array().unwrap() {
        assert_eq!(d["max_defect"], "0/1");
    }
}

#[test]
fn exit_codes() {
    let jacobi = temp(
        "jacobi.json",
        r#"{"dim_g": 3, "dim_h": 0, "brackets": [
            {"i": 0, "j": 1, "k": 0, "coeff": "1"}, {"i": 1, "j": 0, "k": 0, "coeff": "-1"},
            {"i": 1, "j": 2, "k": 1, "coeff": "1"}, {"i": 2, "j": 1, "k": 1, "coeff": "-1"},
            {"i": 0, "j": 2, "k": 2, "coeff": "1"}, {"i": 2, "j": 0, "k": 2, "coeff": "-1"}]}"#,
    );
    let o = run(&["validate", jacobi.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    let failed: Vec<_> = r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert!(!failed.is_empty() && failed.iter().all(|c| c["witness"].is_string()));
    assert_eq!(code(&run(&["transfer", jacobi.to_str().unwrap()])), 2);

    let schema = temp("schema.json", r#"{"dim_g": 1, "dim_h": 2}"#);
    assert_eq!(code(&run(&["validate", schema.to_str().unwrap()])), 2);
    let garbled = temp("garbled.toml", "dim_g = [");
    let o = run(&["validate", garbled.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["error"]["kind"], "parse");
    assert_eq!(code(&run(&["validate", "/nonexistent/pair.json"])), 2);

    let o = run(&["transfer", "catalog:solvable", "--truncation", "40"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["error"]["kind"], "truncation-overflow");

    assert_eq!(code(&run(&["contraction", "catalog:heisenberg-x"])), 0);
}

#[test]
fn choice_files_and_compare() {
    let doc = temp(
        "heis.toml",
        "dim_g = 3\ndim_h = 1\n\n[[brackets]]\ni = 0\nj = 1\nk = 2\ncoeff = \"1\"\n\n[[brackets]]\ni = 1\nj = 0\nk = 2\ncoeff = \"-1\"\n\n[compare_with]\nsplitting_matrix = [[\"2\"], [\"-1/3\"]]\n",
    );
    let split = temp("split.json", r#"[["1/2"], ["1"]]"#);
    let aux = temp("aux.json", r#"[{"x": 2, "y": 2, "z": 0, "coeff": "1"}]"#);
    let o = run(&[
        "compare",
        doc.to_str().unwrap(),
        "--splitting",
        split.to_str().unwrap(),
        "--aux-connection",
        aux.to_str().unwrap(),
        "--max-arity",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = json(&o);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));

    let bad = temp("split-bad.json", r#"[["1", "2"]]"#);
    assert_eq!(code(&run(&["compare", doc.to_str().unwrap(), "--splitting", bad.to_str().unwrap()])), 2);
}

#[test]
fn text_output() {
    let o = run(&["cohomology", "catalog:solvable", "--output", "text"]);
    assert_eq!(code(&o), 0);
    let t = String::from_utf8(o.stdout).unwrap();
    assert!(t.contains("PASS cohomology product is associative"));
    assert!(t.ends_with("result: pass\n"));
}

#[test]
fn reports_are_byte_identical() {
    for cmd in ["transfer", "stasheff", "cohomology", "compare"] {
        let outs: Vec<Vec<u8>> = ["1", "3", "0", "1"]
            .iter()
            .map(|p| run(&[cmd, "catalog:heisenberg-center", "--parallel", p, "--max-arity", "3"]).stdout)
            .collect();
        assert!(outs.windows(2).all(|w| w[0] == w[1]), "{cmd}");
    }
}
