use std::process::{Command, Output};

fn polyirr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyirr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = polyirr(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(polyirr(&["mc-irr", "--measure", "box:1..", "--n", "3", "--samples", "2"]).status.code(), Some(2));
    assert_eq!(polyirr(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(polyirr(&["density", "--p", "2", "--n", "40", "--k", "3"]).status.code(), Some(3));
    assert_eq!(polyirr(&["random-subset", "--H", "3", "--N", "9", "--trials", "1"]).status.code(), Some(1));
    assert_eq!(polyirr(&["merge", "--rho", "(1,1)", "--y", "2"]).status.code(), Some(0));
}

#[test]
fn merge_worked_example() {
    let v = json(&["merge", "--rho", "(1,1,2,2,2,3)", "--sigma", "(1,1,2,3,4)", "--y", "2"]);
    assert_eq!(v["is_merging"], true);
    let v = json(&["merge", "--rho", "(1,1,2,2,2,3)", "--sigma", "(2,3,6)", "--y", "2"]);
    assert_eq!(v["is_merging"], false);
    let v = json(&["merge", "--rho", "(1,1,1)", "--y", "3"]);
    assert_eq!(v["mergings"].as_array().unwrap().len(), 3);
}

#[test]
fn galois_cert_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("a.txt");
    std::fs::write(&f, "# T^5 - T - 1\n-1, -1, 0, 0, 0, 1\n").unwrap();
    let v = json(&["galois-cert", "--poly", f.to_str().unwrap(), "--budget", "200"]);
    assert_eq!(v["conclusion"], "certified_an_or_sn");
    let e = &v["evidence"][0];
    for k in ["prime", "type", "squarefree", "conclusion_so_far"] {
        assert!(e.get(k).is_some(), "missing {k}");
    }
}

#[test]
fn reports_do_not_depend_on_threads() {
    let run = |t: &str| {
        let out = polyirr(&[
            "mc-irr", "--measure", "box:1..35", "--n", "12", "--samples", "400", "--seed", "7", "--threads", t,
        ]);
        assert!(out.status.success());
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("8"));
    let v: serde_json::Value = serde_json::from_slice(&one).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(v.get("rivin_bound").unwrap().is_f64());
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("alpha.csv");
    let o = polyirr(&[
        "certify-alpha", "--measure", "delta:3", "--modulus", "6", "--format", "csv", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("field,value\n"));
    assert!(text.lines().any(|l| l == "certified,false"));
    let hi: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("alpha.1,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((hi - 6f64.sqrt()).abs() < 1e-12);
}

#[test]
fn suite_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.json");
    std::fs::write(
        &cfg,
        r#"{"entries": [
            {"name": "small", "kind": "mc_irreducibility", "measure": "box:1..9", "n": 4, "samples": 30, "seed": 2},
            {"name": "broken", "kind": "random_subset", "H": 2, "N": 99, "trials": 1, "seed": 0}
        ]}"#,
    )
    .unwrap();
    let outdir = dir.path().join("out");
    let o = polyirr(&["suite", "--config", cfg.to_str().unwrap(), "--out", outdir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(outdir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["entries"][0]["ok"], true);
    assert_eq!(m["entries"][1]["ok"], false);
    assert!(outdir.join("small.json").exists());
}

#[test]
fn other_subcommands_run() {
    let v = json(&["delta", "--measure", "box:0..1", "--primes", "2", "--n", "6", "--m", "2"]);
    assert_eq!(v["delta"], "0");
    let v = json(&["brun-check", "--p", "2", "--n", "8", "--m", "2"]);
    assert_eq!(v["ok"], true);
    let v = json(&["density", "--p", "2", "--n", "8", "--k", "3"]);
    assert!(v["exact"].is_string());
    let v = json(&["anatomy", "--p", "3", "--n", "10", "--m", "2", "--samples", "50"]);
    assert_eq!(v["samples"], 50);
    let v = json(&["certify-alpha", "--sweep", "35..60"]);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    let v = json(&["random-subset", "--H", "20", "--N", "41", "--trials", "2"]);
    assert_eq!(v["certified"]["total"], 2);
}
