use std::process::{Command, Output};

use serde_json::Value;

fn crflat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crflat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn exit_codes() {
    assert_eq!(crflat(&["check", "--family", "thm54_i", "--param", "D=1"]).status.code(), Some(0));
    assert_eq!(crflat(&["check", "--form", "tube", "--expr", "(t1+t2)^2"]).status.code(), Some(1));
    assert_eq!(crflat(&["check", "--family", "thm54_ii", "--param", "D=2"]).status.code(), Some(2));
    assert_eq!(crflat(&["check", "--form", "tube", "--expr", "t1^"]).status.code(), Some(2));
    assert_eq!(crflat(&["check", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        crflat(&["check", "--family", "perturbed_i", "--param", "D=1"]).status.code(),
        Some(0),
        "expected-nonflat control meets its expectation"
    );
    assert_eq!(
        crflat(&["check", "--family", "perturbed_i", "--expect", "flat"]).status.code(),
        Some(1)
    );
}

#[test]
fn malformed_expression_reports_position() {
    let out = crflat(&["check", "--form", "tube", "--expr", "t1 + * t2"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error"), "{err}");
    assert!(err.chars().any(|c| c.is_ascii_digit()), "no position in {err}");
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = ["check", "--family", "thm54_iii", "--param", "D=0.7853981633974483"];
    let a = crflat(&args);
    let b = crflat(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_schema_keys() {
    let v = json(&crflat(&["check", "--family", "fk"]));
    for k in ["config", "points", "summary"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    let p = &v["points"][0];
    for k in ["index", "point", "S", "S1", "S1bar", "J", "W", "residuals", "predicates", "flags", "label"] {
        assert!(p.get(k).is_some(), "missing point key {k}");
    }
    assert!(p["S"].is_array(), "complex numbers are [re, im]");
}

#[test]
fn guard_skips_are_reported() {
    // The grid straddles t2 = -D, so the middle row hits the guard.
    let v = json(&crflat(&[
        "check", "--family", "thm54_i", "--param", "D=0.05", "--grid-center", "0,0",
        "--grid-halfwidth", "0.05",
    ]));
    let skipped: Vec<&Value> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["label"] == "out_of_domain")
        .collect();
    assert_eq!(skipped.len(), 3);
    assert!(skipped.iter().all(|p| p["reason"].as_str().unwrap().starts_with("guard")));
    assert_eq!(v["summary"]["labels"]["out_of_domain"], 3);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    for args in [
        vec!["check", "--family", "thm54_ii", "--param", "D=0.5"],
        vec!["check", "--family", "perturbed_i"],
    ] {
        let j = json(&crflat(&args));
        let mut csv_args = vec!["--format", "csv"];
        csv_args.extend(&args);
        let out = crflat(&csv_args);
        let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
        let header = rdr.headers().unwrap().clone();
        let col = |name: &str| header.iter().position(|h| h == name).unwrap();
        let points = j["points"].as_array().unwrap();
        let mut n = 0;
        for (row, p) in rdr.records().zip(points) {
            let row = row.unwrap();
            let cell = |name: &str| row[col(name)].parse::<f64>().unwrap();
            let re = |v: &Value| v.as_array().map_or_else(|| v.as_f64().unwrap(), |a| a[0].as_f64().unwrap());
            assert_eq!(cell("S_re"), re(&p["S"]));
            assert_eq!(cell("J_scaled"), p["J"]["scaled"].as_f64().unwrap());
            assert_eq!(cell("W_re"), re(&p["W"]["value"]));
            assert_eq!(cell("ma_scaled"), p["residuals"]["ma"]["scaled"].as_f64().unwrap());
            assert_eq!(&row[col("label")], p["label"].as_str().unwrap());
            n += 1;
        }
        assert_eq!(n, points.len());
    }
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("crflat-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("families.json");
    let out = crflat(&["families", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|f| f["name"].as_str().unwrap()).collect();
    for n in ["thm54_i", "thm54_ii", "thm54_iii", "fk", "lightcone_tube"] {
        assert!(names.contains(&n), "{n} missing from {names:?}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn param_and_ode_subcommands() {
    let out = crflat(&["param", "--p", "v^2/2", "--q", "v", "--grid-w", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["summary"]["max_scaled_ma"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["firstcur"]["ratio_at_zero"], 1.0);

    let out = crflat(&["ode", "--ode-family", "case2", "--params", "C=0.5,D=0.3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["liouville"].as_array().unwrap().len(), 8);
}
