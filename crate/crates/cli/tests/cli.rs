use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn wgss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let o = wgss(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn config(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    p.to_str().unwrap().to_owned()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("wgss-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn exit_codes() {
    assert_eq!(wgss(&["--help"]).status.code(), Some(0));
    assert_eq!(wgss(&["coeffs", "--bogus"]).status.code(), Some(1));
    assert_eq!(wgss(&["coeffs", "--beta", "0.5"]).status.code(), Some(1));
    assert_eq!(
        wgss(&[
            "coeffs",
            "--beta",
            "1.5",
            "--alpha",
            "1",
            "--kappa",
            "0",
            "--eps-critical"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        wgss(&[
            "orbits",
            "--config",
            &config("supercritical.json"),
            "--tol",
            "-1"
        ])
        .status
        .code(),
        Some(1)
    );

    // a Jacobian without an imaginary pair is a mathematical failure
    let d = scratch("exit");
    let f = d.join("real.json");
    std::fs::write(&f, r#"{"jacobian": [[-1, 0], [0, -2]]}"#).unwrap();
    let o = wgss(&["coeffs", "--config", f.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    let coeffs = [
        "coeffs",
        "--beta",
        "0.6",
        "--alpha",
        "1.1",
        "--kappa",
        "0.3",
        "--eps-critical",
        "--format",
        "json",
        "--all-h",
    ];
    assert_eq!(ok(&coeffs), ok(&coeffs));
    let scan = [
        "locus",
        "scan",
        "--beta-range",
        "0.2",
        "0.8",
        "3",
        "--alpha-range",
        "0.5",
        "2",
        "2",
        "--kappa-range",
        "0",
        "0.5",
        "2",
    ];
    assert_eq!(ok(&scan), ok(&scan));
}

#[test]
fn linear_field_has_vanishing_coefficients() {
    let d = scratch("linear");
    let f = d.join("linear.json");
    std::fs::write(&f, r#"{"jacobian": [[0, -2, 0], [2, 0, 0], [0, 0, -1]]}"#).unwrap();
    let v = json(&[
        "coeffs",
        "--config",
        f.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!((v["omega0"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    for m in 1..=4 {
        assert_eq!(v[format!("l{m}")].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn first_coefficient_sign_matches_closed_form() {
    for (b, a, k) in [
        (0.5, 1.0, 0.0),
        (0.9, 0.5, 0.0),
        (0.3, 2.0, 0.6),
        (0.85, 0.8, 0.4),
    ] {
        let (bs, as_, ks) = (b.to_string(), a.to_string(), k.to_string());
        let v = json(&[
            "coeffs",
            "--beta",
            &bs,
            "--alpha",
            &as_,
            "--kappa",
            &ks,
            "--eps-critical",
            "--order",
            "1",
            "--format",
            "json",
        ]);
        let l1 = v["l1"].as_f64().unwrap();
        assert_eq!(l1.signum(), wgss::g1(b, a, k).signum(), "({b}, {a}, {k})");
        assert!(v.get("l2").is_none_or(Value::is_null));
    }
}

#[test]
fn table_output_lists_coefficients() {
    let s = ok(&[
        "coeffs",
        "--beta",
        "0.5",
        "--alpha",
        "1",
        "--kappa",
        "0",
        "--eps-critical",
    ]);
    for key in [
        "beta", "epsilon", "omega0", "G21 =", "G54 =", "l1 =", "l4 =",
    ] {
        assert!(s.contains(key), "{key} missing in\n{s}");
    }
    // the supercritical config sits below the critical damping, off the Hopf surface
    assert_eq!(
        wgss(&["coeffs", "--config", &config("supercritical.json")])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn find_q_reaches_codim4_point() {
    let v = json(&["locus", "find-q", "--format", "json"]);
    assert_eq!(v["schema_version"], 1);
    let p = &v["point"];
    for (k, want) in [("beta", 0.93593), ("alpha", 1.02753), ("kappa", 0.90164)] {
        assert!(
            (p[k].as_f64().unwrap() - want).abs() < 1e-4,
            "{k} = {}",
            p[k]
        );
    }
    assert!(!v["newton_history"].as_array().unwrap().is_empty());
}

#[test]
fn scan_emits_one_row_per_grid_point() {
    let s = ok(&[
        "locus",
        "scan",
        "--beta-range",
        "0.3",
        "0.9",
        "2",
        "--alpha-range",
        "0.5",
        "1.5",
        "2",
        "--kappa-range",
        "0",
        "0.5",
        "2",
    ]);
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let head = r.headers().unwrap().clone();
    assert_eq!(&head[0], "beta");
    assert!(head.iter().any(|h| h == "region"));
    let rows: Vec<_> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    let d = scratch("scan");
    ok(&[
        "--out-dir",
        d.to_str().unwrap(),
        "locus",
        "scan",
        "--beta-range",
        "0.3",
        "0.9",
        "2",
        "--alpha-range",
        "1",
        "1",
        "1",
        "--kappa-range",
        "0",
        "0",
        "1",
    ]);
    assert!(d.join("l1_scan.csv").exists() && d.join("l1_scan.json").exists());
}

#[test]
fn curves_lie_on_l1_l2_zero() {
    let s = ok(&[
        "locus",
        "curves",
        "--curve",
        "c2",
        "--kappa-range",
        "0.85",
        "0.95",
    ]);
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let rows: Vec<_> = r.records().map(Result::unwrap).collect();
    assert!(rows.len() >= 2);
    let mut l3 = Vec::new();
    for row in &rows {
        assert_eq!(&row[0], "C2");
        let f = |i: usize| row[i].parse::<f64>().unwrap();
        assert!(f(5).abs() < 1e-8 && f(6).abs() < 1e-8, "{row:?}");
        l3.push(f(7));
    }
    // Q sits inside this kappa window
    assert!(
        l3.iter().any(|&x| x < 0.0) && l3.iter().any(|&x| x > 0.0),
        "{l3:?}"
    );
}

#[test]
fn stability_verdicts_agree() {
    let v = json(&[
        "stability",
        "--beta",
        "0.5",
        "--alpha",
        "1",
        "--kappa",
        "0",
        "--epsilon",
        "0.9",
        "--format",
        "json",
    ]);
    assert_eq!(v["stable_routh_hurwitz"], v["stable_eigenvalues"]);
    assert_eq!(v["stable_routh_hurwitz"], true);
}

#[test]
fn supercritical_census_finds_one_stable_cycle() {
    let v = json(&["orbits", "--config", &config("supercritical.json")]);
    assert_eq!(v["schema_version"], 1);
    let cycles = v["cycles"].as_array().unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0]["stability"], "stable");
    assert_eq!(v["equilibrium_stability"], "unstable");
}

#[test]
fn equilibrium_start_has_no_cycles() {
    let v = json(&[
        "orbits",
        "--config",
        &config("supercritical.json"),
        "--from-equilibrium",
    ]);
    assert!(v["cycles"].as_array().unwrap().is_empty());
}

#[test]
fn tongue_config_has_three_attractors() {
    let d = scratch("tongue");
    let o = wgss(&[
        "--out-dir",
        d.to_str().unwrap(),
        "orbits",
        "--config",
        &config("tongue.json"),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("census.json")).unwrap()).unwrap();
    assert_eq!(v["equilibrium_stability"], "stable");
    let stable = v["cycles"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["stability"] == "stable")
        .count();
    assert!(stable >= 2, "{stable} stable cycles");
    let csv0 = std::fs::read_to_string(d.join("cycle_0.csv")).unwrap();
    assert!(csv0.starts_with("t,x,y,z\n"));
}
