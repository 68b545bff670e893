use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polya-mst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = args.to_vec();
    a.extend(["--out", "json"]);
    serde_json::from_str(&stdout(&a)).unwrap()
}

#[test]
fn type_listing_counts() {
    for (m, n) in [("2", 5), ("3", 19), ("4", 69)] {
        let out = stdout(&["types", "--m", m, "--out", "csv"]);
        assert_eq!(out.lines().count(), n + 1, "m={m}");
        assert_eq!(json(&["types", "--m", m])["count"], n);
    }
    let pretty = stdout(&["types", "--m", "2"]);
    assert!(pretty.lines().nth(1).unwrap().contains("(1,1)"));
}

#[test]
fn analyze_published_laws() {
    let v = json(&[
        "analyze",
        "--m",
        "3",
        "--model",
        "protected",
        "--functional",
        "protected",
    ]);
    assert_eq!(v["functionals"][0]["mean"], "57/700");
    assert_eq!(
        v["functionals"][0]["variance"],
        "1692302314867/43692253605000"
    );
    assert_eq!(v["regime"], "normal");

    let csv = stdout(&[
        "analyze",
        "--m",
        "3",
        "--model",
        "leaves",
        "--functional",
        "leaves",
        "--out",
        "csv",
    ]);
    assert_eq!(
        csv,
        "functional,mean,variance,regime\nleaves,3/10,89/2100,normal\n"
    );

    let v = json(&[
        "analyze",
        "--m",
        "2",
        "--model",
        "one-protected",
        "--method",
        "dual-basis",
    ]);
    assert_eq!(v["sigma"][0], serde_json::json!(["8/45", "-4/45", "4/45"]));

    let v = json(&[
        "analyze",
        "--m",
        "2",
        "--precision",
        "float",
        "--functional",
        "two_protected",
    ]);
    assert_eq!(v["functionals"][0]["mean"], 11.0 / 30.0);
}

#[test]
fn analyze_not_normal_still_reports() {
    let v = json(&["analyze", "--m", "27", "--model", "nodes"]);
    assert_eq!(v["regime"], "not-normal");
    assert!(v["sigma"].is_null());
    assert!(v["warning"].as_str().unwrap().contains("not-normal"));
    assert_eq!(v["mu"].as_array().unwrap().len(), 26);
    let pretty = stdout(&["analyze", "--m", "27", "--model", "nodes"]);
    assert!(pretty.starts_with("*** NOT NORMAL ***"));
}

#[test]
fn spectral_reports() {
    let v = json(&["spectral", "--m", "26", "--model", "nodes"]);
    assert_eq!(v["condition"]["holds"], true);
    assert_eq!(
        json(&["spectral", "--m", "27", "--model", "nodes"])["condition"]["holds"],
        false
    );

    let v = json(&["spectral", "--m", "4"]);
    assert_eq!(v["non_perron_below_half"], true);
    assert_eq!(v["root_containment"]["identity_holds"], true);

    let v = json(&["spectral", "--m", "3"]);
    let exact: Vec<&str> = v["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["exact"].as_str().unwrap())
        .collect();
    assert_eq!(
        exact,
        [
            "1", "0", "-2", "-3", "-3", "-4", "-4", "-4", "-4", "-5", "-5", "-5", "-6", "-6", "-6",
            "-7", "-7", "-8", "-9"
        ]
    );
}

#[test]
fn simulate_appends_theory() {
    let args = [
        "simulate", "--m", "2", "--n", "3000", "--trials", "100", "--stat", "leaves", "--out",
        "csv",
    ];
    let out = stdout(&args);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "statistic,m,n,trials,mean,variance,std_error,seed,mu,sigma2,z_mean,variance_ratio"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[8], "1/3");
    assert_eq!(row[9], "2/45");
    let z: f64 = row[10].parse().unwrap();
    assert!(z.abs() < 4.0, "z = {z}");
    let mean: f64 = row[4].parse().unwrap();
    assert!((mean / 3000.0 - 1.0 / 3.0).abs() < 0.01);
    assert_eq!(out, stdout(&args));
}

#[test]
fn every_command_is_byte_deterministic() {
    let cmds: [&[&str]; 6] = [
        &["types", "--m", "3", "--out", "json"],
        &[
            "analyze",
            "--m",
            "3",
            "--model",
            "one-protected",
            "--out",
            "json",
        ],
        &[
            "simulate", "--m", "3", "--n", "500", "--trials", "20", "--mode", "urn", "--out",
            "json", "--seed", "9",
        ],
        &["spectral", "--m", "3"],
        &["oracle", "--m", "2", "--n", "6", "--out", "csv"],
        &["verify", "--out", "csv"],
    ];
    for c in cmds {
        assert_eq!(stdout(c), stdout(c), "{c:?}");
    }
}

#[test]
fn oracle_small_laws() {
    let v = json(&["oracle", "--m", "2", "--n", "3"]);
    assert_eq!(v["laws"][3]["mean"], "2/3");
    assert_eq!(v["laws"][3]["pmf"]["1"], "2/3");
}

#[test]
fn verify_passes() {
    let v = json(&["verify"]);
    assert_eq!(v["passed"], true);
    assert!(v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["status"] == "pass"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["types", "--m", "1"]), 2);
    assert_eq!(code(&["types"]), 2);
    assert_eq!(code(&["analyze", "--m", "3", "--functional", "height"]), 2);
    assert_eq!(code(&["types", "--m", "11"]), 3);
    assert_eq!(code(&["spectral", "--m", "9"]), 3);
    assert_eq!(code(&["analyze", "--m", "4"]), 3);
    assert_eq!(code(&["oracle", "--m", "2", "--n", "12"]), 3);
    assert_eq!(
        code(&["simulate", "--m", "2", "--n", "1000000000", "--trials", "1"]),
        3
    );
    assert_eq!(code(&["bogus"]), 2);
    assert_eq!(code(&["analyze", "--m", "7", "--precision", "float"]), 3);
    assert_eq!(code(&["types", "--m", "10", "--out", "csv"]), 0);

    let o = run(&["analyze", "--m", "4"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--precision float"));
}
