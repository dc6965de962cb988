use std::process::{Command, Output};

fn matcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matcone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn leading_number(text: &str) -> f64 {
    text.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn gamma_rank_two() {
    let out = matcone(&["gamma", "--rank", "2", "--alpha", "1.5"]);
    assert!(out.status.success());
    let v = leading_number(&stdout(&out));
    assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn volume_of_sphere() {
    let out = matcone(&["volume", "--n", "3", "--m", "1", "--json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let v = json["value"].as_f64().unwrap();
    assert!((v - 4.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn ek_constant_matches_gamma_reciprocal() {
    let out = matcone(&[
        "ek", "--side", "left", "--rank", "2", "--alpha", "2", "--beta", "2", "--f", "const1",
        "--s", "random", "--seed", "7", "--samples", "200000", "--json",
    ]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let (value, stderr) = (json["value"].as_f64().unwrap(), json["stderr"].as_f64().unwrap());
    // Γ_2(4) = √π · Γ(4) · Γ(7/2)
    let exact = 1.0 / (std::f64::consts::PI.sqrt() * 6.0 * 3.323_350_970_447_842_6);
    assert!(stderr > 0.0);
    assert!((value - exact).abs() < 4.0 * stderr, "{value} ± {stderr} vs {exact}");
}

#[test]
fn gg_explicit_point_rank_one() {
    // I_+^1 1 at s = 0.5 is s
    let out = matcone(&["gg", "--rank", "1", "--alpha", "1", "--s", "0.5", "--f", "const1"]);
    assert!((leading_number(&stdout(&out)) - 0.5).abs() < 1e-12);
}

#[test]
fn radon_of_constant_is_constant() {
    let out = matcone(&[
        "radon", "--n", "6", "--m", "2", "--k", "4", "--rank", "2", "--f", "const1", "--samples", "1000",
    ]);
    assert!(out.status.success());
    assert_eq!(leading_number(&stdout(&out)), 1.0);
}

#[test]
fn domain_errors_exit_two_with_one_line() {
    for args in [
        vec!["gamma", "--rank", "2", "--alpha", "-1"],
        vec!["beta", "--rank", "2", "--alpha", "0.2", "--beta", "1"],
        vec!["gg", "--rank", "2", "--alpha", "2", "--side", "up"],
        vec!["gg", "--rank", "1", "--alpha", "1", "--side", "right", "--s", "1.5"],
        vec!["radon", "--n", "4", "--m", "3", "--k", "2", "--rank", "1"],
        vec!["gamma", "--rank", "two", "--alpha", "1"],
        vec!["verify", "--dims", "6,2,4"],
        vec!["verify", "--samples", "1"],
    ] {
        let out = matcone(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn verify_reproducible_reports_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let path = dir.path().join(name);
        let out = matcone(&[
            "verify", "--samples", "2000", "--seed", "42", "--filter", "special.", "--reproducible",
            "--workers", workers, "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        std::fs::read_to_string(path).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "4");
    assert_eq!(a, b);
    let report: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(report["header"]["timestamp"].is_null());
    assert!(report["rows"].as_array().unwrap().iter().all(|r| r["status"] == "pass"));
}

#[test]
fn verify_reads_config_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("suite.conf");
    let out_path = dir.path().join("report.json");
    std::fs::write(
        &config,
        format!(
            "seed = 9\nsamples = 500\nfilter = radon.theorem\ndims = 5,2,4,3\nout = {}\n",
            out_path.display()
        ),
    )
    .unwrap();
    let out = matcone(&["verify", "--config", config.to_str().unwrap(), "--seed", "11", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["header"]["seed"], 11);
    assert_eq!(report["header"]["samples"], 500);
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row["status"], "skip");
        assert!(row["note"].as_str().unwrap().contains("constraint"));
    }
    assert!(out_path.exists());
}

#[test]
fn verify_exits_one_on_failing_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    // a cap this small fails any stochastic comparison
    let out = matcone(&[
        "verify", "--samples", "2000", "--filter", "sampling.interval.mean", "--z-cap", "1e-9",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn low_sample_rows_carry_advisory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = matcone(&[
        "verify", "--samples", "100", "--filter", "fracint.ek.normalization.left", "--json",
        "--out", path.to_str().unwrap(),
    ]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let noted = report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["note"].as_str().is_some_and(|n| n.contains("insufficient samples")));
    assert!(noted, "{report}");
}
