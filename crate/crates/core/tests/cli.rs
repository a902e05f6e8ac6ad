use std::path::Path;
use std::process::{Command, Output};

fn kfactor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kfactor"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV with `#` header lines, split into fields.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let head = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (head, rows)
}

fn column(head: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = head.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn coarse_grid_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = |n: usize| {
        format!(
            r#"{{"command": "solve1d", "solve1d": {{"grid": {{"x_min": 0, "x_max": 1, "n": {n}}}, "potential": {{"preset": "box"}}, "levels": 3}}}}"#
        )
    };
    let coarse = kfactor(&["solve1d", "--config", &write(dir.path(), "a.json", &cfg(10))]);
    assert_eq!(coarse.status.code(), Some(0));
    assert!(stdout(&coarse).contains("# coarse=true"));
    let fine = kfactor(&["solve1d", "--config", &write(dir.path(), "b.json", &cfg(80))]);
    assert!(stdout(&fine).contains("# coarse=false"));
}

#[test]
fn harmonic_spacing_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "h.json",
        r#"{"solve1d": {"grid": {"x_min": -8, "x_max": 8, "n": 1500}, "potential": {"preset": "harmonic"}, "levels": 4}}"#,
    );
    let out = kfactor(&[
        "solve1d",
        "--config",
        &cfg,
        "--output",
        &dir.path().join("h.csv").to_string_lossy(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    let (head, rows) = csv_rows(&text);
    assert_eq!(head, ["k", "energy", "normalized_pencil_det", "stacked_residual"]);
    let e = column(&head, &rows, "energy");
    assert_eq!(e.len(), 4);
    for w in e.windows(2) {
        assert!((w[1] - w[0] - 1.0).abs() < 1e-3, "{e:?}");
    }
    assert!((e[0] - 0.5).abs() < 1e-3);
    for r in column(&head, &rows, "stacked_residual") {
        assert!(r < 1e-8);
    }
}

#[test]
fn table_potential_and_central_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let samples: Vec<String> = (0..60).map(|_| "0".into()).collect();
    let cfg = write(
        dir.path(),
        "t.json",
        &format!(
            r#"{{"solve1d": {{"grid": {{"x_min": 0, "x_max": 1, "n": 60}}, "potential": {{"preset": "table", "samples": [{}]}}, "scheme": "central", "levels": 2}}}}"#,
            samples.join(",")
        ),
    );
    let out = kfactor(&["solve1d", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("# scheme=central"));
    let (head, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    // no pencil determinant on the dense path
    assert_eq!(
        rows[0][head.iter().position(|h| h == "normalized_pencil_det").unwrap()],
        ""
    );
}

#[test]
fn solve1d_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(
        dir.path(),
        "u.json",
        r#"{"solve1d": {"grid": {"x_min": 0, "x_max": 1, "n": 20}, "potential": {"preset": "morse"}}}"#,
    );
    let short = write(
        dir.path(),
        "s.json",
        r#"{"solve1d": {"grid": {"x_min": 0, "x_max": 1, "n": 20}, "potential": {"preset": "table", "samples": [1, 2]}}}"#,
    );
    let wrong = write(dir.path(), "w.json", r#"{"command": "zeeman"}"#);
    for cfg in [&unknown, &short, &wrong] {
        let out = kfactor(&["solve1d", "--config", cfg]);
        assert_eq!(out.status.code(), Some(2), "{cfg}");
        assert!(!out.stderr.is_empty());
    }
    let missing = kfactor(&[
        "solve1d",
        "--config",
        &dir.path().join("nope.json").to_string_lossy(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn parse_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\n  \"seed\": 3,\n  \"trials\": ,\n}");
    let out = kfactor(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");
}

#[test]
fn zero_tolerances_listed_together() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "z.json",
        r#"{"tolerances": {"det_1d": 0, "schur_det": 0, "com_transform": 0}}"#,
    );
    let out = kfactor(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for name in ["det_1d", "schur_det", "com_transform"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn violation_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.json",
        r#"{"trials": 4, "tolerances": {"schur_factor": 1e-300}}"#,
    );
    let report = dir.path().join("r.json");
    let out = kfactor(&["verify", "--config", &cfg, "--output", &report.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], false);
    assert_eq!(v["metadata"]["trials"], 4);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["schur_factor"]);
}

#[test]
fn zeeman_presets() {
    let pos = kfactor(&["zeeman", "--preset", "positronium", "--n-max", "3"]);
    assert_eq!(pos.status.code(), Some(0));
    let (head, rows) = csv_rows(&stdout(&pos));
    assert_eq!(
        head,
        ["n", "l", "m", "branch", "energy", "shift", "omega_L", "m_L", "g_L"]
    );
    assert!(column(&head, &rows, "shift").iter().all(|&s| s == 0.0));
    assert!(rows.iter().all(|r| r[7] == "inf"));

    let h = kfactor(&["zeeman", "--preset", "hydrogen", "--field", "0.5"]);
    let (head, rows) = csv_rows(&stdout(&h));
    let omega = column(&head, &rows, "omega_L")[0];
    let expected = 0.5 / (2.0 * 137.035999) * (1.0 - 1.0 / 1836.15267);
    assert!((omega - expected).abs() < 1e-15);
    for r in &rows {
        let m: f64 = r[2].parse().unwrap();
        let off = if r[3] == "1" { 1.0 } else { -1.0 };
        let shift: f64 = r[5].parse().unwrap();
        assert_eq!(shift, omega * (m + off));
    }

    let zero = kfactor(&["zeeman", "--preset", "deuterium-like", "--field", "0"]);
    let (head, rows) = csv_rows(&stdout(&zero));
    assert!(column(&head, &rows, "shift").iter().all(|&s| s == 0.0));

    assert_eq!(kfactor(&["zeeman", "--preset", "tritium"]).status.code(), Some(2));
    assert_eq!(kfactor(&["zeeman"]).status.code(), Some(2));
}

#[test]
fn zeeman_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "z.json",
        r#"{"zeeman": {"m1": 1, "m2": 4, "b": 2, "n_max": 1}}"#,
    );
    let out = kfactor(&["zeeman", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("# preset=custom"));
    let (head, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    let m_l = column(&head, &rows, "m_L")[0];
    assert!((m_l - 4.0 / 3.0).abs() < 1e-14);
    let partial = write(dir.path(), "p.json", r#"{"zeeman": {"m1": 1}}"#);
    assert_eq!(kfactor(&["zeeman", "--config", &partial]).status.code(), Some(2));
}

#[test]
fn spin_report_json() {
    let out = kfactor(&["spin-report", "--particles", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["particles"], 2);
    assert_eq!(v["cross_site_exactly_zero"], true);
    assert_eq!(v["measured_structure_constant"], serde_json::json!([0.0, 2.0]));
    assert_eq!(v["entries"].as_array().unwrap().len(), 36);
    assert_eq!(
        kfactor(&["spin-report", "--particles", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn outputs_are_deterministic() {
    let a = kfactor(&["zeeman", "--preset", "hydrogen", "--n-max", "3"]);
    let b = kfactor(&["zeeman", "--preset", "hydrogen", "--n-max", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let a = kfactor(&["verify", "--trials", "3", "--seed", "11"]);
    let b = kfactor(&["verify", "--trials", "3", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("time"));
}
