use std::process::{Command, Output};

fn pst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_gl3() {
    let o = pst(&["verify", "--family", "gl", "--q", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("certificate: valid"), "{s}");
    assert!(s.contains("spectrum: 46^1 0^24 -2^23"), "{s}");
    assert!(s.contains("complement of 24 disjoint copies of K2"), "{s}");
}

#[test]
fn verify_t_alternative() {
    let o = pst(&["verify", "--family", "gl", "--q", "3", "--variant", "t-alt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("valency 34"));
}

#[test]
fn verify_gu5_json() {
    let o = pst(&["verify", "--family", "gu", "--q", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "pst-report/1");
    assert_eq!(v["certificate"]["valid"], true);
    assert_eq!(v["certificate"]["a"], 2);
    assert!(!v["errata"].as_array().unwrap().is_empty());
}

#[test]
fn orbital_runs() {
    let o = pst(&["orbital", "--q", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("120 vertices, valency 73"), "{s}");
    assert!(s.contains("certificate: valid"), "{s}");
    let o = pst(&["orbital", "--q", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("certificate: valid"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(pst(&["orbital", "--q", "5"]).status.code(), Some(1));
    assert_eq!(
        pst(&["verify", "--family", "gl", "--q", "4"]).status.code(),
        Some(1)
    );
    assert_eq!(
        pst(&["verify", "--family", "xx", "--q", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(pst(&["export", "foo", "--q", "3"]).status.code(), Some(1));
    assert_eq!(pst(&["--nonsense"]).status.code(), Some(1));
    assert_eq!(pst(&["--help"]).status.code(), Some(0));
}

#[test]
fn export_edges() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = pst(&[
        "export",
        "gl",
        "--q",
        "3",
        "--format",
        "edges",
        "--out-dir",
        d,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let edges = std::fs::read_to_string(dir.path().join("graph.edges")).unwrap();
    assert_eq!(edges.lines().count(), 48 * 46 / 2);
    let o = pst(&[
        "export",
        "orbital",
        "--q",
        "3",
        "--format",
        "edges",
        "--out-dir",
        d,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let edges = std::fs::read_to_string(dir.path().join("graph.edges")).unwrap();
    assert_eq!(edges.lines().count(), 4380);
}

#[test]
fn export_sl_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = pst(&[
        "export",
        "sl",
        "--q",
        "5",
        "--format",
        "csv",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "family,q,char-kind,char-params,degree,theta,multiplicity,phi-sign"
    );
    assert_eq!(lines.count(), 5 + 4);
}

#[test]
fn out_dir_artifacts_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = pst(&[
            "verify",
            "--family",
            "sl",
            "--q",
            "3",
            "--out-dir",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["report.json", "spectrum.csv", "graph.edges"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let json = std::fs::read_to_string(a.path().join("report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(json.find("\"certificate\"").unwrap() < json.find("\"schema\"").unwrap());
}
