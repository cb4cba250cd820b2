use std::process::{Command, Output};

use serde_json::Value;

fn fquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fquad")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_reports_normal_forms() {
    let o = fquad(&["classify", "H1+H1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "dim 4, nondegenerate, Arf 0, ≅ H0⊥H0");
    let o = fquad(&["classify", "x0"]);
    assert_eq!(stdout(&o).trim(), "dim 1, radical dim 1, degenerate");
    let o = fquad(&["classify", "H0+H1"]);
    assert!(stdout(&o).starts_with("dim 4, nondegenerate, Arf 1"));
}

#[test]
fn classify_json_and_parse_errors() {
    let o = fquad(&["classify", "--format", "json", "H0+H1", "0"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["arf"], 1);
    assert_eq!(v[1]["dim"], 0);
    let o = fquad(&["classify", "H0+Z"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 3"));
}

#[test]
fn tables_match_direct_evaluation() {
    let o = fquad(&["table", "iso:x1", "H0", "H1", "H0+H0", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().nth(1), Some("\"iso:x1\",1,3,6"));
    let o = fquad(&["table", "m:a=1", "H0", "-f", "L:a=1,n=2", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["dims"]["H0"], 1);
    assert_eq!(v[1]["dims"]["H0"], 0);
    let o = fquad(&["table", "nonsense", "H0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("L:a=<0|1>,n=<k>"));
}

#[test]
fn verify_exit_codes() {
    let o = fquad(&["verify", "bogus_check"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fquad(&["verify", "check_layers", "--alpha", "1", "--dmax", "1", "--roster", "H0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("d=0 ") && text.contains("layer=1-0=1"), "{text}");
    let o = fquad(&["verify", "check_mu_complex", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_all_writes_reports_deterministically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = fquad(&["verify", "all", "--roster", "default", "--out", dir.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", stdout(&o));
    }
    let mut count = 0;
    for entry in std::fs::read_dir(a.path()).unwrap() {
        let path = entry.unwrap().path();
        let other = b.path().join(path.file_name().unwrap());
        let (x, y) = (std::fs::read_to_string(&path).unwrap(), std::fs::read_to_string(other).unwrap());
        if path.extension().unwrap() == "json" {
            let mut x: Value = serde_json::from_str(&x).unwrap();
            let mut y: Value = serde_json::from_str(&y).unwrap();
            x.as_object_mut().unwrap().remove("runtime_ms");
            y.as_object_mut().unwrap().remove("runtime_ms");
            assert_eq!(x, y);
            count += 1;
        } else {
            assert_eq!(x, y);
        }
    }
    assert_eq!(count, 8);
}

#[test]
fn export_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = fquad(&["export", "check_s2_ses", "--roster", "H0,H1", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("check_s2_ses.csv")).unwrap();
    assert!(csv.starts_with("check,object,alpha,"));
    let json: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("check_s2_ses.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["roster"], serde_json::json!(["H0", "H1"]));
}
