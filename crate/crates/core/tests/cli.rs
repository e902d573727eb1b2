use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use vw::gen::random_general_position;
use vw::input::format_sites;
use vw::record::parse_records;

fn vw(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vw")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tri.txt"), "# triangle\n0 0\n8 0\n0 6\n").unwrap();
    fs::write(dir.path().join("rect.txt"), "0 0\n4 0\n4 2\n0 2\n").unwrap();
    fs::write(dir.path().join("bad.txt"), "0 0\n1 one\n").unwrap();
    fs::write(dir.path().join("r12.txt"), format_sites(&random_general_position(12, 12))).unwrap();
    dir
}

#[test]
fn validate_exit_codes() {
    let d = setup();
    assert_eq!(code(&vw(d.path(), &["validate", "tri.txt"])), 0);
    let o = vw(d.path(), &["validate", "rect.txt"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("CocircularQuadruple"));
    assert_eq!(code(&vw(d.path(), &["validate", "bad.txt"])), 3);
    assert_eq!(code(&vw(d.path(), &["validate", "missing.txt"])), 1);
}

#[test]
fn triangle_run_writes_three_records() {
    let d = setup();
    let o = vw(d.path(), &["run", "tri.txt", "--mode", "nvd", "--workspace", "8"]);
    assert_eq!(code(&o), 0);
    let recs = parse_records(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(recs.len(), 3);
    let report = String::from_utf8(o.stderr).unwrap();
    assert!(report.contains("emitted=1:3") && !report.contains("wall_ns"));
    let o = vw(d.path(), &["run", "tri.txt", "--timing"]);
    assert!(String::from_utf8(o.stderr).unwrap().contains("wall_ns="));
}

#[test]
fn order_run_verifies() {
    let d = setup();
    let o = vw(d.path(), &["run", "r12.txt", "--mode", "order", "--max-k", "3", "--workspace", "36", "--enforce", "--out", "r.rec"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = vw(d.path(), &["verify", "r12.txt", "r.rec", "--max-k", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().filter(|l| l.contains(" ok ")).count(), 3);
}

#[test]
fn verify_reports_defects() {
    let d = setup();
    assert_eq!(code(&vw(d.path(), &["run", "r12.txt", "--out", "r.rec"])), 0);
    let text = fs::read_to_string(d.path().join("r.rec")).unwrap();
    let dropped: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    fs::write(d.path().join("short.rec"), dropped).unwrap();
    let o = vw(d.path(), &["verify", "r12.txt", "short.rec"]);
    assert_eq!(code(&o), 6);
    assert!(String::from_utf8(o.stdout).unwrap().contains("missing=1"));
    assert_eq!(code(&vw(d.path(), &["verify", "r12.txt", "r.rec", "--max-k", "2"])), 6);
}

#[test]
fn config_and_model_violations() {
    let d = setup();
    assert_eq!(code(&vw(d.path(), &["run", "r12.txt", "--mode", "order", "--max-k", "10", "--workspace", "9"])), 5);
    assert_eq!(code(&vw(d.path(), &["run", "r12.txt", "--mode", "order"])), 5);
    let o = Command::new(env!("CARGO_BIN_EXE_vw"))
        .args(["run", "r12.txt", "--workspace", "2", "--enforce"])
        .env("VW_BUDGET_CONST", "1")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn svg_is_deterministic() {
    let d = setup();
    assert_eq!(code(&vw(d.path(), &["run", "tri.txt", "--out", "tri.rec"])), 0);
    for out in ["a.svg", "b.svg"] {
        assert_eq!(code(&vw(d.path(), &["svg", "tri.rec", "--out", out, "--viewport", "-2,-2,10,10"])), 0);
    }
    let a = fs::read_to_string(d.path().join("a.svg")).unwrap();
    assert_eq!(a, fs::read_to_string(d.path().join("b.svg")).unwrap());
    assert_eq!(a.matches("<line").count(), 3);
    fs::write(d.path().join("empty.rec"), "").unwrap();
    assert_eq!(code(&vw(d.path(), &["svg", "empty.rec", "--out", "e.svg"])), 0);
    assert!(fs::read_to_string(d.path().join("e.svg")).unwrap().ends_with("</svg>\n"));
}

#[test]
fn bench_repeats_agree() {
    let d = setup();
    let o = vw(d.path(), &["bench", "--random", "50", "--seed", "3", "--s-list", "0,4", "--repeats", "3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(2).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for group in rows.chunks(3) {
        assert!(group.iter().all(|r| r[..5] == group[0][..5]));
    }
}

#[test]
fn usage_errors_are_config_errors() {
    let d = setup();
    assert_eq!(code(&vw(d.path(), &["run", "tri.txt", "--mode", "nope"])), 5);
    assert_eq!(code(&vw(d.path(), &["--help"])), 0);
}
