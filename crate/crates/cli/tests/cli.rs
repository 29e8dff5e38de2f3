use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_digiangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const P: [&str; 4] = ["--slope1", "2/1", "--slope2", "-3/1"];
const Q: [&str; 4] = ["--slope1", "3/-1", "--slope2", "-1/2"];

fn with<'a>(slopes: &[&'a str], rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![rest[0]];
    v.extend_from_slice(slopes);
    v.extend_from_slice(&rest[1..]);
    v
}

#[test]
fn classify_center_corner() {
    let o = run(&with(&P, &["classify", "--corner", "1/2,1/2"]));
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("class 0 of 5"));
}

#[test]
fn classify_json() {
    let o = run(&with(&Q, &["classify", "--corner", "0.9,0.3", "--format", "json"]));
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classes"], 5);
    assert_eq!(v["slopes"], serde_json::json!([3, -1, -1, 2]));
}

#[test]
fn enumerate_lists_five_labelled_classes() {
    let o = run(&with(&P, &["enumerate"]));
    assert!(o.status.success());
    let labels: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.ends_with(':'))
        .map(str::to_owned)
        .collect();
    assert_eq!(labels, ["P0:", "P1:", "P2:", "P3:", "P4:"]);

    let o = run(&with(&Q, &["enumerate", "--label", "Q", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn output_is_deterministic() {
    let a = run(&with(&P, &["enumerate", "--format", "pbm"]));
    let b = run(&with(&P, &["enumerate", "--format", "pbm"]));
    assert_eq!(a.stdout, b.stdout);
    let a = run(&with(&P, &["verify", "--samples", "20000", "--seed", "7"]));
    let b = run(&with(&P, &["verify", "--samples", "20000", "--seed", "7"]));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_passes_at_default_sample_size() {
    let o = run(&with(&P, &["verify", "--seed", "42"]));
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().last(), Some("PASS"));
}

#[test]
fn sweep_small() {
    let o = run(&["sweep", "--max-entry", "2", "--max-classes", "4", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn render_pbm_and_svg() {
    let o = run(&with(&P, &["render", "--index", "0", "--format", "pbm", "--window", "2"]));
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("P1\n"));
    let o = run(&with(&P, &["render", "--corner", "0.3,0.4", "--format", "svg"]));
    assert!(stdout(&o).contains("<svg"));
}

#[test]
fn partition_svg_has_every_label() {
    let o = run(&with(&P, &["partition", "--format", "svg"]));
    let s = stdout(&o);
    for j in 0..5 {
        assert!(s.contains(&format!(">P{j}<")), "missing P{j}");
    }
}

#[test]
fn digitize_segment() {
    let o = run(&["digitize", "--from", "0,0", "--to", "2,4"]);
    assert_eq!(stdout(&o), "(0,0) (0,1) (1,1) (1,2) (1,3) (2,3) (2,4)\n");
    let o = run(&["digitize", "--from", "0.1,0", "--to", "2,5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.is_array());
}

#[test]
fn out_file_respects_env_dir() {
    let dir = std::env::temp_dir().join(format!("digiangle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_digiangle"))
        .args(with(&P, &["render", "--index", "1", "--out", "p1.txt"]))
        .env("DIGIANGLE_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.join("p1.txt")).unwrap();
    assert!(text.contains('#'));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    // parallel slopes
    let o = run(&["classify", "--slope1", "1/1", "--slope2", "2/2", "--corner", "0,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&o.stderr).lines().count(), 1);
    // pixel-center hit
    let o = run(&["digitize", "--from", "1/2,1/2", "--to", "3,3"]);
    assert_eq!(o.status.code(), Some(1));
    // malformed input
    let o = run(&["classify", "--slope1", "1/x", "--slope2", "1/2", "--corner", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&with(&P, &["render", "--index", "9"]));
    assert_eq!(o.status.code(), Some(2));
    let o = run(&with(&P, &["partition", "--format", "pbm"]));
    assert_eq!(o.status.code(), Some(2));
}
