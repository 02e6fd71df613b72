use std::path::Path;
use std::process::{Command, Output};

fn pencil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pencil"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_zero_potentials(path: &Path, n: usize) {
    let mut s = String::from("x,re_q1,im_q1,re_sigma,im_sigma\n");
    for k in 0..=n {
        s.push_str(&format!("{},0,0,0,0\n", k as f64 * std::f64::consts::PI / n as f64));
    }
    std::fs::write(path, s).unwrap();
}

#[test]
fn split_table_writes_table_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = pencil(&[
        "split-table",
        "--deltas",
        "0.01,0.001",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "delta,d1,d0,re_l1,im_l1,re_lm1,im_lm1,re_M1,im_M1,re_Mm1,im_Mm1"
    );
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 0.01);
    assert!((row[1] - 0.0982).abs() < 0.002 * 0.0982 * 10.0);
    assert!(dir.path().join("potentials_delta=0.01.csv").exists());
    assert!(dir.path().join("potentials_delta=0.001.csv").exists());
}

#[test]
fn empty_delta_list_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = pencil(&["split-table", "--deltas", "", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert_eq!(table.lines().count(), 1);
}

#[test]
fn forward_inverse_and_roundtrip_on_the_zero_problem() {
    let dir = tempfile::tempdir().unwrap();
    let pot = dir.path().join("zero.csv");
    let json = dir.path().join("zero.json");
    write_zero_potentials(&pot, 200);
    let out = pencil(&[
        "forward",
        pot.to_str().unwrap(),
        "--n-max",
        "4",
        "-o",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&json).unwrap();
    assert!(text.contains("\"entries\""));

    let out = pencil(&["inverse", json.to_str().unwrap(), "--grid-n", "100"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("x,re_q1,im_q1,re_q0ad,im_q0ad"));
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        assert!(v[1..].iter().all(|z| z.abs() < 1e-6), "{line}");
    }

    let out = pencil(&["roundtrip", json.to_str().unwrap(), "--n-check", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(pencil(&["inverse", missing.to_str().unwrap()]).status.code(), Some(4));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"entries\": [{\"n\": 0, \"lambda\": [1, 0], \"M\": [0, 0]}]}").unwrap();
    assert_eq!(pencil(&["inverse", bad.to_str().unwrap()]).status.code(), Some(2));

    let out = pencil(&[
        "split-table",
        "--deltas",
        "-0.1",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // disc around 5 with radius 1.5 holds three roots where two are expected
    let pot = dir.path().join("zero.csv");
    write_zero_potentials(&pot, 100);
    let out = pencil(&["forward", pot.to_str().unwrap(), "--n-max", "3", "--omega0", "5,0"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
