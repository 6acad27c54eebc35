use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ghostsim_cli::{emit_config, parse_config};
use serde_json::Value;

const CONFIG: &str = "\
# far-field reference geometry
sigma = 10
omega = 1000
epsilon = 0.1
z0 = 2
lambda = 0.01
L1 = 100
L2 = 50
z2_points = 1024
";

fn ghostsim(dir: &Path, args: &[&str]) -> Output {
    let cfg = dir.join("run.cfg");
    if !cfg.exists() {
        fs::write(&cfg, CONFIG).unwrap();
    }
    Command::new(env!("CARGO_BIN_EXE_ghostsim"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|v| if v.is_empty() { f64::NAN } else { v.parse().unwrap() }).collect())
        .collect();
    (header, rows)
}

#[test]
fn orthogonal_markers_give_no_fringes_and_full_distinguishability() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghostsim(dir.path(), &["pattern", "--config", "run.cfg", "--out", "o", "--seed", "11"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/summary.json")).unwrap()).unwrap();
    let keys: Vec<&String> = summary.as_object().unwrap().keys().collect();
    let mut expected = [
        "distinguishability",
        "peak_visibility",
        "measured_visibility",
        "duality_margin",
        "fringe_spacing",
        "pass_probability",
    ];
    expected.sort();
    let mut got: Vec<&str> = keys.iter().map(|k| k.as_str()).collect();
    got.sort();
    assert_eq!(got, expected);
    assert!(summary["measured_visibility"].as_f64().unwrap() <= 1e-6);
    assert_eq!(summary["distinguishability"].as_f64().unwrap(), 1.0);
    assert!(summary["duality_margin"].as_f64().unwrap() >= 0.0);
    assert!(summary["fringe_spacing"].as_f64().unwrap() > 0.0);

    let manifest = fs::read_to_string(dir.path().join("o/manifest.txt")).unwrap();
    assert!(manifest.contains("# seed = 11"));
    let (header, rows) = read_csv(&dir.path().join("o/pattern.csv"));
    assert_eq!(header, "z2,intensity");
    assert_eq!(rows.len(), 1024);
}

#[test]
fn eraser_patterns_sum_to_the_marked_pattern() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ghostsim(dir.path(), &["pattern", "--config", "run.cfg", "--out", "o"]).status.success());
    assert!(ghostsim(dir.path(), &["eraser", "--config", "run.cfg", "--out", "o"]).status.success());
    let (_, whole) = read_csv(&dir.path().join("o/pattern.csv"));
    let (_, plus) = read_csv(&dir.path().join("o/eraser_plus.csv"));
    let (_, minus) = read_csv(&dir.path().join("o/eraser_minus.csv"));
    let peak = whole.iter().map(|r| r[1]).fold(0.0, f64::max);
    for ((w, p), m) in whole.iter().zip(&plus).zip(&minus) {
        assert_eq!(w[0], p[0]);
        assert!((p[1] + m[1] - w[1]).abs() <= 1e-12 * peak);
    }
}

#[test]
fn overlap_sweep_respects_the_duality_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghostsim(
        dir.path(),
        &[
            "sweep",
            "--config",
            "run.cfg",
            "--out",
            "o",
            "--workers",
            "3",
            "--set",
            "sweep_param=overlap_magnitude",
            "--set",
            "sweep_values=0, 0.25, 0.5, 0.75, 1",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("o/sweep.csv"));
    let cols: Vec<&str> = header.split(',').collect();
    let at = |name: &str| cols.iter().position(|c| *c == name).unwrap();
    assert_eq!(rows.len(), 5);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[at("index")], i as f64);
        assert_eq!(row[at("overlap_magnitude")], 0.25 * i as f64);
        assert!(row[at("duality_margin")] >= -1e-9, "{row:?}");
        assert!(row[at("measured_visibility")] <= 0.25 * i as f64 + 1e-2);
    }
}

#[test]
fn manifest_reproduces_the_run_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["pattern", "--config", "run.cfg", "--out", "a", "--set", "overlap_magnitude=0.4", "--set", "overlap_phase=0.3"];
    assert!(ghostsim(dir.path(), &args).status.success());
    let again = ghostsim(dir.path(), &["pattern", "--config", "a/manifest.txt", "--out", "b"]);
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
    for f in ["pattern.csv", "summary.json"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(f)).unwrap(),
            fs::read(dir.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
    let cfg = parse_config(&fs::read_to_string(dir.path().join("a/manifest.txt")).unwrap()).unwrap();
    assert_eq!(parse_config(&emit_config(&cfg)).unwrap(), cfg);
}

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| ghostsim(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["validate", "--config", "run.cfg", "--out", "v", "--set", "overlap_magnitude=0.5"]), 0);
    assert_eq!(code(&["pattern", "--config", "run.cfg", "--set", "colour=blue"]), 1);
    assert_eq!(code(&["pattern", "--config", "missing.cfg"]), 1);
    assert_eq!(code(&["transmogrify"]), 1);
    assert_eq!(code(&["pattern", "--config", "run.cfg", "--set", "sigma=-1"]), 2);
    assert_eq!(code(&["eraser", "--config", "run.cfg", "--set", "overlap_magnitude=0.3"]), 2);
    // a scan window far outside the pattern cannot be checked against the oracle
    assert_eq!(code(&["validate", "--config", "run.cfg", "--out", "w", "--set", "z2_min=300", "--set", "z2_max=301"]), 3);
    let report = fs::read_to_string(dir.path().join("w/validate.txt")).unwrap();
    assert!(report.contains("[FAIL]"));
}
