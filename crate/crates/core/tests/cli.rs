use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn stabrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabrad")).args(args).env("STABRAD_THREADS", "2").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("terminated by a signal")
}

const GRCAR: [&str; 4] = ["--generator", "grcar:10", "--shift", "1"];

fn with<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(GRCAR.iter()).chain(tail).copied().collect()
}

#[test]
fn radius_delta_prints_the_trace() {
    let o = stabrad(&with(&["radius-delta"], &["--eps", "0.5"]));
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("delta = 8.52283822"), "{out}");
    assert!(out.contains("status: converged"));
}

#[test]
fn exit_codes() {
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["radius-delta", "--generator", "grcar:10"], 2),
        (vec!["radius-delta", "--generator", "grcar:10", "--eps", "0"], 3),
        (vec!["radius-delta", "--generator", "grcar:zz", "--eps", "0.5"], 3),
        (vec!["radius-delta", "--matrix", "/nonexistent/a.mtx", "--eps", "0.5"], 6),
        (vec!["radius-delta", "--generator", "grcar:10", "--shift", "-5", "--eps", "0.5"], 9),
        (vec!["radius-delta", "--generator", "grcar:1600", "--eps", "0.5"], 10),
        (vec!["radius-delta", "--generator", "grcar:10", "--structure", "banded", "--eps", "0.5"], 3),
        (vec!["pseudospectrum", "--generator", "grcar:10", "--window", "-3,1,-3"], 3),
    ];
    for (args, want) in cases {
        let o = stabrad(&args);
        assert_eq!(code(&o), want, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn bad_files_are_rejected_without_panicking() {
    let dir = tempfile::tempdir().unwrap();
    let bodies = [
        "",
        "garbage\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 3 1.0\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
        "%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 -1.0\n",
        "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 nan\n",
        "%%MatrixMarket matrix array real general\n2 2\n-1\n0\n0\nx\n",
    ];
    for (i, b) in bodies.iter().enumerate() {
        let p = dir.path().join(format!("m{i}.mtx"));
        fs::write(&p, b).unwrap();
        let o = stabrad(&["radius-delta", "--matrix", p.to_str().unwrap(), "--eps", "0.1"]);
        let c = code(&o);
        assert!((3..=20).contains(&c), "case {i}: exit {c}");
    }
}

#[test]
fn matrix_market_input_matches_generator() {
    let dir = tempfile::tempdir().unwrap();
    let a = stabrad::io::grcar(10, 1.0).unwrap();
    let p = dir.path().join("g.mtx");
    stabrad::io::write_matrix_market(&p, &a, None).unwrap();
    let o1 = stabrad(&with(&["radius-delta"], &["--eps", "0.5"]));
    let o2 = stabrad(&["radius-delta", "--matrix", p.to_str().unwrap(), "--eps", "0.5"]);
    let last = |o: &Output| String::from_utf8_lossy(&o.stdout).lines().find(|l| l.starts_with("delta =")).unwrap().to_string();
    assert_eq!(last(&o1), last(&o2));
}

fn read(dir: &Path, f: &str) -> Vec<u8> {
    fs::read(dir.join(f)).unwrap_or_else(|e| panic!("{f}: {e}"))
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let o = stabrad(&with(&["radius-delta"], &["--eps", "0.5", "--restarts", "3", "--out", d.path().to_str().unwrap()]));
        assert_eq!(code(&o), 0);
    }
    for f in ["report.json", "trace.txt", "E.mtx", "Delta.mtx", "Theta.mtx"] {
        assert_eq!(read(d1.path(), f), read(d2.path(), f), "{f} differs");
    }
    let meta: serde_json::Value = serde_json::from_slice(&read(d1.path(), "run_meta.json")).unwrap();
    assert_eq!(meta["command"][1], "radius-delta");
    let report: serde_json::Value = serde_json::from_slice(&read(d1.path(), "report.json")).unwrap();
    assert_eq!(report["mode"], "solve-delta");
    assert!((report["delta"].as_f64().unwrap() - 0.8522838229826059).abs() < 1e-9);
}

#[test]
fn other_commands_write_their_outputs() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().to_str().unwrap();
    let runs: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (with(&["radius-eps"], &["--delta", "1", "--out", out]), vec!["report.json", "Delta.mtx"]),
        (with(&["stability-radius"], &["--sweep", "--out", out]), vec!["axis_sweep.json"]),
        (
            with(&["pseudospectrum"], &["--levels", "0.1,0.3", "--nx", "61", "--ny", "61", "--out", out]),
            vec!["field.csv", "contours.csv", "pseudospectrum.json"],
        ),
        (
            with(&["verify-bounds"], &["--eps", "0.3", "--samples", "4", "--steps", "2000", "--nx", "151", "--ny", "151", "--out", out]),
            vec!["bounds.json", "gamma.csv"],
        ),
        (with(&["sample-joint"], &["--eps", "0.1", "--delta", "0.2", "--samples", "30", "--out", out]), vec!["cloud.csv"]),
    ];
    for (args, files) in runs {
        let o = stabrad(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        for f in files {
            assert!(d.path().join(f).exists(), "{f} missing after {args:?}");
        }
    }
    let b: serde_json::Value = serde_json::from_slice(&read(d.path(), "bounds.json")).unwrap();
    let text = b.to_string();
    assert!(text.contains("sampled certification"), "{text}");
    let cloud = String::from_utf8(read(d.path(), "cloud.csv")).unwrap();
    assert!(cloud.lines().count() > 30);
}
