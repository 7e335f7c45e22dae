use std::path::Path;
use std::process::{Command, Output};

use blocksparse::blockmat::io;
use blocksparse::dictionaries::{gaussian_dictionary, spike_kron_fourier};
use blocksparse::{BlockVector, CMat, Complex64};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blocksparse")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["thresholds", "--R", "ten", "--d-max", "3"]).status.code(), Some(1));
}

#[test]
fn audit_extremal_pair() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("pair.txt");
    let (_, _, dict) = spike_kron_fourier(4, 2, &CMat::identity(2, 2)).unwrap();
    io::write_matrix(&file, dict.entries()).unwrap();
    let out = run(&["audit", path_str(&file), "--block-len", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let value = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("{key}="))).unwrap();
        line.split_once('=').unwrap().1.parse().unwrap()
    };
    assert!((value("mu_block") - 0.25).abs() < 1e-12);
    assert!((value("block_threshold_kd") - 3.0).abs() < 1e-12);
    assert_eq!(value("sub_coherence"), 0.0);
    assert!(text.contains("welch_bound="));
    assert!(text.contains("orthogonalization_min_d="));
}

#[test]
fn audit_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_eq!(run(&["audit", path_str(&missing), "--block-len", "1"]).status.code(), Some(1));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 0\n2 1\n").unwrap();
    let out = run(&["audit", path_str(&bad), "--block-len", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 0"));

    let ragged = dir.path().join("ragged.txt");
    std::fs::write(&ragged, "1 0\n0\n").unwrap();
    assert_eq!(run(&["audit", path_str(&ragged), "--block-len", "1"]).status.code(), Some(2));
}

#[test]
fn thresholds_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("sweep.csv");
    let out = run(&["thresholds", "--R", "10", "--d-max", "12", "--samples", "5", "--out", path_str(&out_file)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&out_file).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 13);
    assert!(lines[0].starts_with("d,block_threshold_kd,"));
    let row4: Vec<f64> = lines[4].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row4[0], 4.0);
    assert!((row4[1] - 8.32).abs() < 5e-3);
    assert_eq!(row4[4], 4.0);
}

#[test]
fn montecarlo_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "L = 20\nN = 80\nd = 2\nsolvers = omp,bomp\nk_range = 1..3\ntrials = 5\nseed = 3\n").unwrap();
    let a = run(&["montecarlo", "--config", path_str(&cfg)]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let csv = stdout(&a);
    assert!(csv.starts_with("solver,k,trials,successes,success_rate,"));
    assert_eq!(csv.lines().count(), 1 + 6);
    let b = run(&["montecarlo", "--config", path_str(&cfg)]);
    assert_eq!(csv, stdout(&b));

    std::fs::write(&cfg, "L = 20\nN = 80\nd = 3\nsolvers = omp\nk_range = 1..3\ntrials = 5\n").unwrap();
    assert_eq!(run(&["montecarlo", "--config", path_str(&cfg)]).status.code(), Some(1));
}

#[test]
fn recover_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let dict = gaussian_dictionary(16, 48, 3, 4).unwrap();
    let mut x = BlockVector::zeros(48, 3).unwrap();
    x.block_mut(5).copy_from_slice(&[Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(0.5, 0.0)]);
    let y = dict.apply(&x).unwrap();
    let dict_file = dir.path().join("dict.bin");
    let y_file = dir.path().join("y.txt");
    io::write_matrix(&dict_file, dict.entries()).unwrap();
    io::write_vector(&y_file, &y).unwrap();

    for solver in ["bomp", "lopt", "oracle"] {
        let out_file = dir.path().join(format!("{solver}.txt"));
        let out = run(&[
            "recover", "--dict", path_str(&dict_file), "--y", path_str(&y_file), "--solver", solver, "--k", "1",
            "--block-len", "3", "--out", path_str(&out_file),
        ]);
        assert_eq!(out.status.code(), Some(0), "{solver}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).contains("support={5}"));
        let x_hat = io::read_vector(&out_file).unwrap();
        assert!((x_hat - x.entries()).norm() < 1e-6 * x.entries().norm(), "{solver}");
    }

    let out = run(&[
        "recover", "--dict", path_str(&dict_file), "--y", path_str(&y_file), "--solver", "bmp", "--k", "1",
        "--block-len", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "recover", "--dict", path_str(&dict_file), "--y", path_str(&y_file), "--solver", "cosamp", "--k", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn uncertainty_comb() {
    let out = run(&["uncertainty", "--R", "16", "--d", "2", "--U", "haar:5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("A=4\n") && text.contains("B=4\n") && text.contains("equality=true"));
    let out = run(&["uncertainty", "--R", "5", "--d", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("comb=undefined"));
    assert_eq!(run(&["uncertainty", "--R", "4", "--d", "2", "--U", "wobbly"]).status.code(), Some(1));
}
