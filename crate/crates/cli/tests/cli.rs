//! End-to-end tests of the `symdec` binary against the fixture corpus.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nalgebra::DVector;
use symdec::decompose::Decomposition;
use symdec::C64;
use symdec_cli::files;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symdec"))
        .args(args)
        .env_remove("SYMDEC_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn decompose_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.dec");
    let tensor = fixture("cubic2_rank3.tensor");

    let out = run(&[
        "decompose",
        tensor.to_str().unwrap(),
        "--rank",
        "3",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "stdout: {text}");
    assert!(text.contains("rank r = 3"));
    assert!(text.contains("free parameters l = 0, affine constraints d = 0"));

    // The written file parses and its header error is consistent.
    let (dec, stored) =
        files::parse_decomposition(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(dec.len(), 3);
    let f = files::parse_tensor(&std::fs::read_to_string(&tensor).unwrap()).unwrap();
    let recomputed = symdec::decompose::decomposition_error(&f, dec.vectors()).unwrap();
    assert!((recomputed - stored).abs() <= 1e-10);

    let out = run(&[
        "verify",
        tensor.to_str().unwrap(),
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("relative"));
}

#[test]
fn identical_seeds_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.dec");
    let b = dir.path().join("b.dec");
    let tensor = fixture("gap2_cubic.tensor");
    for path in [&a, &b] {
        let out = run(&[
            "decompose",
            tensor.to_str().unwrap(),
            "--rank",
            "4",
            "--seed",
            "7",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn seed_env_var_matches_explicit_flag() {
    let dir = tempfile::tempdir().unwrap();
    let by_flag = dir.path().join("flag.dec");
    let by_env = dir.path().join("env.dec");
    let tensor = fixture("gap2_cubic.tensor");

    let out = run(&[
        "decompose",
        tensor.to_str().unwrap(),
        "--rank",
        "4",
        "--seed",
        "9",
        "--output",
        by_flag.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let out = Command::new(env!("CARGO_BIN_EXE_symdec"))
        .args([
            "decompose",
            tensor.to_str().unwrap(),
            "--rank",
            "4",
            "--output",
            by_env.to_str().unwrap(),
        ])
        .env("SYMDEC_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    assert_eq!(
        std::fs::read(&by_flag).unwrap(),
        std::fs::read(&by_env).unwrap()
    );
}

#[test]
fn all_mode_writes_indexed_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("all.dec");
    let out = run(&[
        "decompose",
        fixture("gap2_cubic.tensor").to_str().unwrap(),
        "--rank",
        "4",
        "--mode",
        "all",
        "--seed",
        "11",
        "--restarts",
        "40",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "stdout: {text}");
    assert!(text.contains("affine constraints d = 2"));
    assert!(dir.path().join("all.dec.1").exists());
    assert!(dir.path().join("all.dec.2").exists());
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tensor");
    std::fs::write(&bad, "3 3 uptri\nnot a number\n").unwrap();
    let out = run(&["decompose", bad.to_str().unwrap(), "--rank", "3"]);
    assert_eq!(out.status.code(), Some(1));

    let missing = dir.path().join("nope.tensor");
    let out = run(&["catrank", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_flags_a_broken_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let c = |re: f64, im: f64| C64::new(re, im);
    let root = |w: C64| w.powf(1.0 / 3.0);
    // The worked decomposition, with the last vector zeroed out.
    let vectors = vec![
        DVector::from_vec(vec![c(1.0, 0.0), c(-2.0, 0.0), c(-1.0, 0.0)])
            .map(|x| x * root(c(3.0, 0.0))),
        DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)])
            .map(|x| x * root(c(5.0, 0.0))),
        DVector::from_vec(vec![c(0.0, 0.0); 3]),
    ];
    let dec = Decomposition::new(2, 3, vectors).unwrap();
    let dec_path = dir.path().join("broken.dec");
    std::fs::write(&dec_path, files::serialize_decomposition(&dec, 0.0)).unwrap();

    let out = run(&[
        "verify",
        fixture("cubic2_rank3.tensor").to_str().unwrap(),
        dec_path.to_str().unwrap(),
    ]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn verify_accepts_empty_decomposition_of_zero_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let tensor_path = dir.path().join("zero.tensor");
    let mut text = String::from("3 3 uptri\n");
    for _ in 0..10 {
        text.push_str("0.0 0.0\n");
    }
    std::fs::write(&tensor_path, text).unwrap();
    let dec_path = dir.path().join("empty.dec");
    std::fs::write(&dec_path, "3 3 0 0.0\n").unwrap();

    let out = run(&[
        "verify",
        tensor_path.to_str().unwrap(),
        dec_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
}

#[test]
fn catrank_reports_the_known_ranks() {
    let out = run(&["catrank", fixture("cubic2_rank3.tensor").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("catalecticant rank = 3"));

    let out = run(&["catrank", fixture("quartic2_gap3.tensor").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("catalecticant rank = 6"));

    // Terms-format files go through the same path.
    let out = run(&["catrank", fixture("det3_cubic.tensor").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("catalecticant rank = "));
}

#[test]
fn genrank_prints_rank_and_gap() {
    let out = run(&["genrank", "3", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("generic rank = 4"));
    assert!(text.contains("dimension gap at rank 4 = 2"));

    let out = run(&["genrank", "4", "3"]);
    let text = stdout(&out);
    assert!(text.contains("generic rank = 5"));
    assert!(text.contains("dimension gap at rank 5 = 0"));
}
