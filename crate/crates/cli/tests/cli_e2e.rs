//! End-to-end checks of the built binary: exit codes, manifests, and
//! rerun determinism, driven through real subprocess invocations.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_trollsweep")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should spawn")
}

fn assert_code(out: &Output, want: i32) {
    let got = out.status.code().expect("no exit code");
    assert_eq!(
        got,
        want,
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_code(&run_in(dir.path(), &["--help"]), 0);
    assert_code(&run_in(dir.path(), &["--version"]), 0);
    assert_code(&run_in(dir.path(), &["train", "--help"]), 0);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown subcommand, missing required flag, conflicting inputs,
    // and a zero thread pool are all caller mistakes.
    assert_code(&run_in(dir.path(), &["no-such-command"]), 1);
    assert_code(&run_in(dir.path(), &["ks-report", "--features", "f.csv"]), 1);
    assert_code(
        &run_in(
            dir.path(),
            &["ingest", "--campaign-csv", "a.csv", "--sample-jsonl", "b.jsonl", "--out", "c"],
        ),
        1,
    );
    assert_code(
        &run_in(
            dir.path(),
            &[
                "--threads",
                "0",
                "synth",
                "--out-troll",
                "t.jsonl",
                "--out-benign",
                "b.jsonl",
            ],
        ),
        1,
    );
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["train", "--features", "missing.csv", "--out", "m.json"],
    );
    assert_code(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error:"), "stderr was: {stderr}");
}

#[test]
fn sample_ingest_refuses_troll_label() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.jsonl"), "").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "ingest",
            "--sample-jsonl",
            "s.jsonl",
            "--label",
            "troll",
            "--out",
            "o.jsonl",
        ],
    );
    assert_code(&out, 2);
}

#[test]
fn pipeline_writes_outputs_and_manifests() {
    let dir = tempfile::tempdir().unwrap();
    assert_code(
        &run_in(
            dir.path(),
            &[
                "synth",
                "--n-troll",
                "20",
                "--n-benign",
                "20",
                "--seed",
                "3",
                "--out-troll",
                "t.jsonl",
                "--out-benign",
                "b.jsonl",
            ],
        ),
        0,
    );
    assert_code(
        &run_in(
            dir.path(),
            &[
                "featurize",
                "--input",
                "t.jsonl",
                "--input",
                "b.jsonl",
                "--out",
                "f.csv",
            ],
        ),
        0,
    );
    assert_code(
        &run_in(
            dir.path(),
            &[
                "train",
                "--features",
                "f.csv",
                "--trees",
                "15",
                "--folds",
                "3",
                "--out",
                "m.json",
            ],
        ),
        0,
    );

    for name in ["t.jsonl", "b.jsonl", "f.csv", "m.json"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
        let manifest_path = dir.path().join(format!("{name}.manifest.json"));
        // synth records its manifest beside the troll output only.
        if name == "b.jsonl" {
            assert!(!manifest_path.exists());
            continue;
        }
        let raw = std::fs::read_to_string(&manifest_path).unwrap();
        let manifest: serde_json::Value = serde_json::from_str(&raw).unwrap();
        assert_eq!(manifest["tool"], "trollsweep");
        assert!(manifest["outputs"].as_array().is_some_and(|o| !o.is_empty()));
    }
    // The feature matrix carries its provenance sidecar.
    assert!(dir.path().join("f.provenance.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let mut trees = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        assert_code(
            &run_in(
                dir.path(),
                &[
                    "synth",
                    "--n-troll",
                    "10",
                    "--n-benign",
                    "10",
                    "--seed",
                    "11",
                    "--out-troll",
                    "t.jsonl",
                    "--out-benign",
                    "b.jsonl",
                ],
            ),
            0,
        );
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        trees.push(files);
    }
    assert_eq!(trees[0], trees[1]);
}

#[test]
fn sequential_thread_pool_matches_default() {
    let mut outputs = Vec::new();
    for threads in [None, Some("1")] {
        let dir = tempfile::tempdir().unwrap();
        let mut args: Vec<&str> = Vec::new();
        if let Some(t) = threads {
            args.extend(["--threads", t]);
        }
        args.extend([
            "synth",
            "--n-troll",
            "12",
            "--n-benign",
            "12",
            "--seed",
            "5",
            "--out-troll",
            "t.jsonl",
            "--out-benign",
            "b.jsonl",
        ]);
        assert_code(&run_in(dir.path(), &args), 0);
        let args = [
            "featurize",
            "--input",
            "t.jsonl",
            "--input",
            "b.jsonl",
            "--out",
            "f.csv",
        ];
        assert_code(&run_in(dir.path(), &args), 0);
        outputs.push(std::fs::read(dir.path().join("f.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
