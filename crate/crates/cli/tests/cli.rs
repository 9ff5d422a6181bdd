use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mpeval_core::featio::{write_trajectory_file, Manifest, Role, SampleRecord};
use mpeval_core::FeatureTrajectory;
use serde_json::Value;

fn mpeval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpeval"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn find_pairs_toy_dictionary() {
    let dir = tempfile::tempdir().unwrap();
    let dict = dir.path().join("dict.txt");
    fs::write(&dict, "bat\tb æ t\ncat\tk æ t\ndog\td ɒ g\n").unwrap();
    let out = mpeval(&["find-pairs", "--dict", p(&dict), "--seed", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    let set: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(set["contrasts"], serde_json::json!(["b", "k"]));

    let out = mpeval(&[
        "find-pairs",
        "--dict",
        p(&dict),
        "--seed",
        "1",
        "--min-size",
        "3",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn find_pairs_sampling_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let dict = dir.path().join("dict.txt");
    let mut text = String::new();
    for a in ["b", "d", "g", "k"] {
        for b in ["æ", "ɪ", "ʌ"] {
            for c in ["t", "n", "s"] {
                text.push_str(&format!("{a}{b}{c}\t{a} {b} {c}\n"));
            }
        }
    }
    fs::write(&dict, text).unwrap();
    let run = |seed: &str| {
        mpeval(&[
            "find-pairs",
            "--dict",
            p(&dict),
            "--seed",
            seed,
            "--max-sets",
            "5",
        ])
        .stdout
    };
    let a = run("3");
    assert_eq!(String::from_utf8_lossy(&a).lines().count(), 5);
    assert_eq!(a, run("3"));
    assert_ne!(a, run("4"));
}

#[test]
fn dictionary_parse_error_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let dict = dir.path().join("dict.txt");
    fs::write(&dict, "bat b æ t\nlonely\n").unwrap();
    let out = mpeval(&["find-pairs", "--dict", p(&dict), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parse");
    assert!(err["error"]["message"].as_str().unwrap().contains("line 2"));
}

#[test]
fn missing_seed_is_a_usage_error() {
    assert_eq!(
        mpeval(&["find-pairs", "--dict", "x"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let targets = dir.path().join("t.jsonl");
    fs::write(&targets, "").unwrap();
    let out = mpeval(&["classify", "--targets", p(&targets)]);
    assert_eq!(out.status.code(), Some(2));
}

fn two_sample_corpus(dir: &Path) -> std::path::PathBuf {
    let mut records = Vec::new();
    for (k, shift) in [(0usize, 0.0), (1, 0.5)] {
        let id = format!("s{k}");
        let t = FeatureTrajectory::new(
            ndarray::Array2::from_shape_fn((40, 2), |(t, c)| {
                ((t as f64) * 0.2 + shift + c as f64).sin()
            }),
            100.0,
        )
        .unwrap();
        write_trajectory_file(&t, dir.join(format!("{id}.aft"))).unwrap();
        records.push(SampleRecord {
            path: format!("{id}.aft"),
            id,
            speaker: "spk".into(),
            word: "aba".into(),
            label: ["b", "d"][k].into(),
            set_id: "one".into(),
            role: Role::Articulatory,
            channel_names: None,
        });
    }
    let manifest = dir.join("manifest.jsonl");
    fs::write(&manifest, Manifest::new(records).unwrap().to_jsonl()).unwrap();
    manifest
}

#[test]
fn extract_targets_two_samples() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = two_sample_corpus(dir.path());
    let out = mpeval(&["extract-targets", "--manifest", p(&manifest)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn missing_trajectory_exits_3_naming_the_sample() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = two_sample_corpus(dir.path());
    fs::remove_file(dir.path().join("s1.aft")).unwrap();
    let out = mpeval(&["extract-targets", "--manifest", p(&manifest)]);
    assert_eq!(out.status.code(), Some(3));
    let last_line = out
        .stderr
        .split(|b| *b == b'\n')
        .rev()
        .find(|l| !l.is_empty())
        .unwrap();
    let err: Value = serde_json::from_slice(last_line).unwrap();
    assert!(err["error"]["message"].as_str().unwrap().contains("\"s1\""));
    assert!(out.stdout.is_empty());
}

#[test]
fn corrupt_trajectory_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = two_sample_corpus(dir.path());
    fs::write(dir.path().join("s0.aft"), b"AFT1\x05\x00\x00\x00").unwrap();
    let out = mpeval(&["extract-targets", "--manifest", p(&manifest)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("s0"));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = two_sample_corpus(dir.path());
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"metric": "manhattan"}"#).unwrap();
    let out = mpeval(&[
        "extract-targets",
        "--manifest",
        p(&manifest),
        "--config",
        p(&config),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synthetic_suite_classifies_and_reports_config() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    assert!(
        mpeval(&["synth", "articulatory", "--out", p(&corpus), "--seed", "2"])
            .status
            .success()
    );
    let targets = dir.path().join("targets.jsonl");
    let out = mpeval(&[
        "extract-targets",
        "--manifest",
        p(&corpus.join("manifest.jsonl")),
        "--out",
        p(&targets),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());

    let report = stdout_json(&mpeval(&[
        "classify",
        "--targets",
        p(&targets),
        "--seed",
        "5",
        "--threads",
        "2",
    ]));
    assert!(report["accuracy"].as_f64().unwrap() >= 0.95);
    assert_eq!(report["config"]["seed"], 5);
    assert_eq!(report["config"]["svm_c"], 1.0);
    assert_eq!(report["tool"], "mpeval");
    assert!(report["version"].is_string());
}

#[test]
fn consistency_alpha_one_equals_self_training() {
    let dir = tempfile::tempdir().unwrap();
    let mat = |name: &str, rows: &[Vec<f64>]| {
        let path = dir.path().join(name);
        write_trajectory_file(&FeatureTrajectory::from_rows(rows, 50.0).unwrap(), &path).unwrap();
        path
    };
    let y_hat = mat(
        "y_hat.aft",
        &[vec![1.0, 2.0], vec![0.5, -1.0], vec![0.0, 0.0]],
    );
    let y_frozen = mat(
        "y_frozen.aft",
        &[vec![0.0, 0.0], vec![0.5, 1.0], vec![1.0, 1.0]],
    );
    let y_star = mat("y_star.aft", &[vec![2.0, 2.0], vec![-1.0, 0.0]]);
    let w = mat("w.aft", &[vec![1.0, 0.2], vec![0.3, 1.0], vec![0.1, 1.0]]);
    let w_star = mat("w_star.aft", &[vec![1.0, 0.0], vec![0.0, 1.0]]);
    let grads = dir.path().join("grads");
    let sidecar = dir.path().join("sidecar.json");
    let args = |alpha: &str| {
        mpeval(&[
            "consistency-loss",
            "--y-hat",
            p(&y_hat),
            "--y-frozen",
            p(&y_frozen),
            "--y-hat-star",
            p(&y_star),
            "--features",
            p(&w),
            "--features-star",
            p(&w_star),
            "--alpha",
            alpha,
            "--grad-out",
            p(&grads),
            "--sidecar-out",
            p(&sidecar),
        ])
    };
    let report = stdout_json(&args("1"));
    assert_eq!(report["total"], report["l_st"]);
    assert_eq!(report["l_st"].as_f64().unwrap(), (5.0 + 4.0 + 2.0) / 3.0);
    assert!(grads.join("grad_y_hat.aft").exists());

    let report = stdout_json(&args("0"));
    assert_eq!(report["total"], report["l_c"]);

    // The written sidecar reproduces the same losses.
    let again = stdout_json(&mpeval(&[
        "consistency-loss",
        "--y-hat",
        p(&y_hat),
        "--y-frozen",
        p(&y_frozen),
        "--y-hat-star",
        p(&y_star),
        "--sidecar",
        p(&sidecar),
    ]));
    assert_eq!(again["l_c"], report["l_c"]);
}

#[test]
fn consistency_length_mismatch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mat = |name: &str, n: usize| {
        let path = dir.path().join(name);
        write_trajectory_file(
            &FeatureTrajectory::from_rows(&vec![vec![1.0]; n], 50.0).unwrap(),
            &path,
        )
        .unwrap();
        path
    };
    let (y, w, ws) = (mat("y.aft", 4), mat("w.aft", 5), mat("ws.aft", 4));
    let out = mpeval(&[
        "consistency-loss",
        "--y-hat",
        p(&y),
        "--y-frozen",
        p(&y),
        "--y-hat-star",
        p(&y),
        "--features",
        p(&w),
        "--features-star",
        p(&ws),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains('4') && msg.contains('5'), "{msg}");
}
