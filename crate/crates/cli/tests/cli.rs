use std::path::Path;
use std::process::{Command, Output};

fn dispute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dispute"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn synth(dir: &Path, name: &str, n: usize, seed: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let n = n.to_string();
    let o = dispute(&[
        "synth",
        "--peace",
        &n,
        "--conflict",
        &n,
        "--seed",
        seed,
        "--separation",
        "1.0",
        "--out",
        s(&path),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn train_and_evaluate_svm() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "d.csv", 80, "3");
    let model = dir.path().join("m.model");
    let o = dispute(&[
        "train",
        "--model",
        "svm",
        "--data",
        s(&data),
        "--c",
        "1",
        "--gamma",
        "16.75",
        "--seed",
        "7",
        "--out",
        s(&model),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("support vectors:"));
    assert!(text.contains("# seed: 7"));
    assert!(model.exists());

    let roc = dir.path().join("roc.tsv");
    let o = dispute(&[
        "evaluate",
        "--model",
        s(&model),
        "--data",
        s(&data),
        "--roc",
        s(&roc),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    for key in ["TC", "FP", "TP", "FC", "conflict accuracy", "AUC:"] {
        assert!(text.contains(key), "{key} missing from\n{text}");
    }
    let curve = std::fs::read_to_string(&roc).unwrap();
    assert!(curve.contains("threshold\tfpr\tsensitivity"));
    assert!(curve.starts_with("# tool: dispute"));
}

#[test]
fn train_mlp_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "d.csv", 60, "1");
    let svm = dir.path().join("svm.model");
    let mlp = dir.path().join("mlp.model");
    assert!(dispute(&[
        "train",
        "--model",
        "svm",
        "--data",
        s(&data),
        "--c",
        "2",
        "--gamma",
        "1",
        "--out",
        s(&svm)
    ])
    .status
    .success());
    let o = dispute(&[
        "train",
        "--model",
        "mlp",
        "--hidden",
        "10",
        "--cycles",
        "100",
        "--data",
        s(&data),
        "--out",
        s(&mlp),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("loss trace:"));

    let o = dispute(&[
        "evaluate",
        "--model",
        s(&svm),
        "--data",
        s(&data),
        "--compare",
        s(&mlp),
        "--r",
        "0.394",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("z: "));
    assert!(text.contains("95% verdict"));
    assert!(text.contains("correlation r: 0.3940"));
}

#[test]
fn evaluation_is_reproducible_and_reload_safe() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "d.csv", 50, "2");
    let model = dir.path().join("m.model");
    assert!(dispute(&[
        "train",
        "--model",
        "mlp",
        "--hidden",
        "3",
        "--cycles",
        "20",
        "--data",
        s(&data),
        "--out",
        s(&model)
    ])
    .status
    .success());
    let a = dispute(&["evaluate", "--model", s(&model), "--data", s(&data)]);
    let b = dispute(&["evaluate", "--model", s(&model), "--data", s(&data)]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn missing_data_file_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.model");
    let o = dispute(&[
        "train",
        "--model",
        "svm",
        "--data",
        s(&dir.path().join("nope.csv")),
        "--out",
        s(&model),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!model.exists());
    assert!(!o.stderr.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        dispute(&["train", "--model", "tree"]).status.code(),
        Some(2)
    );
    assert_eq!(dispute(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn empty_dataset_fails() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "d.csv", 30, "2");
    let model = dir.path().join("m.model");
    assert!(dispute(&[
        "train",
        "--model",
        "svm",
        "--data",
        s(&data),
        "--out",
        s(&model)
    ])
    .status
    .success());
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let o = dispute(&["evaluate", "--model", s(&model), "--data", s(&empty)]);
    assert!(!o.status.success());
}

#[test]
fn dimension_mismatch_fails() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "d.csv", 30, "2");
    let model = dir.path().join("m.model");
    assert!(dispute(&[
        "train",
        "--model",
        "svm",
        "--data",
        s(&data),
        "--out",
        s(&model)
    ])
    .status
    .success());
    let text = std::fs::read_to_string(&model).unwrap();
    // Drop one coordinate from every support vector.
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    for sv in doc["model"]["support_x"].as_array_mut().unwrap() {
        sv.as_array_mut().unwrap().pop();
    }
    std::fs::write(&model, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = dispute(&["evaluate", "--model", s(&model), "--data", s(&data)]);
    assert!(!o.status.success());
}

#[test]
fn pipeline_records_short_class_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "d.csv", 400, "5");
    let out = dir.path().join("run");
    let o = dispute(&[
        "pipeline",
        "--data",
        s(&data),
        "--out",
        s(&out),
        "--classes",
        "500",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("failed-stage: sample"));
}

#[test]
fn pipeline_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "d.csv", 120, "6");
    let cfg = dir.path().join("small.toml");
    std::fs::write(
        &cfg,
        "k = 3\nc_values = [1.0, 8.0]\ngamma_values = [0.5, 2.0]\ncycles = 30\nhidden = 4\n",
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = dispute(&[
            "pipeline",
            "--config",
            s(&cfg),
            "--data",
            s(&data),
            "--out",
            s(&out),
            "--classes",
            "50",
            "--seed",
            "9",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let manifest = std::fs::read_to_string(a.join("manifest.txt")).unwrap();
    assert_eq!(
        manifest,
        std::fs::read_to_string(b.join("manifest.txt")).unwrap()
    );
    for name in [
        "svm.model",
        "mlp.model",
        "cv_svm.csv",
        "confusion.txt",
        "roc_svm.tsv",
        "experiment_two_mlp.txt",
        "ranking_svm.txt",
    ] {
        assert!(manifest.contains(name), "{name}");
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    assert!(manifest.contains("# seed: 9"));
}

#[test]
fn sensitivity_reports() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "d.csv", 60, "4");
    let model = dir.path().join("m.model");
    assert!(dispute(&[
        "train",
        "--model",
        "svm",
        "--data",
        s(&data),
        "--gamma",
        "2",
        "--out",
        s(&model)
    ])
    .status
    .success());
    let out = dir.path().join("sens");
    let o = dispute(&[
        "sensitivity",
        "--model",
        s(&model),
        "--data",
        s(&data),
        "--train",
        s(&data),
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let two = std::fs::read_to_string(out.join("experiment_two.csv")).unwrap();
    // Three stamp lines, a header, then baseline + 14 rows.
    assert_eq!(two.lines().count(), 3 + 1 + 15);
    assert!(out.join("ranking.txt").exists());
    let one = std::fs::read_to_string(out.join("experiment_one.csv")).unwrap();
    assert_eq!(one.lines().count(), 3 + 1 + 14);
}

#[test]
fn grid_search_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "d.csv", 40, "8");
    let o = dispute(&[
        "grid-search",
        "--data",
        s(&data),
        "--k",
        "3",
        "--c-values",
        "1,4",
        "--gamma-values",
        "0.5,2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("C,gamma,fold_1,fold_2,fold_3,mean_accuracy"));
    assert!(text.contains("# best"));
}
