use dispute_core::data::generate_synthetic;
use dispute_core::pipeline::{run_pipeline_bytes, run_pipeline_file, PipelineConfig, MANIFEST};
use dispute_core::report::sha256_hex;
use dispute_core::{Error, GridSpec};

fn small_config(seed: u64) -> PipelineConfig {
    let mut cfg = PipelineConfig::standard(seed);
    cfg.n_per_class = 60;
    cfg.grid = GridSpec {
        c_values: vec![1.0, 8.0],
        gamma_values: vec![0.5, 2.0],
        k: 3,
        seed,
    };
    cfg.hidden = 4;
    cfg.train.cycles = 30;
    cfg
}

#[test]
fn every_artifact_is_stamped_and_listed() {
    let csv = generate_synthetic(150, 150, 2.5, 4)
        .unwrap()
        .to_csv_string();
    let dir = tempfile::tempdir().unwrap();
    let out = run_pipeline_bytes(csv.as_bytes(), &small_config(4), dir.path()).unwrap();
    let digest = sha256_hex(csv.as_bytes());
    let manifest = std::fs::read_to_string(dir.path().join(MANIFEST)).unwrap();
    assert!(manifest.contains("status: ok"));
    assert!(manifest.contains(&digest));
    for (name, hash) in &out.artifacts {
        let bytes = std::fs::read(dir.path().join(name)).unwrap();
        assert_eq!(&sha256_hex(&bytes), hash, "{name}");
        assert!(manifest.contains(&format!("{hash}  {name}")));
        if !name.ends_with(".model") {
            let text = String::from_utf8(bytes).unwrap();
            assert!(text.starts_with("# tool: dispute "), "{name}");
            assert!(text.contains("# seed: 4\n"), "{name}");
            assert!(text.contains(&digest), "{name}");
        }
    }
    for name in [
        "svm.model",
        "mlp.model",
        "cv_svm.csv",
        "roc_svm.tsv",
        "comparison.txt",
    ] {
        assert!(
            out.artifacts.iter().any(|(n, _)| n == name),
            "{name} missing"
        );
    }
}

#[test]
fn different_seed_changes_the_split() {
    let csv = generate_synthetic(150, 150, 2.5, 4)
        .unwrap()
        .to_csv_string();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let x = run_pipeline_bytes(csv.as_bytes(), &small_config(1), a.path()).unwrap();
    let y = run_pipeline_bytes(csv.as_bytes(), &small_config(2), b.path()).unwrap();
    assert_ne!(x.artifacts, y.artifacts);
}

#[test]
fn failed_stage_is_named_in_manifest() {
    let csv = generate_synthetic(20, 20, 2.5, 4).unwrap().to_csv_string();
    let dir = tempfile::tempdir().unwrap();
    let err = run_pipeline_bytes(csv.as_bytes(), &small_config(4), dir.path()).unwrap_err();
    assert!(
        matches!(
            err,
            Error::Stage {
                stage: "sample",
                ..
            }
        ),
        "{err:?}"
    );
    assert!(err.is_input_error());
    let manifest = std::fs::read_to_string(dir.path().join(MANIFEST)).unwrap();
    assert!(manifest.contains("failed-stage: sample"));
}

#[test]
fn missing_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_pipeline_file(
        dir.path().join("absent.csv"),
        &small_config(0),
        dir.path().join("out"),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.is_input_error());
    assert!(!dir.path().join("out").exists());
}
