//! End-to-end run: balanced split, scaling, SVM grid search, MLP training,
//! evaluation and sensitivity reports, all under one seed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::classifier::{Classifier, MlpTrainer, SvmTrainer, TrainedModel, Trainer};
use crate::data::{balanced_sample, fit_normalize, read_dataset, Dataset, SpecSet};
use crate::error::{Error, Result};
use crate::evaluation::{
    auc, auc_standard_error, confusion, estimate_auc_correlation, roc_points, AucComparison,
    ConfusionMatrix,
};
use crate::mlp::TrainConfig;
use crate::model_io::ModelFile;
use crate::report::{sha256_hex, Stamp};
use crate::selection::{grid_search, CvResult, GridSpec};
use crate::sensitivity::{
    experiment_one, experiment_one_csv, experiment_one_text, experiment_two,
    single_variable_ranking, RankingTable,
};
use crate::svm::{KernelSpec, SmoConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub n_per_class: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub smo: SmoConfig,
    pub hidden: usize,
    pub train: TrainConfig,
}

impl PipelineConfig {
    /// 500 per class, default grid, M = 10 and 100 SCG cycles.
    pub fn standard(seed: u64) -> Self {
        PipelineConfig {
            n_per_class: 500,
            seed,
            grid: GridSpec::default_grid(seed),
            smo: SmoConfig {
                seed,
                ..SmoConfig::default()
            },
            hidden: 10,
            train: TrainConfig {
                seed,
                ..TrainConfig::default()
            },
        }
    }
}

/// Per-family results on the test split.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyResult {
    pub model: TrainedModel,
    pub confusion: ConfusionMatrix,
    pub auc: f64,
    pub auc_se: Option<f64>,
    pub ranking: RankingTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome {
    pub cv: CvResult,
    pub svm: FamilyResult,
    pub mlp: FamilyResult,
    pub comparison: Option<AucComparison>,
    /// `(file name, sha256)` of every artifact, manifest excluded.
    pub artifacts: Vec<(String, String)>,
    pub out_dir: PathBuf,
}

pub const MANIFEST: &str = "manifest.txt";

struct Writer<'a> {
    dir: &'a Path,
    stamp: &'a Stamp,
    artifacts: Vec<(String, String)>,
}

impl Writer<'_> {
    fn emit(&mut self, name: &str, body: &str) -> Result<()> {
        self.emit_raw(name, &self.stamp.wrap(body))
    }

    fn emit_raw(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.artifacts
            .push((name.to_string(), sha256_hex(text.as_bytes())));
        Ok(())
    }

    fn manifest(&self, status: &str) -> Result<()> {
        let mut body = self.stamp.header();
        let _ = writeln!(body, "status: {status}");
        for (name, digest) in &self.artifacts {
            let _ = writeln!(body, "{digest}  {name}");
        }
        let path = self.dir.join(MANIFEST);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> std::result::Result<T, (&'static str, Error)> {
    r.map_err(|e| (name, e))
}

/// Runs the pipeline on a dataset CSV file.
pub fn run_pipeline_file(
    data: impl AsRef<Path>,
    cfg: &PipelineConfig,
    out_dir: impl AsRef<Path>,
) -> Result<PipelineOutcome> {
    let path = data.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    run_pipeline_bytes(&bytes, cfg, out_dir)
}

/// Runs the pipeline on CSV bytes already in memory.
pub fn run_pipeline_bytes(
    csv: &[u8],
    cfg: &PipelineConfig,
    out_dir: impl AsRef<Path>,
) -> Result<PipelineOutcome> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stamp = Stamp::new(cfg.seed, csv);
    let mut writer = Writer {
        dir,
        stamp: &stamp,
        artifacts: Vec::new(),
    };
    match run_stages(csv, cfg, &mut writer) {
        Ok((cv, svm, mlp, comparison)) => {
            writer.manifest("ok")?;
            Ok(PipelineOutcome {
                cv,
                svm,
                mlp,
                comparison,
                artifacts: writer.artifacts,
                out_dir: dir.to_path_buf(),
            })
        }
        Err((name, e)) => {
            writer.manifest(&format!("failed\nfailed-stage: {name}\nerror: {e}"))?;
            Err(Error::Stage {
                stage: name,
                source: Box::new(e),
            })
        }
    }
}

type StageResult<T> = std::result::Result<T, (&'static str, Error)>;

fn run_stages(
    csv: &[u8],
    cfg: &PipelineConfig,
    w: &mut Writer<'_>,
) -> StageResult<(CvResult, FamilyResult, FamilyResult, Option<AucComparison>)> {
    let ds = stage("load", read_dataset(csv, SpecSet::default()))?;
    let (train_raw, test_raw) = stage("sample", balanced_sample(&ds, cfg.n_per_class, cfg.seed))?;
    let train = stage("normalize", fit_normalize(&train_raw))?;
    let normalizer = *train.normalizer().expect("normalized");
    let test = stage("normalize", normalizer.apply(&test_raw))?;
    if test.is_empty() {
        return Err(("normalize", Error::EmptyDataset));
    }

    let cv = stage("grid-search", grid_search(&train, &cfg.grid, &cfg.smo))?;
    stage("grid-search", w.emit("cv_svm.csv", &cv.to_csv()))?;

    let (x_train, y_train) = (train.features(), train.labels());
    let svm_trainer = SvmTrainer {
        kernel: KernelSpec::Rbf {
            gamma: cv.best_gamma,
        },
        c: cv.best_c,
        config: cfg.smo,
    };
    let svm_model = stage("train-svm", svm_trainer.fit(&x_train, &y_train))?;
    let mlp_trainer = MlpTrainer {
        hidden: cfg.hidden,
        config: cfg.train,
    };
    let mlp_model = stage("train-mlp", mlp_trainer.fit(&x_train, &y_train))?;

    let mut families = Vec::new();
    let mut scores = Vec::new();
    for (trainer, model) in [
        (&svm_trainer as &dyn Trainer, svm_model),
        (&mlp_trainer as &dyn Trainer, mlp_model),
    ] {
        let fam = model.family().as_str();
        stage(
            "write-model",
            ModelFile::new(model.clone(), Some(normalizer), cfg.seed)
                .to_text()
                .and_then(|text| w.emit_raw(&format!("{fam}.model"), &text)),
        )?;
        let (result, s) = stage("evaluate", evaluate_family(&model, &test))?;
        let curve = stage("evaluate", roc_points(&s, &test.labels()))?;
        stage(
            "evaluate",
            w.emit(&format!("roc_{fam}.tsv"), &curve.to_tsv()),
        )?;

        let one = stage("sensitivity", experiment_one(&model, &normalizer))?;
        stage(
            "sensitivity",
            w.emit(
                &format!("experiment_one_{fam}.txt"),
                &experiment_one_text(&one),
            ),
        )?;
        stage(
            "sensitivity",
            w.emit(
                &format!("experiment_one_{fam}.csv"),
                &experiment_one_csv(&one),
            ),
        )?;
        let two = stage("sensitivity", experiment_two(&model, &test))?;
        stage(
            "sensitivity",
            w.emit(&format!("experiment_two_{fam}.txt"), &two.to_text()),
        )?;
        stage(
            "sensitivity",
            w.emit(&format!("experiment_two_{fam}.csv"), &two.to_csv()),
        )?;
        let ranking = stage(
            "sensitivity",
            single_variable_ranking(trainer, &train, &test),
        )?;
        stage(
            "sensitivity",
            w.emit(&format!("ranking_{fam}.txt"), &ranking.to_text()),
        )?;
        stage(
            "sensitivity",
            w.emit(&format!("ranking_{fam}.csv"), &ranking.to_csv()),
        )?;

        families.push(FamilyResult { ranking, ..result });
        scores.push(s);
    }
    let mlp = families.pop().expect("two families");
    let svm = families.pop().expect("two families");

    let comparison = match (svm.auc_se, mlp.auc_se) {
        (Some(se1), Some(se2)) => {
            estimate_auc_correlation(&scores[0], &scores[1], &test.labels(), svm.auc, mlp.auc)
                .and_then(|r| AucComparison::new(svm.auc, se1, mlp.auc, se2, r))
                .ok()
        }
        _ => None,
    };

    let mut summary = String::new();
    for (name, f) in [("Support Vector Machine", &svm), ("Neural Network", &mlp)] {
        summary.push_str(&f.confusion.report(name));
        match f.auc_se {
            Some(se) => {
                let _ = writeln!(summary, "AUC: {:.4} +/- {:.5}\n", f.auc, se);
            }
            None => {
                let _ = writeln!(summary, "AUC: {:.4} (standard error undefined)\n", f.auc);
            }
        }
    }
    let _ = writeln!(
        summary,
        "selected SVM: C={} gamma={} (cv accuracy {:.4})",
        cv.best_c, cv.best_gamma, cv.best_mean_accuracy
    );
    stage("evaluate", w.emit("confusion.txt", &summary))?;
    let comparison_text = match &comparison {
        Some(c) => c.report("SVM", "NN"),
        None => "comparison unavailable (degenerate AUC or correlation)\n".to_string(),
    };
    stage("evaluate", w.emit("comparison.txt", &comparison_text))?;

    Ok((cv, svm, mlp, comparison))
}

fn evaluate_family(model: &TrainedModel, test: &Dataset) -> Result<(FamilyResult, Vec<f64>)> {
    let x = test.features();
    let y = test.labels();
    let predicted = model.predict_all(&x)?;
    let cm = confusion(&predicted, &y)?;
    let scores = model.scores(&x)?;
    let curve = roc_points(&scores, &y)?;
    let a = auc(&curve);
    let se = auc_standard_error(a, curve.n_conflict(), curve.n_peace()).ok();
    Ok((
        FamilyResult {
            model: model.clone(),
            confusion: cm,
            auc: a,
            auc_se: se,
            ranking: RankingTable {
                rows: vec![],
                failed: vec![],
            },
        },
        scores,
    ))
}
