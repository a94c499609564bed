mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use dispute_core::classifier::{
    accuracy, Classifier, Family, MlpTrainer, SvmTrainer, TrainedModel, Trainer,
};
use dispute_core::data::{
    fit_normalize, generate, read_dataset, write_dataset, Dataset, SyntheticConfig,
};
use dispute_core::evaluation::{
    auc, auc_standard_error, confusion, estimate_auc_correlation, roc_points, AucComparison,
};
use dispute_core::mlp::{train_mlp, TrainConfig};
use dispute_core::model_io::ModelFile;
use dispute_core::pipeline::{run_pipeline_file, PipelineConfig, MANIFEST};
use dispute_core::report::Stamp;
use dispute_core::selection::{grid_search, GridSpec};
use dispute_core::sensitivity::{
    experiment_one, experiment_one_csv, experiment_one_text, experiment_two,
    single_variable_ranking,
};
use dispute_core::svm::{smo_solve, KernelSpec, SmoConfig};
use dispute_core::{SpecSet, Variable};

use config::{pick, FileConfig};

#[derive(Parser)]
#[command(
    name = "dispute",
    version,
    about = "Conflict prediction with MLP and SVM classifiers"
)]
struct Cli {
    /// TOML file with default parameters; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dyad-year dataset.
    Synth(SynthArgs),
    /// Train one model on a dataset and save it.
    Train(TrainArgs),
    /// Cross-validated (C, gamma) grid search for the RBF SVM.
    GridSearch(GridArgs),
    /// Confusion counts, ROC and AUC comparison on a test set.
    Evaluate(EvaluateArgs),
    /// Extreme-profile, perturbation and single-variable reports.
    Sensitivity(SensitivityArgs),
    /// Full run: sample, normalize, select, train, evaluate, analyse.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 2000)]
    peace: usize,
    #[arg(long, default_value_t = 2000)]
    conflict: usize,
    #[arg(long, default_value_t = 3.0)]
    separation: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated variables that carry signal.
    #[arg(long, value_delimiter = ',')]
    informative: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long = "model", value_name = "mlp|svm")]
    family: Family,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Use a linear kernel instead of RBF.
    #[arg(long)]
    linear: bool,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    cycles: Option<usize>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    c_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    gamma_values: Option<Vec<f64>>,
    /// Write the CV table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Write the ROC curve as TSV.
    #[arg(long)]
    roc: Option<PathBuf>,
    /// Second model for the correlated AUC z test.
    #[arg(long)]
    compare: Option<PathBuf>,
    /// Correlation between the two AUCs; estimated from the scores if absent.
    #[arg(long, requires = "compare")]
    r: Option<f64>,
}

#[derive(Args)]
struct SensitivityArgs {
    #[arg(long)]
    model: PathBuf,
    /// Test set (raw values).
    #[arg(long)]
    data: PathBuf,
    /// Training set for the single-variable ranking; skipped if absent.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Directory for the report files; printed to stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Training records per class.
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
}

/// Exit status for a failed command: 1 if a computation failed, 2 for bad
/// usage or input.
fn exit_status(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<dispute_core::Error>() {
        Some(e) if !e.is_input_error() => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Synth(a) => synth(a, &file),
        Command::Train(a) => train(a, &file),
        Command::GridSearch(a) => grid(a, &file),
        Command::Evaluate(a) => evaluate(a),
        Command::Sensitivity(a) => sensitivity(a, &file),
        Command::Pipeline(a) => pipeline(a, &file),
    }
}

/// Reads a dataset file, returning its bytes too for the report digest.
fn read_data(path: &Path) -> anyhow::Result<(Dataset, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| dispute_core::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let ds = read_dataset(bytes.as_slice(), SpecSet::default())?;
    Ok((ds, bytes))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn smo_config(file: &FileConfig, seed: u64) -> SmoConfig {
    let d = SmoConfig::default();
    SmoConfig {
        kkt_tol: file.kkt_tol.unwrap_or(d.kkt_tol),
        max_passes: file.max_passes.unwrap_or(d.max_passes),
        seed,
    }
}

fn synth(a: SynthArgs, file: &FileConfig) -> anyhow::Result<()> {
    let seed = pick(a.seed, &file.seed, 0);
    let mut cfg = SyntheticConfig::new(a.peace, a.conflict, a.separation, seed);
    if !a.informative.is_empty() {
        let vars = a
            .informative
            .iter()
            .map(|n| {
                Variable::from_name(n).ok_or_else(|| anyhow::anyhow!("unknown variable `{n}`"))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        cfg = cfg.informative(&vars);
    }
    let ds = generate(&cfg)?;
    write_dataset(&ds, &a.out)?;
    println!("wrote {} records to {}", ds.len(), a.out.display());
    Ok(())
}

fn train(a: TrainArgs, file: &FileConfig) -> anyhow::Result<()> {
    let seed = pick(a.seed, &file.seed, 0);
    let (raw, bytes) = read_data(&a.data)?;
    let ds = fit_normalize(&raw)?;
    let (x, y) = (ds.features(), ds.labels());
    let stamp = Stamp::new(seed, &bytes);
    let mut summary = String::new();

    let model = match a.family {
        Family::Svm => {
            let c = pick(a.c, &file.c, 1.0);
            let kernel = if a.linear {
                KernelSpec::Linear
            } else {
                KernelSpec::rbf(pick(a.gamma, &file.gamma, 1.0))?
            };
            let m = smo_solve(&x, &y, kernel, c, &smo_config(file, seed))?;
            let _ = writeln!(summary, "family: svm\nkernel: {kernel}\nC: {c}");
            let _ = writeln!(summary, "support vectors: {}", m.n_support());
            TrainedModel::Svm(m)
        }
        Family::Mlp => {
            let cfg = TrainConfig {
                cycles: pick(a.cycles, &file.cycles, 100),
                seed,
                ..TrainConfig::default()
            };
            let hidden = pick(a.hidden, &file.hidden, 10);
            let (net, trace) = train_mlp(&x, &y, hidden, &cfg)?;
            let _ = writeln!(
                summary,
                "family: mlp\nhidden units: {hidden}\ncycles: {}",
                cfg.cycles
            );
            let _ = writeln!(summary, "accepted steps: {}", trace.accepted);
            summary.push_str("loss trace:");
            for l in &trace.losses {
                let _ = write!(summary, " {l:.6}");
            }
            summary.push('\n');
            TrainedModel::Mlp(net)
        }
    };
    let acc = accuracy(&model, &x, &y)?;
    let _ = writeln!(summary, "training accuracy: {acc:.4}");
    ModelFile::new(model, ds.normalizer().copied(), seed).save(&a.out)?;
    let _ = writeln!(summary, "model: {}", a.out.display());
    print!("{}", stamp.wrap(&summary));
    Ok(())
}

fn grid(a: GridArgs, file: &FileConfig) -> anyhow::Result<()> {
    let seed = pick(a.seed, &file.seed, 0);
    let (raw, bytes) = read_data(&a.data)?;
    let ds = fit_normalize(&raw)?;
    let default = GridSpec::default_grid(seed);
    let spec = GridSpec {
        c_values: pick(a.c_values, &file.c_values, default.c_values),
        gamma_values: pick(a.gamma_values, &file.gamma_values, default.gamma_values),
        k: pick(a.k, &file.k, default.k),
        seed,
    };
    let cv = grid_search(&ds, &spec, &smo_config(file, seed))?;
    let text = Stamp::new(seed, &bytes).wrap(&cv.to_csv());
    match a.out {
        Some(path) => {
            write_text(&path, &text)?;
            println!(
                "best C={} gamma={} mean accuracy {:.4}",
                cv.best_c, cv.best_gamma, cv.best_mean_accuracy
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

/// Loads a model and puts `raw` on the scale it was trained on.
fn load_model_for(path: &Path, raw: &Dataset) -> anyhow::Result<(ModelFile, Dataset)> {
    let mf = ModelFile::load(path)?;
    let ds = match &mf.normalizer {
        Some(n) => n.apply(raw)?,
        None => raw.clone(),
    };
    Ok((mf, ds))
}

fn evaluate(a: EvaluateArgs) -> anyhow::Result<()> {
    let (raw, bytes) = read_data(&a.data)?;
    let (mf, ds) = load_model_for(&a.model, &raw)?;
    let (x, y) = (ds.features(), ds.labels());
    let stamp = Stamp::new(mf.seed, &bytes);

    let cm = confusion(&mf.model.predict_all(&x)?, &y)?;
    let mut out = cm.report(&mf.model.family().to_string().to_uppercase());
    let _ = writeln!(
        out,
        "conflict accuracy: {:.4}\npeace accuracy: {:.4}",
        cm.conflict_accuracy(),
        cm.peace_accuracy()
    );

    if a.roc.is_some() || a.compare.is_some() {
        let scores = mf.model.scores(&x)?;
        let curve = roc_points(&scores, &y)?;
        let a1 = auc(&curve);
        let se1 = auc_standard_error(a1, curve.n_conflict(), curve.n_peace());
        match &se1 {
            Ok(se) => {
                let _ = writeln!(out, "AUC: {a1:.4} +/- {se:.5}");
            }
            Err(e) => {
                let _ = writeln!(out, "AUC: {a1:.4} ({e})");
            }
        }
        if let Some(path) = &a.roc {
            write_text(path, &stamp.wrap(&curve.to_tsv()))?;
        }
        if let Some(other) = &a.compare {
            let (mf2, ds2) = load_model_for(other, &raw)?;
            let scores2 = mf2.model.scores(&ds2.features())?;
            let a2 = auc(&roc_points(&scores2, &y)?);
            let se2 = auc_standard_error(a2, curve.n_conflict(), curve.n_peace())?;
            let r = match a.r {
                Some(r) => r,
                None => estimate_auc_correlation(&scores, &scores2, &y, a1, a2)?,
            };
            let cmp = AucComparison::new(a1, se1?, a2, se2, r)?;
            out.push_str(&cmp.report(&a.model.display().to_string(), &other.display().to_string()));
        }
    }
    print!("{}", stamp.wrap(&out));
    Ok(())
}

fn retrainer(mf: &ModelFile, file: &FileConfig) -> Box<dyn Trainer> {
    match &mf.model {
        TrainedModel::Svm(m) => Box::new(SvmTrainer {
            kernel: m.kernel,
            c: m.c,
            config: smo_config(file, mf.seed),
        }),
        TrainedModel::Mlp(net) => Box::new(MlpTrainer {
            hidden: net.hidden,
            config: TrainConfig {
                cycles: file.cycles.unwrap_or(100),
                seed: mf.seed,
                ..TrainConfig::default()
            },
        }),
    }
}

fn sensitivity(a: SensitivityArgs, file: &FileConfig) -> anyhow::Result<()> {
    let (raw, bytes) = read_data(&a.data)?;
    let (mf, test) = load_model_for(&a.model, &raw)?;
    let Some(norm) = mf.normalizer else {
        bail!("model file carries no normalizer; sensitivity needs the training bounds");
    };
    let stamp = Stamp::new(mf.seed, &bytes);
    let one = experiment_one(&mf.model, &norm)?;
    let two = experiment_two(&mf.model, &test)?;
    let mut reports = vec![
        ("experiment_one.txt", experiment_one_text(&one)),
        ("experiment_one.csv", experiment_one_csv(&one)),
        ("experiment_two.txt", two.to_text()),
        ("experiment_two.csv", two.to_csv()),
    ];
    if let Some(train_path) = &a.train {
        let (train_raw, _) = read_data(train_path)?;
        let train = norm.apply(&train_raw)?;
        let ranking = single_variable_ranking(retrainer(&mf, file).as_ref(), &train, &test)?;
        reports.push(("ranking.txt", ranking.to_text()));
        reports.push(("ranking.csv", ranking.to_csv()));
    }
    match &a.out {
        Some(dir) => {
            for (name, body) in &reports {
                write_text(&dir.join(name), &stamp.wrap(body))?;
            }
            println!("wrote {} reports to {}", reports.len(), dir.display());
        }
        None => {
            let mut text = stamp.header();
            for (name, body) in reports.iter().filter(|(n, _)| n.ends_with(".txt")) {
                let _ = writeln!(text, "\n== {} ==", name.trim_end_matches(".txt"));
                text.push_str(body);
            }
            print!("{text}");
        }
    }
    Ok(())
}

fn pipeline(a: PipelineArgs, file: &FileConfig) -> anyhow::Result<()> {
    let seed = pick(a.seed, &file.seed, 0);
    let mut cfg = PipelineConfig::standard(seed);
    cfg.n_per_class = pick(a.classes, &file.classes, cfg.n_per_class);
    cfg.hidden = pick(a.hidden, &file.hidden, cfg.hidden);
    cfg.train.cycles = pick(a.cycles, &file.cycles, cfg.train.cycles);
    cfg.grid.k = pick(a.k, &file.k, cfg.grid.k);
    if let Some(c) = &file.c_values {
        cfg.grid.c_values = c.clone();
    }
    if let Some(g) = &file.gamma_values {
        cfg.grid.gamma_values = g.clone();
    }
    cfg.smo = smo_config(file, seed);

    let out = run_pipeline_file(&a.data, &cfg, &a.out)?;
    println!(
        "SVM (C={}, gamma={}): conflict {:.4} peace {:.4} AUC {:.4}",
        out.cv.best_c,
        out.cv.best_gamma,
        out.svm.confusion.conflict_accuracy(),
        out.svm.confusion.peace_accuracy(),
        out.svm.auc
    );
    println!(
        "MLP (M={}): conflict {:.4} peace {:.4} AUC {:.4}",
        cfg.hidden,
        out.mlp.confusion.conflict_accuracy(),
        out.mlp.confusion.peace_accuracy(),
        out.mlp.auc
    );
    if let Some(c) = &out.comparison {
        println!(
            "z = {:.3} ({})",
            c.z,
            if c.significant() {
                "significant"
            } else {
                "not significant"
            }
        );
    }
    println!(
        "{} artifacts, manifest {}",
        out.artifacts.len(),
        a.out.join(MANIFEST).display()
    );
    Ok(())
}
