//! The `wmfcc` command line: synth, extract, train, eval, sweep, report.
//!
//! Every command is deterministic in its inputs, configuration and seed.
//! Data goes to files (or stdout for `report`); diagnostics go to stderr.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{
    build_synthetic_dataset, load_features, load_model, load_wav, persist_features, save_model,
    write_wav, DatasetManifest, DatasetSpec, FeatureTable, ModelFile,
};
use crate::error::{Error, Result};
use crate::eval::{
    all_coefficients, coefficient_sweep, make_folds, run_cross_validation_on, run_holdout_test,
    singleton_subsets, to_samples, EvalMode, HoldoutModel, MetricsReport, SweepEntry,
};
use crate::frontend::{CepstraMatrix, FrontendConfig, MfccExtractor};
use crate::nn::{Classifier, TrainConfig};
use crate::weighting::{
    fit_corpus_weights, make_voiceprint, voiceprint_with_weights, Label, UtteranceInfo, Voiceprint,
    Vowel, WeightVector, WeightingMode,
};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightingConfig {
    pub mode: WeightingMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Number of folds; `None` means leave-one-out.
    pub k: Option<usize>,
    pub stratified: bool,
    /// 1-based voiceprint positions; `None` uses all of them.
    pub coefficients: Option<Vec<usize>>,
    /// Subsets for `sweep`; `None` sweeps the singletons.
    pub sweep: Option<Vec<Vec<usize>>>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            k: Some(10),
            stratified: true,
            coefficients: None,
            sweep: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub manifest: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Everything a run depends on. Read from a TOML file with `[frontend]`,
/// `[weighting]`, `[net]`, `[eval]`, `[synth]` and `[paths]` sections;
/// command-line flags override file values. The top-level `seed` drives
/// synthesis, initialization, shuffling and fold assignment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub frontend: FrontendConfig,
    pub weighting: WeightingConfig,
    pub net: TrainConfig,
    pub eval: EvalConfig,
    pub synth: DatasetSpec,
    pub paths: PathsConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Train settings with the run seed applied.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.net.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.frontend.resolve(self.synth.sample_rate)?;
        self.synth.validate()?;
        if self.eval.k == Some(0) || self.eval.k == Some(1) {
            return Err(Error::InvalidConfig("eval.k must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wmfcc",
    version,
    about = "Entropy-weighted MFCC voice screening experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run seed for synthesis, fold assignment and training.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic sustained-vowel corpus (WAV files + manifest).
    Synth {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        subjects_pd: Option<usize>,
        #[arg(long)]
        subjects_healthy: Option<usize>,
        /// Comma-separated vowels, e.g. `a,o,u`.
        #[arg(long, value_delimiter = ',')]
        vowels: Option<Vec<Vowel>>,
        /// Multiplier on the group standard deviations (0 = preset voices).
        #[arg(long)]
        spread: Option<f64>,
    },
    /// Extract entropy-weighted voiceprints for every manifest entry.
    Extract {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Feature store to write.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Abort on the first unreadable entry instead of skipping it.
        #[arg(long)]
        strict: bool,
        /// Keep c1 in addition to c2..c(n+1).
        #[arg(long)]
        no_drop_c1: bool,
        /// Only entries of this vowel.
        #[arg(long)]
        vowel: Option<Vowel>,
        #[arg(long, value_enum)]
        weighting: Option<WeightingArg>,
    },
    /// Fit one model on the whole feature store.
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        /// Model file to write.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate, or score an independent test set with --test-set.
    Eval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        /// Report directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of folds.
        #[arg(long, conflicts_with = "loo")]
        k: Option<usize>,
        /// Leave-one-out (k = number of samples).
        #[arg(long)]
        loo: bool,
        /// Independent test feature store.
        #[arg(long)]
        test_set: Option<PathBuf>,
        /// Use this trained model for --test-set instead of training one.
        #[arg(long, requires = "test_set")]
        model: Option<PathBuf>,
    },
    /// Cross-validate coefficient subsets and rank them.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, conflicts_with = "loo")]
        k: Option<usize>,
        #[arg(long)]
        loo: bool,
        /// Subsets as `1,2;3;4,5`; default: every single coefficient.
        #[arg(long)]
        subsets: Option<String>,
    },
    /// Print the table of a saved report record.
    Report {
        /// `report.toml` written by eval or sweep.
        record: PathBuf,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct DataArgs {
    /// Feature store.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Only rows of this vowel.
    #[arg(long)]
    pub vowel: Option<Vowel>,
    /// 1-based coefficient positions, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub coefficients: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum WeightingArg {
    PerUtterance,
    Corpus,
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn required(flag: Option<PathBuf>, file: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or_else(|| file.clone())
        .ok_or_else(|| Error::Config(format!("no {name} given (flag or [paths] entry)")))
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth {
            common,
            out,
            subjects_pd,
            subjects_healthy,
            vowels,
            spread,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(n) = subjects_pd {
                cfg.synth.pd_subjects = n;
            }
            if let Some(n) = subjects_healthy {
                cfg.synth.healthy_subjects = n;
            }
            if let Some(v) = vowels {
                cfg.synth.vowels = v;
            }
            if let Some(s) = spread {
                cfg.synth.spread = s;
            }
            cmd_synth(&cfg, &out)
        }
        Command::Extract {
            common,
            manifest,
            out,
            strict,
            no_drop_c1,
            vowel,
            weighting,
        } => {
            let mut cfg = load_config(&common)?;
            if no_drop_c1 && cfg.frontend.drop_c1 {
                cfg.frontend.drop_c1 = false;
                cfg.frontend.num_ceps += 1;
            }
            if let Some(w) = weighting {
                cfg.weighting.mode = match w {
                    WeightingArg::PerUtterance => WeightingMode::PerUtterance,
                    WeightingArg::Corpus => WeightingMode::Corpus,
                };
            }
            let manifest = required(manifest, &cfg.paths.manifest, "manifest")?;
            let out = required(out, &cfg.paths.features, "output feature store")?;
            cmd_extract(&cfg, &manifest, &out, strict, vowel)
        }
        Command::Train { common, data, out } => {
            let mut cfg = load_config(&common)?;
            apply_data_args(&mut cfg, &data);
            let features = required(data.features, &cfg.paths.features, "feature store")?;
            let out = required(out, &cfg.paths.model, "output model file")?;
            cmd_train(&cfg, &features, data.vowel, &out)
        }
        Command::Eval {
            common,
            data,
            out,
            k,
            loo,
            test_set,
            model,
        } => {
            let mut cfg = load_config(&common)?;
            apply_data_args(&mut cfg, &data);
            apply_k(&mut cfg, k, loo);
            let features = required(data.features, &cfg.paths.features, "feature store")?;
            let out = required(out, &cfg.paths.out, "report directory")?;
            cmd_eval(
                &cfg,
                &features,
                data.vowel,
                &out,
                test_set.as_deref(),
                model.as_deref(),
            )
        }
        Command::Sweep {
            common,
            data,
            out,
            k,
            loo,
            subsets,
        } => {
            let mut cfg = load_config(&common)?;
            apply_data_args(&mut cfg, &data);
            apply_k(&mut cfg, k, loo);
            if let Some(s) = subsets {
                cfg.eval.sweep = Some(parse_subsets(&s)?);
            }
            let features = required(data.features, &cfg.paths.features, "feature store")?;
            let out = required(out, &cfg.paths.out, "report directory")?;
            cmd_sweep(&cfg, &features, data.vowel, &out)
        }
        Command::Report { record, out } => {
            let table = render_record(&RunRecord::load(&record)?);
            match out {
                Some(path) => fs::write(&path, table).map_err(|e| Error::io(&path, e)),
                None => {
                    print!("{table}");
                    Ok(())
                }
            }
        }
    }
}

fn apply_data_args(cfg: &mut ExperimentConfig, data: &DataArgs) {
    if let Some(c) = &data.coefficients {
        cfg.eval.coefficients = Some(c.clone());
    }
}

fn apply_k(cfg: &mut ExperimentConfig, k: Option<usize>, loo: bool) {
    if loo {
        cfg.eval.k = None;
    } else if let Some(k) = k {
        cfg.eval.k = Some(k);
    }
}

/// Parses `1,2;3;4,5` into subsets.
pub fn parse_subsets(text: &str) -> Result<Vec<Vec<usize>>> {
    text.split(';')
        .map(|group| {
            group
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("bad coefficient `{c}` in `{text}`")))
                })
                .collect()
        })
        .collect()
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn cmd_synth(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    if cfg.synth.pd_subjects == 0 {
        return Err(Error::InvalidConfig(
            "--subjects-pd must be at least 1".into(),
        ));
    }
    cfg.validate()?;
    let data = build_synthetic_dataset(&cfg.synth, cfg.seed)?;
    let wav_dir = out_dir.join("wav");
    fs::create_dir_all(&wav_dir).map_err(|e| Error::io(&wav_dir, e))?;
    data.manifest
        .entries
        .par_iter()
        .zip(&data.clips)
        .try_for_each(|(entry, clip)| write_wav(out_dir.join(&entry.source), clip, 16))?;
    data.manifest.write(out_dir.join("manifest.csv"))?;

    let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
    for e in &data.manifest.entries {
        *counts
            .entry((e.label.to_string(), e.vowel.to_string()))
            .or_default() += 1;
    }
    println!(
        "wrote {} clips and {}",
        data.clips.len(),
        out_dir.join("manifest.csv").display()
    );
    for ((label, vowel), n) in counts {
        println!("  {label:<8} /{vowel}/  {n}");
    }
    Ok(())
}

/// Reads, analyzes and weights every usable manifest entry.
///
/// Returns the feature table, the corpus weights when corpus weighting is
/// selected, and one warning per skipped entry.
pub fn extract_features(
    cfg: &ExperimentConfig,
    manifest_path: &Path,
    strict: bool,
    vowel: Option<Vowel>,
) -> Result<(FeatureTable, Option<WeightVector>, Vec<String>)> {
    let manifest = DatasetManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let entries: Vec<_> = manifest
        .entries
        .iter()
        .filter(|e| vowel.is_none_or(|v| e.vowel == v))
        .collect();

    let analyzed: Vec<Result<(UtteranceInfo, CepstraMatrix)>> = entries
        .par_iter()
        .map(|e| {
            let path = manifest.resolve(base, e);
            let clip = load_wav(&path)?;
            let extractor = MfccExtractor::new(&cfg.frontend, clip.sample_rate())?;
            let cepstra = extractor
                .extract(&clip)
                .map_err(|err| Error::InvalidInput(format!("{}: {err}", path.display())))?;
            let info = UtteranceInfo {
                subject_id: e.subject_id.clone(),
                vowel: e.vowel,
                label: e.label,
            };
            Ok((info, cepstra))
        })
        .collect();

    let mut warnings = Vec::new();
    let mut usable = Vec::new();
    for (entry, result) in entries.iter().zip(analyzed) {
        match result {
            Ok((info, cepstra)) => {
                eprintln!("{}: {} frames", entry.source, cepstra.rows());
                usable.push((info, cepstra));
            }
            Err(e) if strict => return Err(e),
            Err(e) => {
                let msg = format!("skipping {} ({}): {e}", entry.source, entry.subject_id);
                eprintln!("warning: {msg}");
                warnings.push(msg);
            }
        }
    }
    if usable.is_empty() {
        return Err(Error::InvalidInput(
            "no manifest entry could be read".into(),
        ));
    }

    let corpus_weights = match cfg.weighting.mode {
        WeightingMode::PerUtterance => None,
        WeightingMode::Corpus => {
            let matrices: Vec<CepstraMatrix> = usable.iter().map(|(_, c)| c.clone()).collect();
            Some(fit_corpus_weights(&matrices)?)
        }
    };
    let voiceprints = usable
        .into_iter()
        .map(|(info, cepstra)| match &corpus_weights {
            Some(w) => voiceprint_with_weights(&cepstra, w, info),
            None => make_voiceprint(&cepstra, info),
        })
        .collect::<Result<Vec<Voiceprint>>>()?;
    let table = FeatureTable::new(cfg.frontend.first_coefficient(), voiceprints)?;
    Ok((table, corpus_weights, warnings))
}

pub fn cmd_extract(
    cfg: &ExperimentConfig,
    manifest: &Path,
    out: &Path,
    strict: bool,
    vowel: Option<Vowel>,
) -> Result<()> {
    let (table, weights, warnings) = extract_features(cfg, manifest, strict, vowel)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    persist_features(out, &table)?;
    if let Some(w) = weights {
        let mut text = String::from("coefficient,weight,entropy\n");
        for (j, (wj, ej)) in w.weights.iter().zip(&w.entropies).enumerate() {
            text.push_str(&format!("c{},{wj:?},{ej:?}\n", table.first_coefficient + j));
        }
        write_file(&weights_sidecar(out), text)?;
    }
    println!(
        "wrote {} voiceprints of {} coefficients to {}",
        table.len(),
        table.dim(),
        out.display()
    );
    if !warnings.is_empty() {
        eprintln!("{} entries skipped", warnings.len());
    }
    Ok(())
}

/// `features.csv` → `features.weights.csv`.
pub fn weights_sidecar(features: &Path) -> PathBuf {
    let stem = features.file_stem().unwrap_or_default().to_string_lossy();
    features.with_file_name(format!("{stem}.weights.csv"))
}

struct LoadedFeatures {
    table: FeatureTable,
    sha256: String,
}

fn load_table(path: &Path, vowel: Option<Vowel>) -> Result<LoadedFeatures> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let mut table = load_features(path)?;
    if let Some(v) = vowel {
        table.voiceprints.retain(|vp| vp.vowel == v);
    }
    if table.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{}: no voiceprints{}",
            path.display(),
            vowel.map(|v| format!(" for vowel {v}")).unwrap_or_default()
        )));
    }
    Ok(LoadedFeatures { table, sha256 })
}

fn subset_for(cfg: &ExperimentConfig, dim: usize) -> Vec<usize> {
    cfg.eval
        .coefficients
        .clone()
        .unwrap_or_else(|| all_coefficients(dim))
}

pub fn cmd_train(
    cfg: &ExperimentConfig,
    features: &Path,
    vowel: Option<Vowel>,
    out: &Path,
) -> Result<()> {
    let data = load_table(features, vowel)?;
    let subset = subset_for(cfg, data.table.dim());
    let train_cfg = cfg.train_config();
    let samples = to_samples(&data.table.voiceprints, &subset)?;
    let (classifier, trace) = Classifier::fit(&samples, &train_cfg)?;
    let model = ModelFile::new(&classifier, subset, data.table.first_coefficient, train_cfg);
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    save_model(out, &model)?;
    eprintln!(
        "trained {:?} on {} samples: {} updates, final loss {:.6}",
        model.layer_sizes,
        samples.len(),
        trace.total_updates(),
        trace.final_loss().unwrap_or(f64::NAN)
    );
    println!("wrote {}", out.display());
    Ok(())
}

/// Machine-readable record of one eval or sweep run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub tool_version: String,
    pub features: String,
    pub features_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_set: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_set_sha256: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_sha256: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vowel: Option<Vowel>,
    pub seed: u64,
    pub first_coefficient: usize,
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval: Option<MetricsReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepEntry>,
}

impl RunRecord {
    fn new(
        command: &str,
        cfg: &ExperimentConfig,
        features: &Path,
        data: &LoadedFeatures,
        vowel: Option<Vowel>,
    ) -> Self {
        Self {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            features: features.display().to_string(),
            features_sha256: data.sha256.clone(),
            test_set: None,
            test_set_sha256: None,
            model_sha256: None,
            vowel,
            seed: cfg.seed,
            first_coefficient: data.table.first_coefficient,
            config: cfg.clone(),
            eval: None,
            sweep: Vec::new(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn write(&self, dir: &Path) -> Result<()> {
        write_file(&dir.join("report.toml"), self.to_toml()?)?;
        write_file(&dir.join("report.txt"), render_record(self))
    }
}

fn fold_plan(cfg: &ExperimentConfig, table: &FeatureTable) -> Result<crate::eval::FoldPlan> {
    let n = table.len();
    let k = cfg.eval.k.unwrap_or(n);
    if k > n {
        return Err(Error::InvalidConfig(format!(
            "{k} folds requested for {n} samples"
        )));
    }
    let labels: Vec<Label> = table.voiceprints.iter().map(|v| v.label).collect();
    make_folds(
        n,
        k,
        cfg.seed,
        cfg.eval.stratified.then_some(labels.as_slice()),
    )
}

pub fn cmd_eval(
    cfg: &ExperimentConfig,
    features: &Path,
    vowel: Option<Vowel>,
    out: &Path,
    test_set: Option<&Path>,
    model: Option<&Path>,
) -> Result<()> {
    let data = load_table(features, vowel)?;
    let mut record = RunRecord::new("eval", cfg, features, &data, vowel);
    let train_cfg = cfg.train_config();
    let report = match test_set {
        None => {
            let subset = subset_for(cfg, data.table.dim());
            let plan = fold_plan(cfg, &data.table)?;
            run_cross_validation_on(&data.table.voiceprints, &subset, &train_cfg, &plan)?
        }
        Some(test_path) => {
            let test = load_table(test_path, vowel)?;
            record.test_set = Some(test_path.display().to_string());
            record.test_set_sha256 = Some(test.sha256.clone());
            match model {
                Some(model_path) => {
                    let bytes = fs::read(model_path).map_err(|e| Error::io(model_path, e))?;
                    record.model_sha256 = Some(hex::encode(Sha256::digest(&bytes)));
                    let m = load_model(model_path)?;
                    let classifier = m.classifier()?;
                    run_holdout_test(
                        HoldoutModel::Trained(&classifier),
                        &test.table.voiceprints,
                        &m.coefficients_used,
                    )?
                }
                None => {
                    let subset = subset_for(cfg, data.table.dim());
                    run_holdout_test(
                        HoldoutModel::Train {
                            data: &data.table.voiceprints,
                            cfg: &train_cfg,
                        },
                        &test.table.voiceprints,
                        &subset,
                    )?
                }
            }
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    record.eval = Some(report);
    record.write(out)?;
    print!("{}", render_record(&record));
    Ok(())
}

pub fn cmd_sweep(
    cfg: &ExperimentConfig,
    features: &Path,
    vowel: Option<Vowel>,
    out: &Path,
) -> Result<()> {
    let data = load_table(features, vowel)?;
    let candidates = cfg
        .eval
        .sweep
        .clone()
        .unwrap_or_else(|| singleton_subsets(data.table.dim()));
    let plan = fold_plan(cfg, &data.table)?;
    let entries = coefficient_sweep(
        &data.table.voiceprints,
        &candidates,
        &cfg.train_config(),
        &plan,
    )?;
    let mut record = RunRecord::new("sweep", cfg, features, &data, vowel);
    record.sweep = entries;
    record.write(out)?;
    print!("{}", render_record(&record));
    Ok(())
}

fn coefficient_names(positions: &[usize], first: usize) -> String {
    positions
        .iter()
        .map(|p| format!("c{}", first + p - 1))
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_metrics(out: &mut String, r: &MetricsReport) {
    let c = &r.counts;
    out.push_str(&format!(
        "\n                 predicted healthy  predicted PD\n  healthy        {:>17}  {:>12}\n  PD             {:>17}  {:>12}\n\n",
        c.tp, c.fn_, c.fp, c.tn
    ));
    let m = &r.pooled;
    for (name, value) in [
        ("accuracy", m.accuracy),
        ("sensitivity", m.sensitivity),
        ("specificity", m.specificity),
        ("MCC", m.mcc),
        ("PE", m.pe),
    ] {
        out.push_str(&format!("  {name:<12} {value:.4}\n"));
    }
    if !m.undefined.is_empty() {
        out.push_str(&format!(
            "  undefined (reported as 0): {}\n",
            m.undefined.join(", ")
        ));
    }
    if let Some(avg) = &r.fold_average {
        out.push_str(&format!(
            "  fold average: accuracy {:.4}, sensitivity {:.4}, specificity {:.4}, MCC {:.4}\n",
            avg.accuracy, avg.sensitivity, avg.specificity, avg.mcc
        ));
    }
    for w in &r.warnings {
        out.push_str(&format!("  warning: {w}\n"));
    }
}

/// Human-readable table for a run record.
pub fn render_record(r: &RunRecord) -> String {
    let mut out = String::new();
    let header = match (&r.eval, r.command.as_str()) {
        (Some(e), _) => format!("wmfcc eval: {}", e.mode.describe(e.folds_k)),
        (None, "sweep") => {
            let k = r.sweep.first().map_or(0, |s| s.report.folds_k);
            let mode = r.sweep.first().map_or(EvalMode::KFold, |s| s.report.mode);
            format!(
                "wmfcc sweep: {} subsets, {}",
                r.sweep.len(),
                mode.describe(k)
            )
        }
        (None, other) => format!("wmfcc {other}"),
    };
    out.push_str(&header);
    out.push('\n');
    out.push_str(&format!(
        "  features      {}  sha256 {}\n",
        r.features, r.features_sha256
    ));
    if let (Some(t), Some(h)) = (&r.test_set, &r.test_set_sha256) {
        out.push_str(&format!("  test set      {t}  sha256 {h}\n"));
    }
    if let Some(v) = r.vowel {
        out.push_str(&format!("  vowel         {v}\n"));
    }
    out.push_str(&format!("  seed          {}\n", r.seed));
    if let Some(e) = &r.eval {
        out.push_str(&format!("  samples       {}\n", e.samples));
        out.push_str(&format!(
            "  coefficients  {}\n",
            coefficient_names(&e.coefficients_used, r.first_coefficient)
        ));
        render_metrics(&mut out, e);
    }
    if !r.sweep.is_empty() {
        out.push_str(&format!(
            "\n  {:>4}  {:<24} {:>8} {:>11} {:>11} {:>8} {:>8}\n",
            "rank", "coefficients", "accuracy", "sensitivity", "specificity", "MCC", "PE"
        ));
        for (i, s) in r.sweep.iter().enumerate() {
            let m = &s.report.pooled;
            out.push_str(&format!(
                "  {:>4}  {:<24} {:>8.4} {:>11.4} {:>11.4} {:>8.4} {:>8.4}\n",
                i + 1,
                coefficient_names(&s.subset, r.first_coefficient),
                m.accuracy,
                m.sensitivity,
                m.specificity,
                m.mcc,
                m.pe
            ));
        }
    }
    out
}
