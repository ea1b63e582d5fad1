//! Cross-validation, confusion counts and diagnosis metrics.
//!
//! Healthy is the positive class: a true positive is a healthy speaker
//! classified as healthy, a true negative a PD speaker classified as PD.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Classifier, Sample, TrainConfig};
use crate::weighting::{Label, Voiceprint};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        Self { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// Actual positives (healthy speakers).
    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    /// Actual negatives (PD speakers).
    pub fn negatives(&self) -> u64 {
        self.tn + self.fp
    }

    pub fn add(&mut self, other: &ConfusionCounts) {
        self.tp += other.tp;
        self.tn += other.tn;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    /// The same outcomes with the positive class flipped.
    pub fn swapped(&self) -> Self {
        Self::new(self.tn, self.tp, self.fn_, self.fp)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub mcc: f64,
    pub pe: f64,
    /// Metrics whose denominator vanished and were set to 0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

pub fn confusion(truth: &[Label], predicted: &[Label]) -> Result<ConfusionCounts> {
    if truth.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: predicted.len(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (i, (t, p)) in truth.iter().zip(predicted).enumerate() {
        match (t, p) {
            (Label::Healthy, Label::Healthy) => c.tp += 1,
            (Label::Healthy, Label::Pd) => c.fn_ += 1,
            (Label::Pd, Label::Pd) => c.tn += 1,
            (Label::Pd, Label::Healthy) => c.fp += 1,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "sample {i} has an unknown label (truth {t}, predicted {p})"
                )))
            }
        }
    }
    Ok(c)
}

/// Accuracy, sensitivity, specificity, MCC and probability excess.
pub fn metrics(c: &ConfusionCounts) -> Result<Metrics> {
    if c.total() == 0 {
        return Err(Error::InvalidInput("no evaluated samples".into()));
    }
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let mut undefined = Vec::new();
    let mut ratio = |name: &str, num: f64, den: f64| {
        if den > 0.0 {
            num / den
        } else {
            undefined.push(name.to_string());
            0.0
        }
    };
    let cross = tp * tn - fn_ * fp;
    let accuracy = ratio("accuracy", tp + tn, tp + tn + fp + fn_);
    let sensitivity = ratio("sensitivity", tp, tp + fn_);
    let specificity = ratio("specificity", tn, tn + fp);
    let mcc = ratio(
        "mcc",
        cross,
        ((fn_ + tp) * (fp + tn) * (fp + tp) * (fn_ + tn)).sqrt(),
    );
    let pe = ratio("pe", cross, (fn_ + tp) * (fp + tn));
    Ok(Metrics {
        accuracy,
        sensitivity,
        specificity,
        mcc,
        pe,
        undefined,
    })
}

/// Assignment of samples to cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    /// Fold id of each sample.
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn is_leave_one_out(&self) -> bool {
        self.k == self.assignments.len()
    }

    /// Sample indices of fold `f`, ascending.
    pub fn fold(&self, f: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == f)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Splits `n` samples into `k` folds whose sizes differ by at most one.
///
/// With `stratify`, each class is shuffled and dealt round-robin so that
/// every fold holds `floor` or `ceil` of its share of each class.
pub fn make_folds(n: usize, k: usize, seed: u64, stratify: Option<&[Label]>) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::InvalidConfig(format!(
            "need 2 <= k <= n for cross-validation (k = {k}, n = {n})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let groups: Vec<Vec<usize>> = match stratify {
        Some(labels) => {
            if labels.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: labels.len(),
                });
            }
            let mut by_class: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
            for (i, l) in labels.iter().enumerate() {
                by_class.entry(*l).or_default().push(i);
            }
            by_class.into_values().collect()
        }
        None => vec![(0..n).collect()],
    };
    let mut assignments = vec![0; n];
    let mut next = 0;
    for mut group in groups {
        group.shuffle(&mut rng);
        for i in group {
            assignments[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldPlan {
        k,
        seed,
        stratified: stratify.is_some(),
        assignments,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    KFold,
    LeaveOneOut,
    Holdout,
}

impl EvalMode {
    pub fn describe(self, k: usize) -> String {
        match self {
            EvalMode::KFold => format!("{k}-fold cross-validation"),
            EvalMode::LeaveOneOut => format!("leave-one-out cross-validation ({k} folds)"),
            EvalMode::Holdout => "independent test set".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub counts: ConfusionCounts,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mode: EvalMode,
    pub folds_k: usize,
    pub samples: usize,
    /// 1-based positions in the voiceprint vector.
    pub coefficients_used: Vec<usize>,
    /// Confusion counts pooled over every held-out prediction.
    pub counts: ConfusionCounts,
    pub pooled: Metrics,
    /// Unweighted mean of the per-fold metrics; absent for leave-one-out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold_average: Option<Metrics>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub folds: Vec<FoldResult>,
}

/// 1-based positions of the first `dim` coefficients.
pub fn all_coefficients(dim: usize) -> Vec<usize> {
    (1..=dim).collect()
}

fn check_subset(subset: &[usize], dim: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidInput("empty coefficient subset".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&c| c == 0 || c > dim) {
        return Err(Error::InvalidInput(format!(
            "coefficient {bad} outside 1..={dim}"
        )));
    }
    Ok(())
}

/// Network samples from voiceprints restricted to `subset` (1-based).
pub fn to_samples(voiceprints: &[Voiceprint], subset: &[usize]) -> Result<Vec<Sample>> {
    voiceprints
        .iter()
        .map(|vp| {
            let target = vp.label.target().ok_or_else(|| {
                Error::InvalidInput(format!("voiceprint `{}` has no label", vp.subject_id))
            })?;
            Ok(Sample::new(project(vp, subset)?, target))
        })
        .collect()
}

fn project(vp: &Voiceprint, subset: &[usize]) -> Result<Vec<f64>> {
    check_subset(subset, vp.values.len())?;
    Ok(subset.iter().map(|&c| vp.values[c - 1]).collect())
}

fn check_dataset(dataset: &[Voiceprint]) -> Result<usize> {
    let first = dataset
        .first()
        .ok_or_else(|| Error::InvalidInput("empty dataset".into()))?;
    let dim = first.values.len();
    if let Some(vp) = dataset.iter().find(|vp| vp.values.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: vp.values.len(),
        });
    }
    Ok(dim)
}

/// Derived per-fold seed so folds train independently of execution order.
fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed.wrapping_add((fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn average(ms: &[Metrics]) -> Metrics {
    let n = ms.len() as f64;
    let mean = |f: fn(&Metrics) -> f64| ms.iter().map(f).sum::<f64>() / n;
    Metrics {
        accuracy: mean(|m| m.accuracy),
        sensitivity: mean(|m| m.sensitivity),
        specificity: mean(|m| m.specificity),
        mcc: mean(|m| m.mcc),
        pe: mean(|m| m.pe),
        undefined: Vec::new(),
    }
}

/// Cross-validation on all voiceprint coefficients.
pub fn run_cross_validation(
    dataset: &[Voiceprint],
    cfg: &TrainConfig,
    plan: &FoldPlan,
) -> Result<MetricsReport> {
    let dim = check_dataset(dataset)?;
    run_cross_validation_on(dataset, &all_coefficients(dim), cfg, plan)
}

/// Cross-validation using only the coefficients in `subset` (1-based).
///
/// Each fold trains a fresh classifier on the other folds; folds run in
/// parallel and are merged in fold order.
pub fn run_cross_validation_on(
    dataset: &[Voiceprint],
    subset: &[usize],
    cfg: &TrainConfig,
    plan: &FoldPlan,
) -> Result<MetricsReport> {
    let dim = check_dataset(dataset)?;
    check_subset(subset, dim)?;
    if plan.len() != dataset.len() {
        return Err(Error::InvalidInput(format!(
            "fold plan covers {} samples but the dataset has {}",
            plan.len(),
            dataset.len()
        )));
    }
    let samples = to_samples(dataset, subset)?;
    let truth: Vec<Label> = dataset.iter().map(|vp| vp.label).collect();

    let outcomes: Vec<Result<(FoldResult, Option<String>)>> = (0..plan.k)
        .into_par_iter()
        .map(|f| {
            let test = plan.fold(f);
            let train: Vec<Sample> = (0..samples.len())
                .filter(|&i| plan.assignments[i] != f)
                .map(|i| samples[i].clone())
                .collect();
            let classes = train.iter().filter(|s| s.target == 1.0).count();
            let warning = (classes == 0 || classes == train.len())
                .then(|| format!("fold {f}: training data contains a single class"));
            let fold_cfg = TrainConfig {
                seed: fold_seed(cfg.seed, f),
                ..cfg.clone()
            };
            let (model, _) = Classifier::fit(&train, &fold_cfg)?;
            let predicted = test
                .iter()
                .map(|&i| Ok(model.predict(&samples[i].features)?.label))
                .collect::<Result<Vec<_>>>()?;
            let fold_truth: Vec<Label> = test.iter().map(|&i| truth[i]).collect();
            let counts = confusion(&fold_truth, &predicted)?;
            Ok((
                FoldResult {
                    fold: f,
                    train_size: train.len(),
                    test_size: test.len(),
                    counts,
                    metrics: metrics(&counts)?,
                },
                warning,
            ))
        })
        .collect();

    let mut folds = Vec::with_capacity(plan.k);
    let mut warnings = Vec::new();
    let mut counts = ConfusionCounts::default();
    for outcome in outcomes {
        let (fold, warning) = outcome?;
        counts.add(&fold.counts);
        warnings.extend(warning);
        folds.push(fold);
    }
    let per_fold: Vec<Metrics> = folds.iter().map(|f| f.metrics.clone()).collect();
    Ok(MetricsReport {
        mode: if plan.is_leave_one_out() {
            EvalMode::LeaveOneOut
        } else {
            EvalMode::KFold
        },
        folds_k: plan.k,
        samples: dataset.len(),
        coefficients_used: subset.to_vec(),
        counts,
        pooled: metrics(&counts)?,
        // Single-sample folds make per-fold rates meaningless.
        fold_average: (!plan.is_leave_one_out()).then(|| average(&per_fold)),
        warnings,
        folds,
    })
}

/// Model used for an independent test set.
#[derive(Debug, Clone, Copy)]
pub enum HoldoutModel<'a> {
    Trained(&'a Classifier),
    Train {
        data: &'a [Voiceprint],
        cfg: &'a TrainConfig,
    },
}

/// Predicts every sample of `test_set`.
///
/// For an all-PD test set only the PD detection rate is informative; it is
/// what `pooled.accuracy` reports, since `TN/(TN+FP)` equals the overall
/// accuracy when there are no positives.
pub fn run_holdout_test(
    model: HoldoutModel<'_>,
    test_set: &[Voiceprint],
    subset: &[usize],
) -> Result<MetricsReport> {
    let dim = check_dataset(test_set)?;
    check_subset(subset, dim)?;
    let fitted;
    let classifier = match model {
        HoldoutModel::Trained(c) => c,
        HoldoutModel::Train { data, cfg } => {
            check_subset(subset, check_dataset(data)?)?;
            fitted = Classifier::fit(&to_samples(data, subset)?, cfg)?.0;
            &fitted
        }
    };
    let truth: Vec<Label> = test_set.iter().map(|vp| vp.label).collect();
    let predicted = test_set
        .iter()
        .map(|vp| Ok(classifier.predict(&project(vp, subset)?)?.label))
        .collect::<Result<Vec<_>>>()?;
    let counts = confusion(&truth, &predicted)?;
    let mut warnings = Vec::new();
    if counts.positives() == 0 {
        warnings.push("test set has no healthy speakers; only accuracy is meaningful".into());
    }
    Ok(MetricsReport {
        mode: EvalMode::Holdout,
        folds_k: 1,
        samples: test_set.len(),
        coefficients_used: subset.to_vec(),
        counts,
        pooled: metrics(&counts)?,
        fold_average: None,
        warnings,
        folds: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub subset: Vec<usize>,
    pub report: MetricsReport,
}

/// Sweep ordering: accuracy, then MCC (both descending), then smaller
/// subsets, then lexicographic indices.
pub fn sweep_order(a: &SweepEntry, b: &SweepEntry) -> Ordering {
    let (ma, mb) = (&a.report.pooled, &b.report.pooled);
    mb.accuracy
        .total_cmp(&ma.accuracy)
        .then(mb.mcc.total_cmp(&ma.mcc))
        .then(a.subset.len().cmp(&b.subset.len()))
        .then(a.subset.cmp(&b.subset))
}

/// Cross-validates every candidate subset and ranks the results.
pub fn coefficient_sweep(
    dataset: &[Voiceprint],
    candidates: &[Vec<usize>],
    cfg: &TrainConfig,
    plan: &FoldPlan,
) -> Result<Vec<SweepEntry>> {
    let dim = check_dataset(dataset)?;
    for subset in candidates {
        check_subset(subset, dim)?;
    }
    let mut entries = candidates
        .iter()
        .map(|subset| {
            Ok(SweepEntry {
                subset: subset.clone(),
                report: run_cross_validation_on(dataset, subset, cfg, plan)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(sweep_order);
    Ok(entries)
}

/// `{1}, {2}, ..., {dim}`.
pub fn singleton_subsets(dim: usize) -> Vec<Vec<usize>> {
    (1..=dim).map(|c| vec![c]).collect()
}
