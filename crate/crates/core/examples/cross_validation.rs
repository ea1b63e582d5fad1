//! Stratified 10-fold cross-validation with per-fold results.
//!
//! cargo run --release --example cross_validation -- [spread]

use wmfcc::corpus::{build_synthetic_dataset, DatasetSpec};
use wmfcc::eval::{make_folds, run_cross_validation};
use wmfcc::frontend::FrontendConfig;
use wmfcc::nn::TrainConfig;
use wmfcc::weighting::Vowel;

fn main() -> wmfcc::Result<()> {
    let spread = std::env::args()
        .nth(1)
        .map_or(0.5, |s| s.parse().expect("numeric spread"));
    let spec = DatasetSpec {
        vowels: vec![Vowel::U],
        spread,
        ..DatasetSpec::default()
    };
    let prints = build_synthetic_dataset(&spec, 1)?.voiceprints(&FrontendConfig::default())?;
    let labels: Vec<_> = prints.iter().map(|v| v.label).collect();
    let plan = make_folds(prints.len(), 10, 1, Some(&labels))?;
    let report = run_cross_validation(&prints, &TrainConfig::default(), &plan)?;

    for f in &report.folds {
        println!(
            "fold {:2}: train {:2}  test {}  tp {} tn {} fp {} fn {}",
            f.fold + 1,
            f.train_size,
            f.test_size,
            f.counts.tp,
            f.counts.tn,
            f.counts.fp,
            f.counts.fn_
        );
    }
    let m = &report.pooled;
    println!(
        "pooled: accuracy {:.4}  sensitivity {:.4}  specificity {:.4}  MCC {:.4}  PE {:.4}",
        m.accuracy, m.sensitivity, m.specificity, m.mcc, m.pe
    );
    Ok(())
}
