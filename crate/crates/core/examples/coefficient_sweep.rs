//! Rank single coefficients and a few pairs by cross-validated accuracy.
//!
//! cargo run --release --example coefficient_sweep

use wmfcc::corpus::{build_synthetic_dataset, DatasetSpec};
use wmfcc::eval::{coefficient_sweep, make_folds, singleton_subsets};
use wmfcc::frontend::FrontendConfig;
use wmfcc::nn::TrainConfig;
use wmfcc::weighting::Vowel;

fn main() -> wmfcc::Result<()> {
    let spec = DatasetSpec {
        vowels: vec![Vowel::U],
        spread: 0.0,
        ..DatasetSpec::default()
    };
    let prints = build_synthetic_dataset(&spec, 2)?.voiceprints(&FrontendConfig::default())?;
    let labels: Vec<_> = prints.iter().map(|v| v.label).collect();
    let plan = make_folds(prints.len(), 5, 2, Some(&labels))?;
    let mut subsets = singleton_subsets(prints[0].values.len());
    subsets.extend([vec![1, 2], vec![3, 13], vec![12, 13, 14]]);
    let cfg = TrainConfig {
        epochs: 100,
        ..TrainConfig::default()
    };

    let ranked = coefficient_sweep(&prints, &subsets, &cfg, &plan)?;
    for (rank, e) in ranked.iter().take(10).enumerate() {
        // Position 1 holds c2.
        let names: Vec<String> = e.subset.iter().map(|i| format!("c{}", i + 1)).collect();
        println!(
            "{:2}. {:<14} accuracy {:.3}  MCC {:.3}",
            rank + 1,
            names.join(","),
            e.report.pooled.accuracy,
            e.report.pooled.mcc
        );
    }
    Ok(())
}
