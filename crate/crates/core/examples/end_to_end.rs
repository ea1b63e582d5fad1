//! Synthetic 20 PD + 20 healthy /u/ corpus, entropy-weighted MFCC
//! voiceprints, a 19-32-16-1 network, and leave-one-out evaluation.
//!
//! cargo run --release --example end_to_end -- [seed ...]

use std::time::Instant;

use wmfcc::corpus::{build_synthetic_dataset, DatasetSpec};
use wmfcc::eval::{make_folds, run_cross_validation};
use wmfcc::frontend::FrontendConfig;
use wmfcc::nn::TrainConfig;
use wmfcc::weighting::Vowel;

fn main() -> wmfcc::Result<()> {
    let seeds: Vec<u64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("seeds are integers"))
        .collect();
    let seeds = if seeds.is_empty() {
        vec![1, 2, 3]
    } else {
        seeds
    };
    let spread: f64 = std::env::var("SPREAD")
        .ok()
        .map_or(0.0, |s| s.parse().expect("numeric spread"));

    for seed in seeds {
        let start = Instant::now();
        let spec = DatasetSpec {
            vowels: vec![Vowel::U],
            spread,
            ..DatasetSpec::default()
        };
        let data = build_synthetic_dataset(&spec, seed)?;
        let voiceprints = data.voiceprints(&FrontendConfig::default())?;

        let cfg = TrainConfig {
            seed,
            ..TrainConfig::default()
        };
        let labels: Vec<_> = voiceprints.iter().map(|v| v.label).collect();
        let plan = make_folds(voiceprints.len(), voiceprints.len(), seed, Some(&labels))?;
        let report = run_cross_validation(&voiceprints, &cfg, &plan)?;
        let m = &report.pooled;
        println!(
            "seed {seed}: accuracy {:.3}  sensitivity {:.3}  specificity {:.3}  MCC {:.3}  ({:.1?})",
            m.accuracy,
            m.sensitivity,
            m.specificity,
            m.mcc,
            start.elapsed()
        );
    }
    Ok(())
}
