//! Cross-validated accuracy with and without layer-wise RBM pretraining.
//!
//! cargo run --release --example rbm_pretraining

use wmfcc::corpus::{build_synthetic_dataset, DatasetSpec};
use wmfcc::eval::{make_folds, run_cross_validation};
use wmfcc::frontend::FrontendConfig;
use wmfcc::nn::{Pretrain, TrainConfig};
use wmfcc::weighting::Vowel;

fn main() -> wmfcc::Result<()> {
    let spec = DatasetSpec {
        vowels: vec![Vowel::U],
        spread: 0.5,
        ..DatasetSpec::default()
    };
    let prints = build_synthetic_dataset(&spec, 3)?.voiceprints(&FrontendConfig::default())?;
    let labels: Vec<_> = prints.iter().map(|v| v.label).collect();
    let plan = make_folds(prints.len(), 10, 3, Some(&labels))?;
    for pretrain in [Pretrain::None, Pretrain::Rbm] {
        let cfg = TrainConfig {
            pretrain,
            ..TrainConfig::default()
        };
        let r = run_cross_validation(&prints, &cfg, &plan)?;
        println!(
            "{pretrain:?}: accuracy {:.3}  MCC {:.3}",
            r.pooled.accuracy, r.pooled.mcc
        );
    }
    Ok(())
}
