//! Fit the default 19-32-16-1 classifier on a synthetic corpus and save it.
//!
//! cargo run --release --example train_network -- [model.json]

use wmfcc::corpus::{build_synthetic_dataset, save_model, DatasetSpec, ModelFile};
use wmfcc::eval::{all_coefficients, to_samples};
use wmfcc::frontend::FrontendConfig;
use wmfcc::nn::{Classifier, TrainConfig};
use wmfcc::weighting::Vowel;

fn main() -> wmfcc::Result<()> {
    let spec = DatasetSpec {
        vowels: vec![Vowel::U],
        spread: 0.0,
        ..DatasetSpec::default()
    };
    let prints = build_synthetic_dataset(&spec, 7)?.voiceprints(&FrontendConfig::default())?;
    let coefs = all_coefficients(prints[0].values.len());
    let samples = to_samples(&prints, &coefs)?;
    let cfg = TrainConfig::default();
    let (model, trace) = Classifier::fit(&samples, &cfg)?;

    for (epoch, loss) in trace.epoch_losses.iter().enumerate().step_by(25) {
        println!("epoch {:4}  loss {loss:.6}", epoch + 1);
    }
    println!(
        "layers {:?}, {} updates, final loss {:.6}",
        model.network.layer_sizes(),
        trace.total_updates(),
        trace.final_loss().unwrap_or(f64::NAN)
    );
    let correct = prints
        .iter()
        .zip(&samples)
        .filter(|(p, s)| {
            model
                .predict(&s.features)
                .is_ok_and(|pred| pred.label == p.label)
        })
        .count();
    println!("training accuracy {correct}/{}", samples.len());

    if let Some(path) = std::env::args().nth(1) {
        save_model(&path, &ModelFile::new(&model, coefs, 2, cfg))?;
        println!("saved {path}");
    }
    Ok(())
}
