//! Entropy weights of each cepstral column and the resulting voiceprint.
//!
//! cargo run --example entropy_weighting

use wmfcc::corpus::{synth_vowel, SynthParams};
use wmfcc::frontend::{extract_mfcc, FrontendConfig};
use wmfcc::weighting::{fit_weights, make_voiceprint, UtteranceInfo, Vowel};

fn main() -> wmfcc::Result<()> {
    let clip = synth_vowel(&SynthParams::pd_male(Vowel::U))?;
    let cepstra = extract_mfcc(&clip, &FrontendConfig::default())?;
    let w = fit_weights(&cepstra)?;
    let print = make_voiceprint(
        &cepstra,
        UtteranceInfo {
            subject_id: "pd-male".into(),
            vowel: Vowel::U,
            label: wmfcc::Label::Pd,
        },
    )?;
    println!("coef   entropy   weight   voiceprint");
    for j in 0..w.len() {
        println!(
            "c{:<4} {:8.5} {:8.5} {:12.5}",
            j + cepstra.first_coefficient(),
            w.entropies[j],
            w.weights[j],
            print.values[j]
        );
    }
    println!("sum of weights {:.15}", w.weights.iter().sum::<f64>());
    Ok(())
}
