//! MFCC frames of a synthetic /a/ from the healthy-male preset.
//!
//! cargo run --example extract_mfcc

use wmfcc::corpus::{synth_vowel, SynthParams};
use wmfcc::frontend::{extract_mfcc, FrontendConfig};
use wmfcc::weighting::Vowel;

fn main() -> wmfcc::Result<()> {
    let clip = synth_vowel(&SynthParams::healthy_male(Vowel::A))?;
    let cfg = FrontendConfig::default();
    let cepstra = extract_mfcc(&clip, &cfg)?;
    println!(
        "{:.2} s at {} Hz -> {} frames x {} coefficients (c{}..c{})",
        clip.duration_s(),
        clip.sample_rate(),
        cepstra.rows(),
        cepstra.cols(),
        cepstra.first_coefficient(),
        cepstra.first_coefficient() + cepstra.cols() - 1
    );
    for i in [0, cepstra.rows() / 2, cepstra.rows() - 1] {
        let row: Vec<String> = cepstra
            .row(i)
            .iter()
            .take(6)
            .map(|v| format!("{v:8.3}"))
            .collect();
        println!("frame {i:3}: {} ...", row.join(""));
    }
    Ok(())
}
