//! Write the four group presets for each vowel as 16-bit WAV files.
//!
//! cargo run --example synth_vowels -- [out_dir]

use std::path::PathBuf;

use wmfcc::corpus::{synth_vowel, write_wav, Sex, SynthParams};
use wmfcc::weighting::{Label, Vowel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("wmfcc-vowels"), PathBuf::from);
    std::fs::create_dir_all(&out)?;
    for label in [Label::Healthy, Label::Pd] {
        for sex in [Sex::Male, Sex::Female] {
            for vowel in [Vowel::A, Vowel::O, Vowel::U] {
                let p = SynthParams::preset(label, sex, vowel)?;
                let clip = synth_vowel(&p)?;
                let path = out.join(format!("{label}_{sex:?}_{vowel}.wav").to_lowercase());
                write_wav(&path, &clip, 16)?;
                println!(
                    "{}  f0 {:.1} Hz  jitter {:.2}%  shimmer {:.2}%  HNR {:.1} dB",
                    path.display(),
                    p.f0_hz,
                    p.jitter_pct,
                    p.shimmer_pct,
                    p.hnr_db.unwrap_or(f64::INFINITY)
                );
            }
        }
    }
    Ok(())
}
