//! Write a clip at 16 and 24 bits, read it back and report quantization error.
//!
//! cargo run --example wav_io

use wmfcc::corpus::{encode_wav, parse_wav, synth_vowel, SynthParams};
use wmfcc::weighting::Vowel;

fn main() -> wmfcc::Result<()> {
    let clip = synth_vowel(&SynthParams::healthy_male(Vowel::O))?;
    for bits in [16, 24] {
        let bytes = encode_wav(&clip, bits)?;
        let back = parse_wav(&bytes)?;
        let err = clip
            .samples()
            .iter()
            .zip(back.samples())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "{bits}-bit: {} bytes, {} samples, max error {err:.2e} (step {:.2e})",
            bytes.len(),
            back.samples().len(),
            1.0 / (1u64 << (bits - 1)) as f64
        );
    }
    Ok(())
}
