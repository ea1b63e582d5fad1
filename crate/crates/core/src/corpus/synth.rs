//! Sustained-vowel synthesis with controllable jitter, shimmer and HNR.
//!
//! A Rosenberg glottal pulse train, perturbed cycle by cycle, is passed
//! through a cascade of two-pole formant resonators and a first-difference
//! lip radiation. White Gaussian noise is then added at the requested
//! harmonics-to-noise ratio.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::AudioClip;
use crate::weighting::{Label, Vowel};

pub const PEAK_LEVEL: f64 = 0.9;

// Rosenberg pulse: opening phase then closing phase, as fractions of a cycle.
const OPEN_PHASE: f64 = 0.4;
const CLOSING_PHASE: f64 = 0.16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Formant {
    pub freq_hz: f64,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub f0_hz: f64,
    /// Mean absolute cycle-to-cycle period difference, in percent of the period.
    pub jitter_pct: f64,
    /// Mean absolute cycle-to-cycle amplitude difference, in percent.
    pub shimmer_pct: f64,
    /// `None` disables the noise entirely.
    pub hnr_db: Option<f64>,
    pub duration_s: f64,
    pub sample_rate: f64,
    pub formants: Vec<Formant>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Male,
    Female,
}

/// Group mean and standard deviation of one acoustic measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

const fn stat(mean: f64, sd: f64) -> Stat {
    Stat { mean, sd }
}

/// Clinical acoustic statistics of one speaker group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcousticProfile {
    pub f0_hz: Stat,
    pub jitter_pct: Stat,
    pub shimmer_pct: Stat,
    pub hnr_db: Stat,
}

pub const HEALTHY_MALE: AcousticProfile = AcousticProfile {
    f0_hz: stat(128.4, 17.6),
    jitter_pct: stat(0.04, 0.36),
    shimmer_pct: stat(0.26, 0.10),
    hnr_db: stat(14.8, 4.6),
};

pub const HEALTHY_FEMALE: AcousticProfile = AcousticProfile {
    f0_hz: stat(205.4, 37.6),
    jitter_pct: stat(1.16, 1.15),
    shimmer_pct: stat(0.35, 0.46),
    hnr_db: stat(11.0, 7.1),
};

pub const PD_MALE: AcousticProfile = AcousticProfile {
    f0_hz: stat(120.5, 20.8),
    jitter_pct: stat(0.94, 0.76),
    shimmer_pct: stat(0.37, 0.16),
    hnr_db: stat(10.4, 3.7),
};

pub const PD_FEMALE: AcousticProfile = AcousticProfile {
    f0_hz: stat(193.8, 16.4),
    jitter_pct: stat(1.94, 1.30),
    shimmer_pct: stat(0.68, 0.91),
    hnr_db: stat(8.1, 5.1),
};

pub fn acoustic_profile(label: Label, sex: Sex) -> Result<AcousticProfile> {
    match (label, sex) {
        (Label::Healthy, Sex::Male) => Ok(HEALTHY_MALE),
        (Label::Healthy, Sex::Female) => Ok(HEALTHY_FEMALE),
        (Label::Pd, Sex::Male) => Ok(PD_MALE),
        (Label::Pd, Sex::Female) => Ok(PD_FEMALE),
        (Label::Unknown, _) => Err(Error::InvalidInput(
            "no acoustic profile for unlabeled speakers".into(),
        )),
    }
}

/// First three formants (Hz) and bandwidths of adult vowels.
pub fn vowel_formants(vowel: Vowel, sex: Sex) -> Vec<Formant> {
    let freqs: [f64; 3] = match (vowel, sex) {
        (Vowel::A, Sex::Male) => [730.0, 1090.0, 2440.0],
        (Vowel::A, Sex::Female) => [850.0, 1220.0, 2810.0],
        (Vowel::O, Sex::Male) => [570.0, 840.0, 2410.0],
        (Vowel::O, Sex::Female) => [590.0, 920.0, 2710.0],
        (Vowel::U, Sex::Male) => [300.0, 870.0, 2240.0],
        (Vowel::U, Sex::Female) => [370.0, 950.0, 2670.0],
        (Vowel::Other, Sex::Male) => [500.0, 1500.0, 2500.0],
        (Vowel::Other, Sex::Female) => [580.0, 1700.0, 2850.0],
    };
    freqs
        .iter()
        .zip([80.0, 100.0, 150.0])
        .map(|(&freq_hz, bandwidth_hz)| Formant {
            freq_hz,
            bandwidth_hz,
        })
        .collect()
}

impl SynthParams {
    /// Group-mean voice for the given speaker group and vowel, 1 s at 16 kHz.
    pub fn preset(label: Label, sex: Sex, vowel: Vowel) -> Result<Self> {
        let p = acoustic_profile(label, sex)?;
        Ok(Self {
            f0_hz: p.f0_hz.mean,
            jitter_pct: p.jitter_pct.mean,
            shimmer_pct: p.shimmer_pct.mean,
            hnr_db: Some(p.hnr_db.mean),
            duration_s: 1.0,
            sample_rate: 16_000.0,
            formants: vowel_formants(vowel, sex),
            seed: 0,
        })
    }

    pub fn healthy_male(vowel: Vowel) -> Self {
        Self::preset(Label::Healthy, Sex::Male, vowel).expect("labeled preset")
    }

    pub fn pd_male(vowel: Vowel) -> Self {
        Self::preset(Label::Pd, Sex::Male, vowel).expect("labeled preset")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.f0_hz > 0.0) || !self.f0_hz.is_finite() {
            return bad(format!("f0 {} Hz must be positive", self.f0_hz));
        }
        if !(self.jitter_pct >= 0.0 && self.shimmer_pct >= 0.0) {
            return bad("jitter and shimmer must be non-negative".into());
        }
        if !(self.duration_s > 0.0) || !(self.sample_rate > 0.0) {
            return bad("duration and sample rate must be positive".into());
        }
        if self.f0_hz >= self.sample_rate / 2.0 {
            return bad(format!("f0 {} Hz is above Nyquist", self.f0_hz));
        }
        if matches!(self.hnr_db, Some(h) if !h.is_finite()) {
            return bad("HNR must be finite (use no HNR to disable noise)".into());
        }
        for f in &self.formants {
            if !(f.freq_hz > 0.0 && f.freq_hz < self.sample_rate / 2.0 && f.bandwidth_hz > 0.0) {
                return bad(format!("formant {f:?} outside (0, Nyquist)"));
            }
        }
        Ok(())
    }
}

fn rosenberg(phase: f64) -> f64 {
    if phase < OPEN_PHASE {
        0.5 * (1.0 - (PI * phase / OPEN_PHASE).cos())
    } else if phase < OPEN_PHASE + CLOSING_PHASE {
        (PI * (phase - OPEN_PHASE) / (2.0 * CLOSING_PHASE)).cos()
    } else {
        0.0
    }
}

/// Standard deviation of an i.i.d. perturbation whose mean absolute
/// successive difference is `pct` percent: `E|x - y| = 2σ/√π`.
fn perturbation_sd(pct: f64) -> f64 {
    pct / 100.0 * PI.sqrt() / 2.0
}

fn glottal_source(p: &SynthParams, len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let period_sd = perturbation_sd(p.jitter_pct);
    let amp_sd = perturbation_sd(p.shimmer_pct);
    let mut out = vec![0.0; len];
    let mut start = 0.0; // in samples
    let nominal = p.sample_rate / p.f0_hz;
    while start < len as f64 {
        let e1: f64 = StandardNormal.sample(rng);
        let e2: f64 = StandardNormal.sample(rng);
        let period = nominal * (1.0 + period_sd * e1).max(0.2);
        let amp = (1.0 + amp_sd * e2).max(0.0);
        let end = start + period;
        let first = start.ceil() as usize;
        let last = (end.ceil() as usize).min(len);
        for (i, v) in out.iter_mut().enumerate().take(last).skip(first) {
            // Pulse shape follows the nominal period so closure instants carry the jitter.
            *v = amp * rosenberg((i as f64 - start) / nominal);
        }
        start = end;
    }
    out
}

/// Unity-DC-gain two-pole resonator.
fn resonate(signal: &mut [f64], formant: Formant, sample_rate: f64) {
    let r = (-PI * formant.bandwidth_hz / sample_rate).exp();
    let b = 2.0 * r * (2.0 * PI * formant.freq_hz / sample_rate).cos();
    let c = -r * r;
    let a = 1.0 - b - c;
    let (mut y1, mut y2) = (0.0, 0.0);
    for x in signal.iter_mut() {
        let y = a * *x + b * y1 + c * y2;
        y2 = y1;
        y1 = y;
        *x = y;
    }
}

fn power(signal: &[f64]) -> f64 {
    signal.iter().map(|v| v * v).sum::<f64>() / signal.len() as f64
}

/// Noise-free voiced signal before peak normalization.
fn harmonic_part(p: &SynthParams, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut signal = glottal_source(p, len, &mut rng);
    for &f in &p.formants {
        resonate(&mut signal, f, p.sample_rate);
    }
    let mut prev = 0.0;
    for v in signal.iter_mut() {
        let x = *v;
        *v = x - prev;
        prev = x;
    }
    signal
}

pub fn synth_vowel(p: &SynthParams) -> Result<AudioClip> {
    p.validate()?;
    let len = (p.duration_s * p.sample_rate).round().max(1.0) as usize;
    let mut signal = harmonic_part(p, len);
    if let Some(hnr) = p.hnr_db {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        rng.set_stream(1);
        let noise: Vec<f64> = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
        let noise_power = power(&noise);
        if noise_power > 0.0 {
            let gain = (power(&signal) / 10f64.powf(hnr / 10.0) / noise_power).sqrt();
            signal
                .iter_mut()
                .zip(&noise)
                .for_each(|(s, n)| *s += gain * n);
        }
    }
    let peak = signal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        let g = PEAK_LEVEL / peak;
        signal.iter_mut().for_each(|v| *v *= g);
    }
    AudioClip::new(signal, p.sample_rate)
}

/// Draws from `N(mean, sd)` restricted to `[lo, hi]` by rejection.
pub(crate) fn truncated_normal<R: Rng + ?Sized>(rng: &mut R, s: Stat, lo: f64, hi: f64) -> f64 {
    for _ in 0..10_000 {
        let z: f64 = StandardNormal.sample(rng);
        let v = s.mean + s.sd * z;
        if (lo..=hi).contains(&v) {
            return v;
        }
    }
    s.mean.clamp(lo, hi)
}
