mod common;

use std::time::Instant;

use common::*;
use rand::Rng;
use wmfcc::corpus::*;
use wmfcc::frontend::power_spectrum;
use wmfcc::weighting::{Label, Voiceprint, Vowel};
use wmfcc::Error;

#[test]
fn mono16_fixture_exact() {
    let raw: [i16; 8] = [0, 1, -1, 16384, -16384, 32767, -32768, 1234];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mono.wav");
    std::fs::write(&path, wav_bytes(1, 1, 8000, 16, &pcm16(&raw))).unwrap();
    let clip = load_wav(&path).unwrap();
    assert_eq!(clip.sample_rate(), 8000.0);
    let want: Vec<f64> = raw.iter().map(|&s| s as f64 / 32768.0).collect();
    assert_eq!(clip.samples(), want.as_slice());
}

#[test]
fn stereo_fixture_cancels() {
    let interleaved: Vec<i16> = [5i16, 300, -7000, 32767]
        .iter()
        .flat_map(|&x| [x, -x])
        .collect();
    let clip = parse_wav(&wav_bytes(1, 2, 44_100, 16, &pcm16(&interleaved))).unwrap();
    assert_eq!(clip.samples(), &[0.0; 4]);
    let same: Vec<i16> = [100i16, -200].iter().flat_map(|&x| [x, x]).collect();
    let clip = parse_wav(&wav_bytes(1, 2, 44_100, 16, &pcm16(&same))).unwrap();
    assert_eq!(clip.samples(), &[100.0 / 32768.0, -200.0 / 32768.0]);
}

#[test]
fn pcm24_fixture_scaling() {
    // 0x7FFFFF, -0x800000, 1
    let data = [0xFF, 0xFF, 0x7F, 0x00, 0x00, 0x80, 0x01, 0x00, 0x00];
    let clip = parse_wav(&wav_bytes(1, 1, 96_000, 24, &data)).unwrap();
    assert_eq!(clip.samples()[0], 8_388_607.0 / 8_388_608.0);
    assert_eq!(clip.samples()[1], -1.0);
    assert_eq!(clip.samples()[2], 1.0 / 8_388_608.0);
    assert_eq!(clip.sample_rate(), 96_000.0);
}

fn wav_offset(bytes: &[u8]) -> usize {
    match parse_wav(bytes) {
        Err(Error::Wav { offset, .. }) => offset,
        other => panic!("expected a WAV error, got {other:?}"),
    }
}

#[test]
fn malformed_fixtures_report_positions() {
    let good = wav_bytes(1, 1, 8000, 16, &pcm16(&[1, 2, 3, 4]));
    assert_eq!(wav_offset(&wav_bytes(3, 1, 8000, 16, &pcm16(&[1, 2]))), 20);
    assert_eq!(wav_offset(&wav_bytes(1, 1, 8000, 8, &[1, 2])), 34);
    assert_eq!(wav_offset(&good[..good.len() - 3]), 40);
    let mut bad = good.clone();
    bad[..4].copy_from_slice(b"RIFX");
    assert_eq!(wav_offset(&bad), 0);
    let msg = parse_wav(&bad).unwrap_err().to_string();
    assert!(msg.contains("byte 0"), "{msg}");
    assert_eq!(wav_offset(&wav_bytes(1, 1, 8000, 16, &[1, 2, 3])), 40);
}

#[test]
fn pcm16_files_round_trip() {
    let mut r = rng(4);
    let raw: Vec<i16> = (0..1000)
        .map(|_| r.random_range(i16::MIN..=i16::MAX))
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.wav");
    let b = dir.path().join("b.wav");
    std::fs::write(&a, wav_bytes(1, 1, 16_000, 16, &pcm16(&raw))).unwrap();
    let clip = load_wav(&a).unwrap();
    write_wav(&b, &clip, 16).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(load_wav(&b).unwrap(), clip);
}

fn clean(f0: f64, seconds: f64, sample_rate: f64) -> SynthParams {
    SynthParams {
        f0_hz: f0,
        jitter_pct: 0.0,
        shimmer_pct: 0.0,
        hnr_db: None,
        duration_s: seconds,
        sample_rate,
        ..SynthParams::healthy_male(Vowel::A)
    }
}

#[test]
fn clean_vowel_is_periodic() {
    // 125 Hz at 16 kHz: period of exactly 128 samples.
    let clip = synth_vowel(&clean(125.0, 0.5, 16_000.0)).unwrap();
    let x = &clip.samples()[2000..];
    let lag = autocorr_peak(x, 60, 190);
    assert!((lag as i64 - 128).abs() <= 1, "{lag}");
    for t in 0..2000 {
        assert!((x[t] - x[t + 128]).abs() < 1e-9);
    }
    let clip = synth_vowel(&clean(128.4, 0.5, 16_000.0)).unwrap();
    let lag = autocorr_peak(&clip.samples()[2000..], 60, 190);
    assert!((lag as f64 - 16_000.0 / 128.4).abs() <= 1.0, "{lag}");
}

#[test]
fn clean_vowel_energy_sits_on_harmonics() {
    let f0 = 128.4;
    let clip = synth_vowel(&clean(f0, 2.0, 16_000.0)).unwrap();
    let x = clip.samples();
    let n = x.len();
    let hann: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v * 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        })
        .collect();
    let n_fft = 1 << 17;
    let p = power_spectrum(&hann, n_fft).unwrap();
    let bin_hz = 16_000.0 / n_fft as f64;
    let (mut near, mut total) = (0.0, 0.0);
    for (k, v) in p.iter().enumerate() {
        let f = k as f64 * bin_hz;
        let h = (f / f0).round();
        total += v;
        if h >= 1.0 && (f - h * f0).abs() <= 2.0 {
            near += v;
        }
    }
    assert!(near / total >= 0.95, "harmonic share {}", near / total);
}

/// Harmonic/noise split: project the noisy clip onto its noise-free twin.
pub fn measured_hnr(p: &SynthParams) -> f64 {
    let noisy = synth_vowel(p).unwrap();
    let harmonic = synth_vowel(&SynthParams {
        hnr_db: None,
        ..p.clone()
    })
    .unwrap();
    let (y, h) = (noisy.samples(), harmonic.samples());
    let a = y.iter().zip(h).map(|(a, b)| a * b).sum::<f64>() / h.iter().map(|v| v * v).sum::<f64>();
    let hp: f64 = h.iter().map(|v| (a * v).powi(2)).sum();
    let np: f64 = y.iter().zip(h).map(|(y, h)| (y - a * h).powi(2)).sum();
    10.0 * (hp / np).log10()
}

#[test]
fn presets_hit_their_hnr() {
    for (p, target) in [
        (SynthParams::pd_male(Vowel::A), 10.4),
        (SynthParams::healthy_male(Vowel::O), 14.8),
        (
            SynthParams::preset(Label::Pd, Sex::Female, Vowel::U).unwrap(),
            8.1,
        ),
    ] {
        let hnr = measured_hnr(&p);
        assert!((hnr - target).abs() <= 1.0, "{hnr} vs {target}");
    }
}

/// Mean absolute difference of successive cycle lengths, in percent of the
/// mean cycle, located from the closure spike of each cycle.
pub fn jitter_estimate(x: &[f64], nominal: f64) -> f64 {
    let mut marks = Vec::new();
    let argmin = |lo: usize, hi: usize| {
        (lo..hi.min(x.len()))
            .min_by(|&a, &b| x[a].total_cmp(&x[b]))
            .unwrap()
    };
    let mut pos = argmin(0, nominal as usize);
    while pos + ((1.5 * nominal) as usize) < x.len() {
        marks.push(pos as f64);
        pos = argmin(
            pos + (0.5 * nominal) as usize,
            pos + (1.5 * nominal) as usize,
        );
    }
    let periods: Vec<f64> = marks.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = periods.iter().sum::<f64>() / periods.len() as f64;
    let mad =
        periods.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (periods.len() - 1) as f64;
    100.0 * mad / mean
}

#[test]
fn jitter_estimate_grows_with_jitter() {
    let estimates: Vec<f64> = [0.0, 0.5, 1.0, 2.0]
        .iter()
        .map(|&j| {
            let p = SynthParams {
                jitter_pct: j,
                seed: 12,
                ..clean(128.4, 2.0, 96_000.0)
            };
            jitter_estimate(synth_vowel(&p).unwrap().samples(), 96_000.0 / 128.4)
        })
        .collect();
    for w in estimates.windows(2) {
        assert!(w[1] > w[0], "{estimates:?}");
    }
    assert!((estimates[3] - 2.0).abs() < 0.3, "{estimates:?}");
}

#[test]
fn dataset_layouts() {
    let spec = DatasetSpec {
        duration_s: 0.05,
        ..DatasetSpec::default()
    };
    let d = build_synthetic_dataset(&spec, 1).unwrap();
    assert_eq!(d.clips.len(), 120);
    let test = build_synthetic_dataset(
        &DatasetSpec {
            duration_s: 0.05,
            ..DatasetSpec::pd_test_set(28)
        },
        1,
    )
    .unwrap();
    assert_eq!(test.clips.len(), 56);
    assert!(test
        .manifest
        .entries
        .iter()
        .all(|e| e.label == Label::Pd && e.vowel != Vowel::U));

    let again = build_synthetic_dataset(&spec, 1).unwrap();
    assert_eq!(
        d.manifest.to_csv().as_bytes(),
        again.manifest.to_csv().as_bytes()
    );
    assert!(d.clips.iter().zip(&again.clips).all(|(a, b)| a
        .samples()
        .iter()
        .zip(b.samples())
        .all(|(x, y)| x.to_bits() == y.to_bits())));
}

#[test]
fn feature_store_round_trip_and_speed() {
    let mut r = rng(10);
    let make = |n: usize, r: &mut rand_chacha::ChaCha8Rng| -> Vec<Voiceprint> {
        (0..n)
            .map(|i| Voiceprint {
                subject_id: format!("s{i}"),
                vowel: [Vowel::A, Vowel::O, Vowel::U][i % 3],
                label: if i % 2 == 0 {
                    Label::Pd
                } else {
                    Label::Healthy
                },
                values: (0..19)
                    .map(|_| r.random::<f64>() * 10f64.powi(r.random_range(-8..8)))
                    .collect(),
            })
            .collect()
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let table = FeatureTable::new(2, make(120, &mut r)).unwrap();
    persist_features(&path, &table).unwrap();
    assert_eq!(load_features(&path).unwrap(), table);

    let big = FeatureTable::new(2, make(10_000, &mut r)).unwrap();
    persist_features(&path, &big).unwrap();
    let start = Instant::now();
    let loaded = load_features(&path).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(loaded.len(), 10_000);
    assert!(elapsed.as_secs_f64() < 1.0, "{elapsed:?}");
}
