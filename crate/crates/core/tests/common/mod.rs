//! Independent reference implementations used as test oracles. Written
//! from the formulas, without calling into the library's numeric code.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmfcc::eval::ConfusionCounts;
use wmfcc::nn::{Layer, Network};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_signal(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// `|Σ_t x[t] e^{-2πi n t / N}|²` for `n = 0..=N/2`, zero-padding `x` to `n_fft`.
pub fn dft_power(x: &[f64], n_fft: usize) -> Vec<f64> {
    (0..=n_fft / 2)
        .map(|n| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &v) in x.iter().enumerate() {
                let ang = -2.0 * PI * ((n * t) % n_fft) as f64 / n_fft as f64;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            re * re + im * im
        })
        .collect()
}

pub fn mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn inv_mel(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular mel filters evaluated at bin frequencies.
pub fn filterbank(
    num_filters: usize,
    n_fft: usize,
    sr: f64,
    fmin: f64,
    fmax: f64,
) -> Vec<Vec<f64>> {
    let (lo, hi) = (mel(fmin), mel(fmax));
    let pts: Vec<f64> = (0..num_filters + 2)
        .map(|i| {
            if i == 0 {
                fmin
            } else if i == num_filters + 1 {
                fmax
            } else {
                inv_mel(lo + (hi - lo) * i as f64 / (num_filters + 1) as f64)
            }
        })
        .collect();
    (0..num_filters)
        .map(|j| {
            (0..=n_fft / 2)
                .map(|b| {
                    let f = b as f64 * sr / n_fft as f64;
                    let (l, c, r) = (pts[j], pts[j + 1], pts[j + 2]);
                    if f > l && f <= c {
                        (f - l) / (c - l)
                    } else if f > c && f < r {
                        (r - f) / (r - c)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Whole MFCC chain with default settings (0.97, 25/10 ms, 26 filters,
/// coefficients `first..first+count`).
pub fn mfcc(signal: &[f64], sr: f64, first: usize, count: usize) -> Vec<Vec<f64>> {
    let fl = (0.025 * sr).round() as usize;
    let hop = (0.010 * sr).round() as usize;
    let n_fft = fl.next_power_of_two();
    let mut y = vec![signal[0]];
    for t in 1..signal.len() {
        y.push(signal[t] - 0.97 * signal[t - 1]);
    }
    let frames = if y.len() <= fl {
        1
    } else {
        (y.len() - fl).div_ceil(hop) + 1
    };
    let fb = filterbank(26, n_fft, sr, 0.0, sr / 2.0);
    (0..frames)
        .map(|f| {
            let frame: Vec<f64> = (0..fl)
                .map(|n| {
                    let s = y.get(f * hop + n).copied().unwrap_or(0.0);
                    s * (0.54 - 0.46 * (2.0 * PI * n as f64 / (fl - 1) as f64).cos())
                })
                .collect();
            let p = dft_power(&frame, n_fft);
            let m: Vec<f64> = fb
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&p)
                        .map(|(w, v)| w * v)
                        .sum::<f64>()
                        .max(1e-10)
                        .ln()
                })
                .collect();
            let n = m.len() as f64;
            (first..first + count)
                .map(|i| {
                    (2.0 / n).sqrt()
                        * m.iter()
                            .enumerate()
                            .map(|(j, v)| v * (PI * i as f64 * (j as f64 + 0.5) / n).cos())
                            .sum::<f64>()
                })
                .collect()
        })
        .collect()
}

/// Entropy weights of a frames × coefficients matrix.
pub fn entropy_weights(c: &[Vec<f64>]) -> Vec<f64> {
    let n = c.len();
    let d = c[0].len();
    let mut one_minus_e = Vec::with_capacity(d);
    for j in 0..d {
        let col: Vec<f64> = c.iter().map(|r| r[j]).collect();
        let max = col.iter().cloned().fold(f64::MIN, f64::max);
        let min = col.iter().cloned().fold(f64::MAX, f64::min);
        if max == min || n < 2 {
            one_minus_e.push(0.0);
            continue;
        }
        let x: Vec<f64> = col.iter().map(|v| (max - v) / (max - min)).collect();
        let s: f64 = x.iter().sum();
        let mut e = 0.0;
        for v in &x {
            let y = v / s;
            if y > 0.0 {
                e -= y * y.ln();
            }
        }
        one_minus_e.push(1.0 - e / (n as f64).ln());
    }
    let total: f64 = one_minus_e.iter().sum();
    if total == 0.0 {
        return vec![1.0 / d as f64; d];
    }
    one_minus_e.iter().map(|v| v / total).collect()
}

pub fn weighted_voiceprint(c: &[Vec<f64>]) -> Vec<f64> {
    let w = entropy_weights(c);
    (0..w.len())
        .map(|j| c.iter().map(|r| w[j] * r[j]).sum::<f64>() / c.len() as f64)
        .collect()
}

/// Forward pass: ReLU hidden layers, sigmoid output.
pub fn net_output(layers: &[(usize, usize, Vec<f64>, Vec<f64>)], x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    for (l, (inputs, outputs, w, b)) in layers.iter().enumerate() {
        let z: Vec<f64> = (0..*outputs)
            .map(|o| b[o] + (0..*inputs).map(|i| w[o * inputs + i] * v[i]).sum::<f64>())
            .collect();
        v = if l + 1 == layers.len() {
            z.iter().map(|z| 1.0 / (1.0 + (-z).exp())).collect()
        } else {
            z.iter().map(|z| z.max(0.0)).collect()
        };
    }
    v[0]
}

pub fn raw_layers(net: &Network) -> Vec<(usize, usize, Vec<f64>, Vec<f64>)> {
    net.layers()
        .iter()
        .map(|l| (l.inputs, l.outputs, l.weights.clone(), l.biases.clone()))
        .collect()
}

pub fn network_from_raw(raw: &[(usize, usize, Vec<f64>, Vec<f64>)]) -> Network {
    Network::from_layers(
        raw.iter()
            .map(|(i, o, w, b)| Layer {
                inputs: *i,
                outputs: *o,
                weights: w.clone(),
                biases: b.clone(),
            })
            .collect(),
    )
    .unwrap()
}

/// Smallest |pre-activation| over hidden units, to keep finite differences
/// away from ReLU kinks.
pub fn min_hidden_preactivation(raw: &[(usize, usize, Vec<f64>, Vec<f64>)], x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    let mut min = f64::INFINITY;
    for (inputs, outputs, w, b) in &raw[..raw.len() - 1] {
        let z: Vec<f64> = (0..*outputs)
            .map(|o| b[o] + (0..*inputs).map(|i| w[o * inputs + i] * v[i]).sum::<f64>())
            .collect();
        min = z.iter().fold(min, |m, z| m.min(z.abs()));
        v = z.iter().map(|z| z.max(0.0)).collect();
    }
    min
}

/// Accuracy, MCC, PE, sensitivity, specificity from confusion counts.
pub fn metric_formulas(tp: f64, tn: f64, fp: f64, fn_: f64) -> [f64; 5] {
    let acc = (tp + tn) / (tp + tn + fp + fn_);
    let sens = tp / (tp + fn_);
    let spec = tn / (tn + fp);
    let mcc = (tp * tn - fp * fn_) / ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt();
    let pe = (tp * tn - fn_ * fp) / ((fn_ + tp) * (fp + tn));
    [acc, sens, spec, mcc, pe]
}

/// Period (in samples) of the strongest autocorrelation peak within `[lo, hi]`.
pub fn autocorr_peak(x: &[f64], lo: usize, hi: usize) -> usize {
    (lo..=hi)
        .max_by(|&a, &b| {
            let ra: f64 =
                x.iter().zip(&x[a..]).map(|(p, q)| p * q).sum::<f64>() / (x.len() - a) as f64;
            let rb: f64 =
                x.iter().zip(&x[b..]).map(|(p, q)| p * q).sum::<f64>() / (x.len() - b) as f64;
            ra.total_cmp(&rb)
        })
        .unwrap()
}

pub fn random_raw(r: &mut rand_chacha::ChaCha8Rng) -> Vec<(usize, usize, Vec<f64>, Vec<f64>)> {
    let depth = r.random_range(1..=4);
    let mut sizes: Vec<usize> = (0..depth).map(|_| r.random_range(1..=8)).collect();
    sizes.push(1);
    sizes
        .windows(2)
        .map(|w| {
            let (i, o) = (w[0], w[1]);
            (
                i,
                o,
                (0..i * o).map(|_| r.random_range(-1.5..1.5)).collect(),
                (0..o).map(|_| r.random_range(-0.5..0.5)).collect(),
            )
        })
        .collect()
}

pub fn loss(raw: &[(usize, usize, Vec<f64>, Vec<f64>)], x: &[f64], y: f64) -> f64 {
    let a = net_output(raw, x);
    0.5 * (y - a) * (y - a)
}

/// Worst relative error between backprop and central differences over
/// every parameter of 50 random networks.
pub fn gradient_check_worst(seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 50 {
        let raw = random_raw(&mut r);
        let x: Vec<f64> = (0..raw[0].0).map(|_| r.random_range(-1.0..1.0)).collect();
        if min_hidden_preactivation(&raw, &x) < 1e-3 {
            continue;
        }
        checked += 1;
        let y = if r.random_bool(0.5) { 1.0 } else { 0.0 };
        let net = network_from_raw(&raw);
        let grads = net.backprop(&net.forward(&x).unwrap(), y);
        let h = 1e-5;
        for l in 0..raw.len() {
            let n_w = raw[l].2.len();
            for k in 0..n_w + raw[l].3.len() {
                let bump = |delta: f64| {
                    let mut p = raw.clone();
                    if k < n_w {
                        p[l].2[k] += delta;
                    } else {
                        p[l].3[k - n_w] += delta;
                    }
                    loss(&p, &x, y)
                };
                let fd = (bump(h) - bump(-h)) / (2.0 * h);
                let g = if k < n_w {
                    grads.layers[l].weights[k]
                } else {
                    grads.layers[l].biases[k - n_w]
                };
                let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-8);
                worst = worst.max(rel);
            }
        }
    }
    worst
}

/// Reference rows: 20 healthy + 20 PD, (sensitivity, specificity) in percent,
/// then accuracy, MCC and PE.
pub const TABLE_ROWS: [(&str, u64, u64, f64, f64, f64); 4] = [
    ("RBF", 80, 55, 0.6750, 0.3615, 0.3500),
    ("Linear", 80, 65, 0.7250, 0.4551, 0.4500),
    ("POL", 65, 75, 0.7000, 0.4020, 0.4000),
    ("MLP", 85, 75, 0.8000, 0.6030, 0.6000),
];

pub fn counts_from_rates(sens_pct: u64, spec_pct: u64) -> ConfusionCounts {
    let tp = 20 * sens_pct / 100;
    let tn = 20 * spec_pct / 100;
    ConfusionCounts::new(tp, tn, 20 - tn, 20 - tp)
}

fn le16(v: u16) -> [u8; 2] {
    v.to_le_bytes()
}

fn le32(v: u32) -> [u8; 4] {
    v.to_le_bytes()
}

/// RIFF header + 16-byte fmt chunk + data chunk, written out field by field.
pub fn wav_bytes(tag: u16, channels: u16, rate: u32, bits: u16, data: &[u8]) -> Vec<u8> {
    let align = channels * bits / 8;
    let mut b = Vec::new();
    b.extend_from_slice(b"RIFF");
    b.extend_from_slice(&le32(36 + data.len() as u32));
    b.extend_from_slice(b"WAVE");
    b.extend_from_slice(b"fmt ");
    b.extend_from_slice(&le32(16));
    b.extend_from_slice(&le16(tag));
    b.extend_from_slice(&le16(channels));
    b.extend_from_slice(&le32(rate));
    b.extend_from_slice(&le32(rate * align as u32));
    b.extend_from_slice(&le16(align));
    b.extend_from_slice(&le16(bits));
    b.extend_from_slice(b"data");
    b.extend_from_slice(&le32(data.len() as u32));
    b.extend_from_slice(data);
    b
}

pub fn pcm16(samples: &[i16]) -> Vec<u8> {
    samples.iter().flat_map(|s| s.to_le_bytes()).collect()
}
