//! Mel warping, triangular filterbank, log compression and cosine transform.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::FrontendConfig;
use crate::error::{Error, Result};

/// Floor applied to filterbank energies before the logarithm.
pub const LOG_ENERGY_FLOOR: f64 = 1e-10;

/// Logarithm base used in the Hz to mel mapping.
///
/// `Log10` keeps 1000 Hz at (almost exactly) 1000 mel. `NaturalLog` is the
/// `2595 ln(1 + f/700)` variant, which does not.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MelScale {
    #[default]
    Log10,
    NaturalLog,
}

impl MelScale {
    pub fn hz_to_mel(self, hz: f64) -> Result<f64> {
        if !(hz >= 0.0) || !hz.is_finite() {
            return Err(Error::InvalidInput(format!(
                "frequency {hz} Hz is not a finite non-negative value"
            )));
        }
        let ratio = 1.0 + hz / 700.0;
        Ok(match self {
            MelScale::Log10 => 2595.0 * ratio.log10(),
            MelScale::NaturalLog => 2595.0 * ratio.ln(),
        })
    }

    pub fn mel_to_hz(self, mel: f64) -> f64 {
        let ratio = match self {
            MelScale::Log10 => 10f64.powf(mel / 2595.0),
            MelScale::NaturalLog => (mel / 2595.0).exp(),
        };
        700.0 * (ratio - 1.0)
    }
}

/// `2595 log10(1 + f/700)`.
pub fn hz_to_mel(hz: f64) -> Result<f64> {
    MelScale::Log10.hz_to_mel(hz)
}

pub fn mel_to_hz(mel: f64) -> f64 {
    MelScale::Log10.mel_to_hz(mel)
}

/// Triangular filters over the one-sided FFT bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Filterbank {
    /// `num_filters` rows of `fft_size/2 + 1` weights.
    pub rows: Vec<Vec<f64>>,
    /// Edge and center frequencies in Hz: `num_filters + 2` points, the
    /// first and last being `fmin` and `fmax`.
    pub points_hz: Vec<f64>,
    pub fft_size: usize,
    pub sample_rate: f64,
}

impl Filterbank {
    pub fn num_filters(&self) -> usize {
        self.rows.len()
    }

    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn centers_hz(&self) -> &[f64] {
        &self.points_hz[1..self.points_hz.len() - 1]
    }

    pub fn bin_hz(&self, bin: usize) -> f64 {
        bin as f64 * self.sample_rate / self.fft_size as f64
    }
}

/// Builds `num_filters` triangles whose centers are equally spaced on the
/// mel axis between `fmin` and `fmax`.
///
/// Each triangle rises linearly from the previous center to its own center
/// (weight 1) and falls to the next one. Weights are evaluated at the exact
/// bin frequency, so a bin sitting on a center gets the full peak.
pub fn build_mel_filterbank(config: &FrontendConfig, sample_rate: f64) -> Result<Filterbank> {
    let geometry = config.resolve(sample_rate)?;
    let scale = config.mel_scale;
    let lo = scale.hz_to_mel(config.fmin_hz)?;
    let hi = scale.hz_to_mel(geometry.fmax_hz)?;
    let count = config.num_filters + 2;
    let step = (hi - lo) / (count - 1) as f64;
    let mut points_hz: Vec<f64> = (0..count)
        .map(|i| scale.mel_to_hz(lo + step * i as f64))
        .collect();
    // Pin the edges so round-off in mel_to_hz cannot move them.
    points_hz[0] = config.fmin_hz;
    points_hz[count - 1] = geometry.fmax_hz;

    let fft_size = geometry.fft_size;
    let bin_width = sample_rate / fft_size as f64;
    let centers = &points_hz[1..count - 1];
    for (j, pair) in centers.windows(2).enumerate() {
        let a = (pair[0] / bin_width).round();
        let b = (pair[1] / bin_width).round();
        if a == b {
            return Err(Error::InvalidConfig(format!(
                "{} filters are too many for a {fft_size}-point FFT at {sample_rate} Hz: \
                 centers {} and {} ({:.2} Hz, {:.2} Hz) fall on bin {a}",
                config.num_filters,
                j + 1,
                j + 2,
                pair[0],
                pair[1]
            )));
        }
    }

    let num_bins = fft_size / 2 + 1;
    let mut rows = Vec::with_capacity(config.num_filters);
    for j in 0..config.num_filters {
        let (left, center, right) = (points_hz[j], points_hz[j + 1], points_hz[j + 2]);
        let row: Vec<f64> = (0..num_bins)
            .map(|bin| {
                let f = bin as f64 * bin_width;
                if f <= left || f >= right {
                    0.0
                } else if f <= center {
                    (f - left) / (center - left)
                } else {
                    (right - f) / (right - center)
                }
            })
            .collect();
        if row.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidConfig(format!(
                "filter {} ({left:.2}..{right:.2} Hz) covers no FFT bin",
                j + 1
            )));
        }
        rows.push(row);
    }
    Ok(Filterbank {
        rows,
        points_hz,
        fft_size,
        sample_rate,
    })
}

/// `ln(max(Σ_bin H[j, bin] · P[bin], floor))` per filter.
pub fn log_filterbank_energies(spectrum: &[f64], filterbank: &Filterbank) -> Result<Vec<f64>> {
    if spectrum.len() != filterbank.num_bins() {
        return Err(Error::DimensionMismatch {
            expected: filterbank.num_bins(),
            actual: spectrum.len(),
        });
    }
    Ok(filterbank
        .rows
        .iter()
        .map(|row| {
            let energy: f64 = row.iter().zip(spectrum).map(|(w, p)| w * p).sum();
            energy.max(LOG_ENERGY_FLOOR).ln()
        })
        .collect())
}

/// Cepstral coefficients `c_i` for `i = first..first+count`, with
/// `c_i = sqrt(2/N) Σ_j m_j cos(π i (j - 0.5) / N)` and `j` running `1..=N`.
pub fn dct_cepstra_range(log_energies: &[f64], first: usize, count: usize) -> Result<Vec<f64>> {
    let n = log_energies.len();
    if n == 0 {
        return Err(Error::InvalidInput("no filterbank energies".into()));
    }
    if first == 0 || first + count - 1 > n {
        return Err(Error::InvalidConfig(format!(
            "cepstral indices {first}..={} need 1 <= i <= {n}",
            first + count - 1
        )));
    }
    let scale = (2.0 / n as f64).sqrt();
    Ok((first..first + count)
        .map(|i| {
            let sum: f64 = log_energies
                .iter()
                .enumerate()
                .map(|(j, m)| m * (PI * i as f64 / n as f64 * (j as f64 + 0.5)).cos())
                .sum();
            scale * sum
        })
        .collect())
}

/// `c_1 ..= c_num_ceps` of the log filterbank energies.
pub fn dct_cepstra(log_energies: &[f64], num_ceps: usize) -> Result<Vec<f64>> {
    if num_ceps == 0 {
        return Err(Error::InvalidConfig("num_ceps must be positive".into()));
    }
    dct_cepstra_range(log_energies, 1, num_ceps)
}
