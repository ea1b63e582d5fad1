//! MFCC front end: pre-emphasis, framing, Hamming window, power spectrum,
//! mel filterbank, log compression and cosine transform.
//!
//! Every stage is a pure function; [`MfccExtractor`] caches the window, FFT
//! plan and filterbank for one sample rate and can be shared across threads.

mod mel;
mod spectral;

use serde::{Deserialize, Serialize};

pub use mel::{
    build_mel_filterbank, dct_cepstra, dct_cepstra_range, hz_to_mel, log_filterbank_energies,
    mel_to_hz, Filterbank, MelScale, LOG_ENERGY_FLOOR,
};
pub use spectral::{
    frame_count, frame_signal, hamming_coefficients, hamming_window, power_spectrum, preemphasize,
    SpectrumAnalyzer,
};

use crate::error::{Error, Result};

/// Mono audio with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("audio clip has no samples".into()));
        }
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sample rate {sample_rate} must be positive"
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite sample {} at index {i}",
                samples[i]
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrontendConfig {
    pub preemphasis: f64,
    pub frame_len_ms: f64,
    pub hop_ms: f64,
    /// `None` picks the smallest power of two holding one frame.
    pub fft_size: Option<usize>,
    pub num_filters: usize,
    pub fmin_hz: f64,
    /// `None` means the Nyquist frequency.
    pub fmax_hz: Option<f64>,
    pub num_ceps: usize,
    /// Skip `c_1` and deliver `c_2 ..= c_{num_ceps+1}` instead.
    pub drop_c1: bool,
    pub mel_scale: MelScale,
}

impl Default for FrontendConfig {
    fn default() -> Self {
        Self {
            preemphasis: 0.97,
            frame_len_ms: 25.0,
            hop_ms: 10.0,
            fft_size: None,
            num_filters: 26,
            fmin_hz: 0.0,
            fmax_hz: None,
            num_ceps: 19,
            drop_c1: true,
            mel_scale: MelScale::Log10,
        }
    }
}

/// Sample-domain frame layout derived from a [`FrontendConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameGeometry {
    pub frame_len: usize,
    pub hop: usize,
    pub fft_size: usize,
    pub fmax_hz: f64,
}

impl FrontendConfig {
    /// Index of the first delivered cepstral coefficient.
    pub fn first_coefficient(&self) -> usize {
        if self.drop_c1 {
            2
        } else {
            1
        }
    }

    /// Validates the configuration for `sample_rate` and converts durations
    /// to sample counts.
    pub fn resolve(&self, sample_rate: f64) -> Result<FrameGeometry> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return bad(format!("sample rate {sample_rate} must be positive"));
        }
        if !(0.0..=1.0).contains(&self.preemphasis) {
            return bad(format!(
                "pre-emphasis coefficient {} outside [0, 1]",
                self.preemphasis
            ));
        }
        if !(self.hop_ms > 0.0 && self.hop_ms <= self.frame_len_ms) {
            return bad(format!(
                "need 0 < hop_ms <= frame_len_ms (hop {} ms, frame {} ms)",
                self.hop_ms, self.frame_len_ms
            ));
        }
        let frame_len = (self.frame_len_ms * sample_rate / 1000.0).round() as usize;
        let hop = (self.hop_ms * sample_rate / 1000.0).round() as usize;
        if frame_len < 2 || hop == 0 {
            return bad(format!(
                "{} ms frames at {sample_rate} Hz are shorter than two samples",
                self.frame_len_ms
            ));
        }
        let fft_size = self
            .fft_size
            .unwrap_or_else(|| frame_len.next_power_of_two());
        if !fft_size.is_power_of_two() {
            return bad(format!("FFT size {fft_size} is not a power of two"));
        }
        if fft_size < frame_len {
            return bad(format!(
                "FFT size {fft_size} is smaller than the {frame_len}-sample frame"
            ));
        }
        let nyquist = sample_rate / 2.0;
        let fmax_hz = self.fmax_hz.unwrap_or(nyquist);
        if !(self.fmin_hz >= 0.0 && self.fmin_hz < fmax_hz && fmax_hz <= nyquist) {
            return bad(format!(
                "need 0 <= fmin < fmax <= {nyquist} Hz (fmin {}, fmax {fmax_hz})",
                self.fmin_hz
            ));
        }
        if self.num_filters == 0 || self.num_ceps == 0 {
            return bad("num_filters and num_ceps must be positive".into());
        }
        let last = self.num_ceps + self.first_coefficient() - 1;
        if last > self.num_filters {
            return bad(format!(
                "coefficient c_{last} needs at least {last} filters, have {}",
                self.num_filters
            ));
        }
        Ok(FrameGeometry {
            frame_len,
            hop,
            fft_size,
            fmax_hz,
        })
    }
}

/// `rows` frames by `cols` cepstral coefficients, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CepstraMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    first_coefficient: usize,
}

impl CepstraMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        Self::with_first_coefficient(rows, cols, values, 1)
    }

    pub fn with_first_coefficient(
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        first_coefficient: usize,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "cepstra matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at row {}, column {}",
                i / cols,
                i % cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            values,
            first_coefficient,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Cepstral index of column 0 (1, or 2 when `c_1` was dropped).
    pub fn first_coefficient(&self) -> usize {
        self.first_coefficient
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.cols)
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(col).step_by(self.cols).copied()
    }

    /// Same shape and coefficient origin, new values.
    pub(crate) fn map_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            rows: self.rows,
            cols: self.cols,
            values,
            first_coefficient: self.first_coefficient,
        }
    }

    /// Stacks the frames of several matrices with equal width.
    pub fn concat(matrices: &[CepstraMatrix]) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::InvalidInput("nothing to concatenate".into()))?;
        let mut values = Vec::new();
        let mut rows = 0;
        for m in matrices {
            if m.cols != first.cols {
                return Err(Error::DimensionMismatch {
                    expected: first.cols,
                    actual: m.cols,
                });
            }
            values.extend_from_slice(&m.values);
            rows += m.rows;
        }
        Self::with_first_coefficient(rows, first.cols, values, first.first_coefficient)
    }
}

/// Precomputed pipeline state for one configuration and sample rate.
#[derive(Debug, Clone)]
pub struct MfccExtractor {
    config: FrontendConfig,
    geometry: FrameGeometry,
    sample_rate: f64,
    window: Vec<f64>,
    analyzer: SpectrumAnalyzer,
    filterbank: Filterbank,
}

impl MfccExtractor {
    pub fn new(config: &FrontendConfig, sample_rate: f64) -> Result<Self> {
        let geometry = config.resolve(sample_rate)?;
        Ok(Self {
            config: config.clone(),
            geometry,
            sample_rate,
            window: hamming_coefficients(geometry.frame_len)?,
            analyzer: SpectrumAnalyzer::new(geometry.fft_size)?,
            filterbank: build_mel_filterbank(config, sample_rate)?,
        })
    }

    pub fn geometry(&self) -> FrameGeometry {
        self.geometry
    }

    pub fn filterbank(&self) -> &Filterbank {
        &self.filterbank
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Cepstra of one already pre-emphasized frame.
    pub fn frame_cepstra(&self, frame: &[f64]) -> Result<Vec<f64>> {
        if frame.len() != self.window.len() {
            return Err(Error::DimensionMismatch {
                expected: self.window.len(),
                actual: frame.len(),
            });
        }
        let windowed: Vec<f64> = frame.iter().zip(&self.window).map(|(s, w)| s * w).collect();
        let spectrum = self.analyzer.power(&windowed)?;
        let log_energies = log_filterbank_energies(&spectrum, &self.filterbank)?;
        dct_cepstra_range(
            &log_energies,
            self.config.first_coefficient(),
            self.config.num_ceps,
        )
    }

    pub fn extract(&self, clip: &AudioClip) -> Result<CepstraMatrix> {
        if clip.sample_rate() != self.sample_rate {
            return Err(Error::InvalidInput(format!(
                "clip sample rate {} Hz does not match extractor rate {} Hz",
                clip.sample_rate(),
                self.sample_rate
            )));
        }
        let emphasized = preemphasize(clip.samples(), self.config.preemphasis)?;
        let frames = frame_signal(&emphasized, self.geometry.frame_len, self.geometry.hop)?;
        let rows = frames.len();
        let mut values = Vec::with_capacity(rows * self.config.num_ceps);
        for (index, frame) in frames.iter().enumerate() {
            let ceps = self.frame_cepstra(frame).map_err(|e| Error::Frame {
                index,
                source: Box::new(e),
            })?;
            values.extend(ceps);
        }
        CepstraMatrix::with_first_coefficient(
            rows,
            self.config.num_ceps,
            values,
            self.config.first_coefficient(),
        )
    }
}

/// Runs the whole front end on one clip.
pub fn extract_mfcc(clip: &AudioClip, config: &FrontendConfig) -> Result<CepstraMatrix> {
    MfccExtractor::new(config, clip.sample_rate())?.extract(clip)
}
