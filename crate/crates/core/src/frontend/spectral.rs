//! Time-domain conditioning and short-time spectra.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// First-order high-pass `y[t] = x[t] - k * x[t-1]`, with `y[0] = x[0]`.
pub fn preemphasize(signal: &[f64], k: f64) -> Result<Vec<f64>> {
    if signal.is_empty() {
        return Err(Error::InvalidInput(
            "pre-emphasis of an empty signal".into(),
        ));
    }
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidConfig(format!(
            "pre-emphasis coefficient {k} outside [0, 1]"
        )));
    }
    if let Some(t) = signal.iter().position(|s| !s.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite sample {} at index {t}",
            signal[t]
        )));
    }
    let mut out = Vec::with_capacity(signal.len());
    out.push(signal[0]);
    out.extend(signal.windows(2).map(|w| w[1] - k * w[0]));
    Ok(out)
}

/// Number of frames `frame_signal` produces for a signal of `len` samples.
pub fn frame_count(len: usize, frame_len: usize, hop: usize) -> usize {
    if len <= frame_len {
        1
    } else {
        (len - frame_len).div_ceil(hop) + 1
    }
}

/// Splits a signal into overlapping frames starting every `hop` samples.
///
/// The last frame is zero-padded to `frame_len`; a signal shorter than one
/// frame yields a single padded frame.
pub fn frame_signal(signal: &[f64], frame_len: usize, hop: usize) -> Result<Vec<Vec<f64>>> {
    if frame_len == 0 || hop == 0 || hop > frame_len {
        return Err(Error::InvalidConfig(format!(
            "frame geometry requires 0 < hop <= frame_len (hop {hop}, frame_len {frame_len})"
        )));
    }
    let count = frame_count(signal.len(), frame_len, hop);
    let frames = (0..count)
        .map(|f| {
            let start = f * hop;
            let end = (start + frame_len).min(signal.len());
            let mut frame = Vec::with_capacity(frame_len);
            if start < end {
                frame.extend_from_slice(&signal[start..end]);
            }
            frame.resize(frame_len, 0.0);
            frame
        })
        .collect();
    Ok(frames)
}

/// Hamming coefficients `0.54 - 0.46 cos(2π(n-1)/(N-1))` for `n = 1..=N`.
pub fn hamming_coefficients(len: usize) -> Result<Vec<f64>> {
    if len < 2 {
        return Err(Error::InvalidInput(format!(
            "Hamming window needs at least 2 samples, got {len}"
        )));
    }
    let denom = (len - 1) as f64;
    Ok((0..len)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / denom).cos())
        .collect())
}

pub fn hamming_window(frame: &[f64]) -> Result<Vec<f64>> {
    let coeffs = hamming_coefficients(frame.len())?;
    Ok(frame.iter().zip(&coeffs).map(|(s, w)| s * w).collect())
}

/// Reusable FFT plan for power spectra of a fixed size.
#[derive(Clone)]
pub struct SpectrumAnalyzer {
    fft_size: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectrumAnalyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectrumAnalyzer")
            .field("fft_size", &self.fft_size)
            .finish()
    }
}

impl SpectrumAnalyzer {
    pub fn new(fft_size: usize) -> Result<Self> {
        if fft_size == 0 || !fft_size.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "FFT size {fft_size} is not a power of two"
            )));
        }
        let fft = FftPlanner::new().plan_fft_forward(fft_size);
        Ok(Self { fft_size, fft })
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    /// `|S_n|^2` for `n = 0..=fft_size/2` of the zero-padded frame.
    pub fn power(&self, frame: &[f64]) -> Result<Vec<f64>> {
        if frame.len() > self.fft_size {
            return Err(Error::InvalidInput(format!(
                "frame of {} samples exceeds FFT size {}",
                frame.len(),
                self.fft_size
            )));
        }
        let mut buf: Vec<Complex<f64>> = frame.iter().map(|&s| Complex::new(s, 0.0)).collect();
        buf.resize(self.fft_size, Complex::new(0.0, 0.0));
        self.fft.process(&mut buf);
        Ok(buf[..self.num_bins()]
            .iter()
            .map(|c| c.norm_sqr())
            .collect())
    }
}

/// One-sided power spectrum of `frame`, zero-padded to `fft_size`.
pub fn power_spectrum(frame: &[f64], fft_size: usize) -> Result<Vec<f64>> {
    SpectrumAnalyzer::new(fft_size)?.power(frame)
}
