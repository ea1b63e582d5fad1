//! RIFF/WAVE reading and writing for 16- and 24-bit integer PCM.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::frontend::AudioClip;

const WAVE_FORMAT_PCM: u16 = 1;
const WAVE_FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavFormat {
    pub channels: u16,
    pub sample_rate: u32,
    pub bits_per_sample: u16,
}

impl WavFormat {
    pub fn block_align(&self) -> usize {
        self.channels as usize * self.bits_per_sample as usize / 8
    }

    fn full_scale(&self) -> f64 {
        (1u64 << (self.bits_per_sample - 1)) as f64
    }
}

fn wav_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Wav {
        offset,
        message: message.into(),
    }
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(bytes: &[u8], body: usize, size: usize) -> Result<WavFormat> {
    if size < 16 {
        return Err(wav_err(
            body - 4,
            format!("fmt chunk is {size} bytes, need at least 16"),
        ));
    }
    let tag = u16_at(bytes, body);
    let pcm = match tag {
        WAVE_FORMAT_PCM => true,
        WAVE_FORMAT_EXTENSIBLE if size >= 40 => u16_at(bytes, body + 24) == WAVE_FORMAT_PCM,
        _ => false,
    };
    if !pcm {
        return Err(wav_err(
            body,
            format!("unsupported encoding (format tag {tag:#06x}); only integer PCM is read"),
        ));
    }
    let format = WavFormat {
        channels: u16_at(bytes, body + 2),
        sample_rate: u32_at(bytes, body + 4),
        bits_per_sample: u16_at(bytes, body + 14),
    };
    if !(1..=2).contains(&format.channels) {
        return Err(wav_err(
            body + 2,
            format!(
                "{} channels; only mono and stereo are read",
                format.channels
            ),
        ));
    }
    if format.sample_rate == 0 {
        return Err(wav_err(body + 4, "sample rate is zero"));
    }
    if !matches!(format.bits_per_sample, 16 | 24) {
        return Err(wav_err(
            body + 14,
            format!(
                "{}-bit samples; only 16 and 24 bit are read",
                format.bits_per_sample
            ),
        ));
    }
    let block_align = u16_at(bytes, body + 12) as usize;
    if block_align != format.block_align() {
        return Err(wav_err(
            body + 12,
            format!(
                "block align {block_align} does not match {} channels of {} bits",
                format.channels, format.bits_per_sample
            ),
        ));
    }
    Ok(format)
}

fn decode_samples(data: &[u8], format: WavFormat) -> Vec<f64> {
    let width = format.bits_per_sample as usize / 8;
    let scale = format.full_scale();
    let channels = format.channels as usize;
    let value = |s: &[u8]| -> f64 {
        let v = match width {
            2 => i16::from_le_bytes([s[0], s[1]]) as i32,
            _ => i32::from_le_bytes([0, s[0], s[1], s[2]]) >> 8,
        };
        v as f64 / scale
    };
    data.chunks_exact(format.block_align())
        .map(|frame| {
            let sum: f64 = frame.chunks_exact(width).map(value).sum();
            sum / channels as f64
        })
        .collect()
}

/// Parses a WAV byte buffer; stereo is averaged to mono and integer
/// samples are scaled to `[-1, 1)`.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioClip> {
    if bytes.len() < 12 {
        return Err(wav_err(bytes.len(), "file too short for a RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(wav_err(0, "missing `RIFF` signature"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(wav_err(8, "missing `WAVE` form type"));
    }
    let mut format = None;
    let mut pos = 12;
    while pos < bytes.len() {
        if bytes.len() - pos < 8 {
            return Err(wav_err(pos, "truncated chunk header"));
        }
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        if size > bytes.len() - body {
            return Err(wav_err(
                pos + 4,
                format!(
                    "chunk `{}` declares {size} bytes but only {} remain",
                    String::from_utf8_lossy(id),
                    bytes.len() - body
                ),
            ));
        }
        match id {
            b"fmt " => format = Some(parse_fmt(bytes, body, size)?),
            b"data" => {
                let format =
                    format.ok_or_else(|| wav_err(pos, "`data` chunk before `fmt ` chunk"))?;
                if !size.is_multiple_of(format.block_align()) {
                    return Err(wav_err(
                        pos + 4,
                        format!(
                            "data size {size} is not a multiple of the {}-byte block",
                            format.block_align()
                        ),
                    ));
                }
                if size == 0 {
                    return Err(wav_err(pos + 4, "data chunk holds no samples"));
                }
                let samples = decode_samples(&bytes[body..body + size], format);
                return AudioClip::new(samples, format.sample_rate as f64);
            }
            _ => {}
        }
        pos = body + size + (size & 1);
    }
    Err(wav_err(
        bytes.len(),
        if format.is_some() {
            "no `data` chunk"
        } else {
            "no `fmt ` chunk"
        },
    ))
}

pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_wav(&bytes)
}

/// Encodes already-quantized interleaved samples as a PCM WAV file.
pub fn encode_pcm(samples: &[i32], format: WavFormat) -> Vec<u8> {
    let width = format.bits_per_sample as usize / 8;
    let data_len = samples.len() * width;
    let mut out = Vec::with_capacity(44 + data_len + 1);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len + (data_len & 1)) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&WAVE_FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&format.channels.to_le_bytes());
    out.extend_from_slice(&format.sample_rate.to_le_bytes());
    let byte_rate = format.sample_rate as usize * format.block_align();
    out.extend_from_slice(&(byte_rate as u32).to_le_bytes());
    out.extend_from_slice(&(format.block_align() as u16).to_le_bytes());
    out.extend_from_slice(&format.bits_per_sample.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in samples {
        out.extend_from_slice(&s.to_le_bytes()[..width]);
    }
    if data_len & 1 == 1 {
        out.push(0);
    }
    out
}

/// Rounds `[-1, 1)` samples to signed integers of `bits` width, clamping.
pub fn quantize(samples: &[f64], bits: u16) -> Vec<i32> {
    let scale = (1u64 << (bits - 1)) as f64;
    let (lo, hi) = (-scale, scale - 1.0);
    samples
        .iter()
        .map(|s| (s * scale).round().clamp(lo, hi) as i32)
        .collect()
}

/// Mono clip to WAV bytes at 16 or 24 bits.
pub fn encode_wav(clip: &AudioClip, bits_per_sample: u16) -> Result<Vec<u8>> {
    if !matches!(bits_per_sample, 16 | 24) {
        return Err(Error::InvalidConfig(format!(
            "cannot write {bits_per_sample}-bit WAV; use 16 or 24"
        )));
    }
    let rate = clip.sample_rate();
    if rate.fract() != 0.0 || rate > u32::MAX as f64 {
        return Err(Error::InvalidInput(format!(
            "sample rate {rate} is not representable in a WAV header"
        )));
    }
    let format = WavFormat {
        channels: 1,
        sample_rate: rate as u32,
        bits_per_sample,
    };
    Ok(encode_pcm(
        &quantize(clip.samples(), bits_per_sample),
        format,
    ))
}

pub fn write_wav(path: impl AsRef<Path>, clip: &AudioClip, bits_per_sample: u16) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_wav(clip, bits_per_sample)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
