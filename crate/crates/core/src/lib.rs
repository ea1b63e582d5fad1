//! Entropy-weighted MFCC voiceprints and a small feedforward classifier for
//! sustained-vowel voice screening.
//!
//! The pipeline runs `AudioClip` → [`frontend::extract_mfcc`] →
//! [`weighting::make_voiceprint`] → [`nn::Classifier`] → [`eval`] metrics.
//! [`corpus`] handles WAV files, feature stores and synthetic data.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod frontend;
pub mod nn;
pub mod weighting;

pub use error::{Error, Result};
pub use frontend::{extract_mfcc, AudioClip, CepstraMatrix, FrontendConfig};
pub use weighting::{make_voiceprint, Label, Voiceprint, Vowel};
