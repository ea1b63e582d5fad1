//! Entropy-weighted cepstra and per-utterance voiceprints.
//!
//! Each coefficient column is min-max normalized, its Shannon entropy over
//! frames is computed with the `1/ln N` normalization, and columns with low
//! entropy (more information) receive higher weight `w_j ∝ 1 - e_j`. The
//! weights scale the original cepstra, and the frame average of the weighted
//! matrix is the voiceprint.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::CepstraMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Pd,
    Healthy,
    Unknown,
}

impl Label {
    /// Network target: 1 for healthy, 0 for PD.
    pub fn target(self) -> Option<f64> {
        match self {
            Label::Healthy => Some(1.0),
            Label::Pd => Some(0.0),
            Label::Unknown => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Pd => "pd",
            Label::Healthy => "healthy",
            Label::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pd" => Ok(Label::Pd),
            "healthy" | "hc" => Ok(Label::Healthy),
            "unknown" | "" => Ok(Label::Unknown),
            other => Err(Error::InvalidInput(format!("unknown label `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vowel {
    A,
    O,
    U,
    Other,
}

impl Vowel {
    pub fn as_str(self) -> &'static str {
        match self {
            Vowel::A => "a",
            Vowel::O => "o",
            Vowel::U => "u",
            Vowel::Other => "other",
        }
    }
}

impl fmt::Display for Vowel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Vowel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Vowel::A),
            "o" => Ok(Vowel::O),
            "u" => Ok(Vowel::U),
            "other" => Ok(Vowel::Other),
            other => Err(Error::InvalidInput(format!("unknown vowel `{other}`"))),
        }
    }
}

/// Where the entropy weights come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingMode {
    /// Weights computed from the frames of each utterance.
    #[default]
    PerUtterance,
    /// Weights computed once from the pooled frames of a reference corpus.
    Corpus,
}

/// Column-normalized cepstra plus a flag per constant (zero-information) column.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCepstra {
    pub matrix: CepstraMatrix,
    pub degenerate: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub entropies: Vec<f64>,
    /// Every column was zero-information, so uniform weights were used.
    pub uniform_fallback: bool,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Voiceprint {
    pub subject_id: String,
    pub vowel: Vowel,
    pub label: Label,
    pub values: Vec<f64>,
}

/// Identification carried into a [`Voiceprint`].
#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceInfo {
    pub subject_id: String,
    pub vowel: Vowel,
    pub label: Label,
}

/// `(max_j - x) / (max_j - min_j)` per column; constant columns become zeros.
pub fn normalize_columns(cepstra: &CepstraMatrix) -> NormalizedCepstra {
    let (rows, cols) = (cepstra.rows(), cepstra.cols());
    let mut degenerate = vec![false; cols];
    let mut ranges = Vec::with_capacity(cols);
    for (j, flag) in degenerate.iter_mut().enumerate() {
        let (lo, hi) = cepstra
            .column(j)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        *flag = hi == lo;
        ranges.push((hi, hi - lo));
    }
    let mut values = Vec::with_capacity(rows * cols);
    for row in cepstra.row_iter() {
        for (j, &v) in row.iter().enumerate() {
            let (hi, span) = ranges[j];
            values.push(if degenerate[j] { 0.0 } else { (hi - v) / span });
        }
    }
    NormalizedCepstra {
        matrix: cepstra.map_values(values),
        degenerate,
    }
}

/// Normalized Shannon entropy of each column, `-(1/ln N) Σ_i Y_ij ln Y_ij`
/// with `Y_ij` the column-share of each frame and `0 ln 0 = 0`.
///
/// Zero-information columns get entropy 1.
pub fn column_entropy(normalized: &NormalizedCepstra) -> Vec<f64> {
    let m = &normalized.matrix;
    let n = m.rows();
    (0..m.cols())
        .map(|j| {
            if normalized.degenerate[j] || n < 2 {
                return 1.0;
            }
            let total: f64 = m.column(j).sum();
            if total <= 0.0 {
                return 1.0;
            }
            let h: f64 = m
                .column(j)
                .filter(|&v| v > 0.0)
                .map(|v| {
                    let y = v / total;
                    y * y.ln()
                })
                .sum();
            (-h / (n as f64).ln()).clamp(0.0, 1.0)
        })
        .collect()
}

/// `w_j = (1 - e_j) / Σ_k (1 - e_k)`, falling back to uniform weights when
/// every entropy is 1.
pub fn entropy_weights(entropies: &[f64]) -> Result<WeightVector> {
    if entropies.is_empty() {
        return Err(Error::InvalidInput("no entropies to weight".into()));
    }
    if let Some((j, e)) = entropies
        .iter()
        .enumerate()
        .find(|(_, e)| !(0.0..=1.0).contains(*e))
    {
        return Err(Error::InvalidInput(format!(
            "entropy {e} of column {j} is outside [0, 1]"
        )));
    }
    let total: f64 = entropies.iter().map(|e| 1.0 - e).sum();
    let (weights, uniform_fallback) = if total > 0.0 {
        (entropies.iter().map(|e| (1.0 - e) / total).collect(), false)
    } else {
        let d = entropies.len() as f64;
        (vec![1.0 / d; entropies.len()], true)
    };
    Ok(WeightVector {
        weights,
        entropies: entropies.to_vec(),
        uniform_fallback,
    })
}

/// Entropy weights of one cepstra matrix (normalize, entropy, weight).
pub fn fit_weights(cepstra: &CepstraMatrix) -> Result<WeightVector> {
    entropy_weights(&column_entropy(&normalize_columns(cepstra)))
}

/// Entropy weights from the pooled frames of many utterances.
pub fn fit_corpus_weights(matrices: &[CepstraMatrix]) -> Result<WeightVector> {
    fit_weights(&CepstraMatrix::concat(matrices)?)
}

/// Scales column `j` of the original cepstra by `w_j`.
pub fn apply_weights(cepstra: &CepstraMatrix, weights: &WeightVector) -> Result<CepstraMatrix> {
    if weights.len() != cepstra.cols() {
        return Err(Error::DimensionMismatch {
            expected: cepstra.cols(),
            actual: weights.len(),
        });
    }
    let values = cepstra
        .row_iter()
        .flat_map(|row| row.iter().zip(&weights.weights).map(|(v, w)| v * w))
        .collect();
    Ok(cepstra.map_values(values))
}

fn column_means(m: &CepstraMatrix) -> Vec<f64> {
    let n = m.rows() as f64;
    (0..m.cols())
        .map(|j| m.column(j).sum::<f64>() / n)
        .collect()
}

/// Frame average of the cepstra weighted by `weights`.
pub fn voiceprint_with_weights(
    cepstra: &CepstraMatrix,
    weights: &WeightVector,
    info: UtteranceInfo,
) -> Result<Voiceprint> {
    let weighted = apply_weights(cepstra, weights)?;
    Ok(Voiceprint {
        subject_id: info.subject_id,
        vowel: info.vowel,
        label: info.label,
        values: column_means(&weighted),
    })
}

/// Per-utterance entropy weighting followed by frame averaging.
pub fn make_voiceprint(cepstra: &CepstraMatrix, info: UtteranceInfo) -> Result<Voiceprint> {
    let weights = fit_weights(cepstra)?;
    voiceprint_with_weights(cepstra, &weights, info)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn info() -> UtteranceInfo {
        UtteranceInfo {
            subject_id: "s1".into(),
            vowel: Vowel::A,
            label: Label::Pd,
        }
    }

    fn column(values: &[f64]) -> CepstraMatrix {
        CepstraMatrix::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn normalization_reverses_direction() {
        let n = normalize_columns(&column(&[1.0, 3.0, 2.0]));
        assert_eq!(n.matrix.values(), &[1.0, 0.0, 0.5]);
        assert_eq!(n.degenerate, vec![false]);
    }

    #[test]
    fn constant_column_is_flagged() {
        let n = normalize_columns(&column(&[5.0, 5.0, 5.0]));
        assert_eq!(n.matrix.values(), &[0.0, 0.0, 0.0]);
        assert_eq!(n.degenerate, vec![true]);
        assert_eq!(column_entropy(&n), vec![1.0]);
    }

    #[test]
    fn entropy_extremes() {
        let uniform = NormalizedCepstra {
            matrix: column(&[0.4, 0.4, 0.4, 0.4]),
            degenerate: vec![false],
        };
        assert!((column_entropy(&uniform)[0] - 1.0).abs() < 1e-15);
        let spike = NormalizedCepstra {
            matrix: column(&[0.0, 0.7, 0.0]),
            degenerate: vec![false],
        };
        assert_eq!(column_entropy(&spike), vec![0.0]);
    }

    #[test]
    fn entropy_of_three_frame_column() {
        let n = normalize_columns(&column(&[1.0, 3.0, 2.0]));
        let e = column_entropy(&n)[0];
        let y: [f64; 2] = [2.0 / 3.0, 1.0 / 3.0];
        let expected = -(y[0] * y[0].ln() + y[1] * y[1].ln()) / 3f64.ln();
        assert!((e - expected).abs() < 1e-15);
        assert!((e - 0.5794).abs() < 5e-5);
    }

    #[test]
    fn weights_from_entropies() {
        assert_eq!(
            entropy_weights(&[1.0, 0.0]).unwrap().weights,
            vec![0.0, 1.0]
        );
        assert_eq!(
            entropy_weights(&[0.5, 0.5]).unwrap().weights,
            vec![0.5, 0.5]
        );
        let w = entropy_weights(&[0.2, 0.6, 0.8]).unwrap().weights;
        for (a, b) in w.iter().zip([0.8 / 1.4, 0.4 / 1.4, 0.2 / 1.4]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((w[0] - 0.5714).abs() < 5e-5);
    }

    #[test]
    fn all_degenerate_falls_back_to_uniform() {
        let w = entropy_weights(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(w.uniform_fallback);
        assert_eq!(w.weights, vec![0.25; 4]);
        assert!(entropy_weights(&[1.2]).is_err());
        assert!(entropy_weights(&[]).is_err());
    }

    #[test]
    fn apply_weights_checks_dimension() {
        let m = CepstraMatrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let w = entropy_weights(&[0.5, 0.5]).unwrap();
        assert!(apply_weights(&m, &w).is_err());
        let one_hot = WeightVector {
            weights: vec![0.0, 0.0, 1.0],
            entropies: vec![1.0, 1.0, 0.0],
            uniform_fallback: false,
        };
        assert_eq!(
            apply_weights(&m, &one_hot).unwrap().values(),
            &[0.0, 0.0, 3.0]
        );
    }

    #[test]
    fn single_frame_voiceprint_is_uniformly_weighted_row() {
        let m = CepstraMatrix::from_rows(&[vec![2.0, -4.0]]).unwrap();
        let vp = make_voiceprint(&m, info()).unwrap();
        assert_eq!(vp.values, vec![1.0, -2.0]);
        assert_eq!(vp.label, Label::Pd);
    }

    #[test]
    fn identical_rows_use_uniform_fallback() {
        let row = vec![1.0, 2.0, 3.0, 4.0];
        let m = CepstraMatrix::from_rows(&vec![row.clone(); 5]).unwrap();
        let w = fit_weights(&m).unwrap();
        assert!(w.uniform_fallback);
        let vp = make_voiceprint(&m, info()).unwrap();
        let expected: Vec<f64> = row.iter().map(|v| v / 4.0).collect();
        for (a, b) in vp.values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn label_and_vowel_parsing() {
        assert_eq!("PD".parse::<Label>().unwrap(), Label::Pd);
        assert_eq!("healthy".parse::<Label>().unwrap(), Label::Healthy);
        assert!("sick".parse::<Label>().is_err());
        assert_eq!("u".parse::<Vowel>().unwrap(), Vowel::U);
        assert!("e".parse::<Vowel>().is_err());
    }
}
