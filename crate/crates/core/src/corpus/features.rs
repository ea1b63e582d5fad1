//! Comma-separated feature store: one voiceprint per row.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::weighting::Voiceprint;

const ID_COLUMNS: [&str; 3] = ["subject_id", "vowel", "label"];

/// Voiceprints plus the cepstral index of their first value, so column
/// names (`c2`, `c3`, ...) survive a round-trip.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub first_coefficient: usize,
    pub voiceprints: Vec<Voiceprint>,
}

impl FeatureTable {
    pub fn new(first_coefficient: usize, voiceprints: Vec<Voiceprint>) -> Result<Self> {
        if let Some(first) = voiceprints.first() {
            let dim = first.values.len();
            if let Some(bad) = voiceprints.iter().find(|v| v.values.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: bad.values.len(),
                });
            }
        }
        Ok(Self {
            first_coefficient,
            voiceprints,
        })
    }

    pub fn dim(&self) -> usize {
        self.voiceprints.first().map_or(0, |v| v.values.len())
    }

    pub fn len(&self) -> usize {
        self.voiceprints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voiceprints.is_empty()
    }

    pub fn column_names(&self) -> Vec<String> {
        ID_COLUMNS
            .iter()
            .map(|s| s.to_string())
            .chain((0..self.dim()).map(|j| format!("c{}", self.first_coefficient + j)))
            .collect()
    }

    /// Serialized text. Floats use the shortest representation that parses
    /// back to the same bits.
    pub fn to_csv(&self) -> String {
        let mut out = self.column_names().join(",");
        out.push('\n');
        for vp in &self.voiceprints {
            out.push_str(&format!("{},{},{}", vp.subject_id, vp.vowel, vp.label));
            for v in &vp.values {
                out.push_str(&format!(",{v:?}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let err = |line: u64, column: Option<String>, message: String| Error::Table {
            path: origin.to_string(),
            line,
            column,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| err(1, None, e.to_string()))?
            .clone();
        for name in ID_COLUMNS {
            if !header.iter().any(|h| h == name) {
                return Err(err(1, Some(name.to_string()), "missing column".into()));
            }
        }
        for (i, name) in ID_COLUMNS.iter().enumerate() {
            if header.get(i) != Some(name) {
                return Err(err(
                    1,
                    Some(name.to_string()),
                    format!("expected column {} to be `{name}`", i + 1),
                ));
            }
        }
        let coef_names: Vec<&str> = header.iter().skip(ID_COLUMNS.len()).collect();
        if coef_names.is_empty() {
            return Err(err(1, None, "no coefficient columns".into()));
        }
        let first_coefficient = coef_names[0]
            .strip_prefix('c')
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| {
                err(
                    1,
                    Some(coef_names[0].to_string()),
                    "coefficient columns are named c<index>".into(),
                )
            })?;
        for (j, name) in coef_names.iter().enumerate() {
            let expected = format!("c{}", first_coefficient + j);
            if *name != expected {
                return Err(err(
                    1,
                    Some(expected),
                    format!("missing column (found `{name}` in its place)"),
                ));
            }
        }

        let width = header.len();
        let mut voiceprints = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                err(line, None, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != width {
                let column = header.get(record.len()).map(str::to_string);
                return Err(err(
                    line,
                    column,
                    format!("expected {width} fields, found {}", record.len()),
                ));
            }
            let vowel = record[1]
                .parse()
                .map_err(|e: Error| err(line, Some("vowel".into()), e.to_string()))?;
            let label = record[2]
                .parse()
                .map_err(|e: Error| err(line, Some("label".into()), e.to_string()))?;
            let values = record
                .iter()
                .skip(ID_COLUMNS.len())
                .zip(&coef_names)
                .map(|(cell, name)| {
                    cell.parse::<f64>().map_err(|_| {
                        err(
                            line,
                            Some(name.to_string()),
                            format!("`{cell}` is not a number"),
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            voiceprints.push(Voiceprint {
                subject_id: record[0].to_string(),
                vowel,
                label,
                values,
            });
        }
        Self::new(first_coefficient, voiceprints)
    }
}

pub fn persist_features(path: impl AsRef<Path>, table: &FeatureTable) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, table.to_csv()).map_err(|e| Error::io(path, e))
}

pub fn load_features(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    FeatureTable::parse(&text, &path.display().to_string())
}
