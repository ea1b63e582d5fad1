//! Dataset manifests and synthetic corpus generation.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::synth::{
    acoustic_profile, synth_vowel, truncated_normal, vowel_formants, Sex, Stat, SynthParams,
};
use crate::error::{Error, Result};
use crate::frontend::{AudioClip, FrontendConfig, MfccExtractor};
use crate::weighting::{make_voiceprint, Label, UtteranceInfo, Voiceprint, Vowel};

pub const MANIFEST_HEADER: [&str; 4] = ["subject_id", "vowel", "label", "source"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub vowel: Vowel,
    pub label: Label,
    /// WAV path, relative to the manifest's directory unless absolute.
    pub source: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    pub provenance: String,
}

impl DatasetManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Each subject id must carry a single label.
    pub fn validate(&self) -> Result<()> {
        let mut seen: HashMap<&str, Label> = HashMap::new();
        for e in &self.entries {
            if e.subject_id.is_empty() {
                return Err(Error::InvalidInput(
                    "manifest entry without subject id".into(),
                ));
            }
            if let Some(prev) = seen.insert(&e.subject_id, e.label) {
                if prev != e.label {
                    return Err(Error::InvalidInput(format!(
                        "subject `{}` is labeled both {prev} and {}",
                        e.subject_id, e.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn resolve(&self, base_dir: &Path, entry: &ManifestEntry) -> PathBuf {
        let p = Path::new(&entry.source);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base_dir.join(p)
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in self.provenance.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&MANIFEST_HEADER.join(","));
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.subject_id, e.vowel, e.label, e.source
            ));
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let table_err = |line: u64, column: Option<&str>, message: String| Error::Table {
            path: origin.to_string(),
            line,
            column: column.map(str::to_string),
            message,
        };
        let mut provenance = Vec::new();
        let mut header_seen = false;
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = (i + 1) as u64;
            let trimmed = raw.trim();
            if let Some(comment) = trimmed.strip_prefix('#') {
                if !header_seen {
                    provenance.push(comment.trim_start().to_string());
                }
                continue;
            }
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if !header_seen {
                for name in MANIFEST_HEADER {
                    if !fields.contains(&name) {
                        return Err(table_err(line, Some(name), "missing column".into()));
                    }
                }
                if fields != MANIFEST_HEADER {
                    return Err(table_err(
                        line,
                        None,
                        format!("header must be `{}`", MANIFEST_HEADER.join(",")),
                    ));
                }
                header_seen = true;
                continue;
            }
            if fields.len() != MANIFEST_HEADER.len() {
                return Err(table_err(
                    line,
                    MANIFEST_HEADER.get(fields.len()).copied(),
                    format!("expected 4 fields, found {}", fields.len()),
                ));
            }
            let vowel = fields[1]
                .parse()
                .map_err(|e: Error| table_err(line, Some("vowel"), e.to_string()))?;
            let label = fields[2]
                .parse()
                .map_err(|e: Error| table_err(line, Some("label"), e.to_string()))?;
            entries.push(ManifestEntry {
                subject_id: fields[0].to_string(),
                vowel,
                label,
                source: fields[3].to_string(),
            });
        }
        if !header_seen {
            return Err(table_err(0, None, "no header row".into()));
        }
        let manifest = Self {
            entries,
            provenance: provenance.join("\n"),
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// Shape of a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpec {
    pub pd_subjects: usize,
    pub healthy_subjects: usize,
    pub pd_female_fraction: f64,
    pub healthy_female_fraction: f64,
    pub vowels: Vec<Vowel>,
    /// Multiplier on the group standard deviations when drawing speakers;
    /// 0 gives every speaker the group-mean preset voice.
    pub spread: f64,
    pub sample_rate: f64,
    pub duration_s: f64,
}

impl Default for DatasetSpec {
    /// 20 PD (6 women) and 20 healthy (10 women) speakers, three vowels each.
    fn default() -> Self {
        Self {
            pd_subjects: 20,
            healthy_subjects: 20,
            pd_female_fraction: 0.3,
            healthy_female_fraction: 0.5,
            vowels: vec![Vowel::A, Vowel::O, Vowel::U],
            spread: 1.0,
            sample_rate: 16_000.0,
            duration_s: 1.0,
        }
    }
}

impl DatasetSpec {
    /// All-PD set with vowels /a/ and /o/, the layout of an independent test set.
    pub fn pd_test_set(subjects: usize) -> Self {
        Self {
            pd_subjects: subjects,
            healthy_subjects: 0,
            vowels: vec![Vowel::A, Vowel::O],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pd_subjects + self.healthy_subjects == 0 {
            return Err(Error::InvalidConfig(
                "the corpus needs at least one subject".into(),
            ));
        }
        if self.vowels.is_empty() {
            return Err(Error::InvalidConfig(
                "the corpus needs at least one vowel".into(),
            ));
        }
        for f in [self.pd_female_fraction, self.healthy_female_fraction] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidConfig(format!(
                    "female fraction {f} outside [0, 1]"
                )));
            }
        }
        if !(self.spread >= 0.0 && self.spread.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "spread {} must be finite and non-negative",
                self.spread
            )));
        }
        if !(self.sample_rate > 0.0 && self.duration_s > 0.0) {
            return Err(Error::InvalidConfig(
                "sample rate and duration must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-speaker voice parameters drawn for a synthetic subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSubject {
    pub subject_id: String,
    pub label: Label,
    pub sex: Sex,
    pub f0_hz: f64,
    pub jitter_pct: f64,
    pub shimmer_pct: f64,
    pub hnr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub manifest: DatasetManifest,
    pub subjects: Vec<SyntheticSubject>,
    /// Clip `i` belongs to manifest entry `i`.
    pub clips: Vec<AudioClip>,
    pub params: Vec<SynthParams>,
}

impl SyntheticDataset {
    /// Per-utterance entropy-weighted voiceprints, in manifest order.
    pub fn voiceprints(&self, config: &FrontendConfig) -> Result<Vec<Voiceprint>> {
        let Some(first) = self.clips.first() else {
            return Ok(Vec::new());
        };
        let extractor = MfccExtractor::new(config, first.sample_rate())?;
        self.manifest
            .entries
            .iter()
            .zip(&self.clips)
            .map(|(e, clip)| {
                let info = UtteranceInfo {
                    subject_id: e.subject_id.clone(),
                    vowel: e.vowel,
                    label: e.label,
                };
                make_voiceprint(&extractor.extract(clip)?, info)
            })
            .collect()
    }
}

fn group_subjects<R: RngCore>(
    rng: &mut R,
    label: Label,
    count: usize,
    female_fraction: f64,
    spread: f64,
) -> Result<Vec<SyntheticSubject>> {
    let prefix = match label {
        Label::Pd => "pd",
        _ => "hc",
    };
    let females = (count as f64 * female_fraction).round() as usize;
    (0..count)
        .map(|i| {
            let sex = if i < females { Sex::Female } else { Sex::Male };
            let p = acoustic_profile(label, sex)?;
            let s = |st: Stat| Stat {
                mean: st.mean,
                sd: st.sd * spread,
            };
            Ok(SyntheticSubject {
                subject_id: format!("{prefix}{:02}", i + 1),
                label,
                sex,
                f0_hz: truncated_normal(rng, s(p.f0_hz), 50.0, 500.0),
                jitter_pct: truncated_normal(rng, s(p.jitter_pct), 0.0, 10.0),
                shimmer_pct: truncated_normal(rng, s(p.shimmer_pct), 0.0, 20.0),
                hnr_db: truncated_normal(rng, s(p.hnr_db), 0.0, 40.0),
            })
        })
        .collect()
}

/// Draws per-subject voice parameters from the group statistics and
/// synthesizes one clip per subject and vowel. Reproducible per seed.
pub fn build_synthetic_dataset(spec: &DatasetSpec, seed: u64) -> Result<SyntheticDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    let mut subjects = group_subjects(
        &mut rng,
        Label::Pd,
        spec.pd_subjects,
        spec.pd_female_fraction,
        spec.spread,
    )?;
    subjects.extend(group_subjects(
        &mut rng,
        Label::Healthy,
        spec.healthy_subjects,
        spec.healthy_female_fraction,
        spec.spread,
    )?);

    let mut entries = Vec::new();
    let mut params = Vec::new();
    for s in &subjects {
        for &vowel in &spec.vowels {
            entries.push(ManifestEntry {
                subject_id: s.subject_id.clone(),
                vowel,
                label: s.label,
                source: format!("wav/{}_{}.wav", s.subject_id, vowel),
            });
            params.push(SynthParams {
                f0_hz: s.f0_hz,
                jitter_pct: s.jitter_pct,
                shimmer_pct: s.shimmer_pct,
                hnr_db: Some(s.hnr_db),
                duration_s: spec.duration_s,
                sample_rate: spec.sample_rate,
                formants: vowel_formants(vowel, s.sex),
                seed: rng.next_u64(),
            });
        }
    }
    let clips = params.iter().map(synth_vowel).collect::<Result<Vec<_>>>()?;
    let provenance = format!(
        "synthetic corpus: seed {seed}, {} PD + {} healthy subjects, vowels {}, spread {}, {} Hz, {} s",
        spec.pd_subjects,
        spec.healthy_subjects,
        spec.vowels.iter().map(|v| v.as_str()).collect::<Vec<_>>().join("/"),
        spec.spread,
        spec.sample_rate,
        spec.duration_s
    );
    Ok(SyntheticDataset {
        manifest: DatasetManifest {
            entries,
            provenance,
        },
        subjects,
        clips,
        params,
    })
}
