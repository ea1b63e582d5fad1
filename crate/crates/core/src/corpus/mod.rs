//! Data ingestion and persistence: WAV files, manifests, feature stores,
//! model files, and the synthetic vowel corpus.

mod features;
mod manifest;
mod model_file;
mod synth;
mod wav;

pub use features::{load_features, persist_features, FeatureTable};
pub use manifest::{
    build_synthetic_dataset, DatasetManifest, DatasetSpec, ManifestEntry, SyntheticDataset,
    SyntheticSubject, MANIFEST_HEADER,
};
pub use model_file::{load_model, save_model, ModelFile, MODEL_FORMAT, MODEL_VERSION};
pub use synth::{
    acoustic_profile, synth_vowel, vowel_formants, AcousticProfile, Formant, Sex, Stat,
    SynthParams, HEALTHY_FEMALE, HEALTHY_MALE, PD_FEMALE, PD_MALE, PEAK_LEVEL,
};
pub use wav::{encode_pcm, encode_wav, load_wav, parse_wav, quantize, write_wav, WavFormat};
