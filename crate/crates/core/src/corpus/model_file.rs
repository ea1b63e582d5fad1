//! Self-describing JSON model documents.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Classifier, Layer, Network, Standardizer, TrainConfig};

pub const MODEL_FORMAT: &str = "wmfcc-model";
pub const MODEL_VERSION: u32 = 1;

/// On-disk form of a trained classifier. Weight matrices are row-major,
/// one row per output unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub layer_sizes: Vec<usize>,
    pub hidden_activation: String,
    pub output_activation: String,
    pub layers: Vec<Layer>,
    pub standardizer: Option<Standardizer>,
    /// 1-based voiceprint positions fed to the network.
    pub coefficients_used: Vec<usize>,
    /// Cepstral index of voiceprint position 1.
    pub first_coefficient: usize,
    pub train_config: TrainConfig,
}

impl ModelFile {
    pub fn new(
        classifier: &Classifier,
        coefficients_used: Vec<usize>,
        first_coefficient: usize,
        train_config: TrainConfig,
    ) -> Self {
        Self {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            layer_sizes: classifier.network.layer_sizes(),
            hidden_activation: "relu".into(),
            output_activation: "sigmoid".into(),
            layers: classifier.network.layers().to_vec(),
            standardizer: classifier.standardizer.clone(),
            coefficients_used,
            first_coefficient,
            train_config,
        }
    }

    pub fn classifier(&self) -> Result<Classifier> {
        let network = Network::from_layers(self.layers.clone())?;
        if network.layer_sizes() != self.layer_sizes {
            return Err(Error::Model(format!(
                "layer_sizes {:?} disagree with the stored layers {:?}",
                self.layer_sizes,
                network.layer_sizes()
            )));
        }
        if let Some(st) = &self.standardizer {
            if st.mean.len() != network.input_dim() || st.scale.len() != network.input_dim() {
                return Err(Error::Model(
                    "standardizer width differs from the input layer".into(),
                ));
            }
        }
        if self.coefficients_used.len() != network.input_dim() {
            return Err(Error::Model(format!(
                "{} coefficients listed for a {}-input network",
                self.coefficients_used.len(),
                network.input_dim()
            )));
        }
        Ok(Classifier {
            network,
            standardizer: self.standardizer.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| Error::Model(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        if m.format != MODEL_FORMAT {
            return Err(Error::Model(format!("unknown format `{}`", m.format)));
        }
        if m.version != MODEL_VERSION {
            return Err(Error::Model(format!("unsupported version {}", m.version)));
        }
        if m.hidden_activation != "relu" || m.output_activation != "sigmoid" {
            return Err(Error::Model(format!(
                "unsupported activations {}/{}",
                m.hidden_activation, m.output_activation
            )));
        }
        Ok(m)
    }
}

pub fn save_model(path: impl AsRef<Path>, model: &ModelFile) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ModelFile::from_json(&text)
}
