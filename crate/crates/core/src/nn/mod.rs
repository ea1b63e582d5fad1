//! Feedforward classifier: ReLU hidden layers, sigmoid output, squared
//! error, backpropagation and mini-batch gradient descent, with optional
//! RBM pre-training of the hidden stack.

mod network;
mod rbm;
mod train;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use network::{relu, relu_derivative, sigmoid, Activations, Gradients, Layer, Network};
pub use rbm::{pretrain_rbm_stack, Rbm, RbmConfig, VisibleUnits};
pub use train::{
    batch_gradient, dataset_loss, mbgd_step, mse_loss, train, Pretrain, Sample, TrainConfig,
    TrainTrace,
};

use crate::error::{Error, Result};
use crate::weighting::Label;

/// Decision threshold on the sigmoid score; ties go to healthy.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

impl Prediction {
    pub fn from_score(score: f64) -> Self {
        let label = if score >= DECISION_THRESHOLD {
            Label::Healthy
        } else {
            Label::Pd
        };
        Self { label, score }
    }
}

pub fn predict(net: &Network, features: &[f64]) -> Result<Prediction> {
    Ok(Prediction::from_score(net.output(features)?))
}

/// Per-feature z-scoring fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput(
                "cannot standardize an empty set".into(),
            ));
        }
        let (mean, scale) = rbm::column_stats(rows);
        Ok(Self { mean, scale })
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                actual: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }
}

/// Initial network for `cfg`: RBM pre-training of the hidden stack when
/// requested, He initialization otherwise.
pub fn init_network(input_dim: usize, data: &[Sample], cfg: &TrainConfig) -> Result<Network> {
    let sizes = cfg.layer_sizes(input_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cfg.pretrain {
        Pretrain::None => Network::he_init(&sizes, &mut rng),
        Pretrain::Rbm if cfg.hidden_layers.is_empty() => Network::he_init(&sizes, &mut rng),
        Pretrain::Rbm => {
            let inputs: Vec<Vec<f64>> = data.iter().map(|s| s.features.clone()).collect();
            let mut layers = pretrain_rbm_stack(&inputs, &cfg.hidden_layers, &cfg.rbm, &mut rng)?;
            let top = *cfg.hidden_layers.last().unwrap();
            layers.push(Layer::he(top, 1, &mut rng));
            Network::from_layers(layers)
        }
    }
}

/// A trained network together with its input standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub network: Network,
    pub standardizer: Option<Standardizer>,
}

impl Classifier {
    pub fn fit(data: &[Sample], cfg: &TrainConfig) -> Result<(Self, TrainTrace)> {
        let first = data
            .first()
            .ok_or_else(|| Error::InvalidInput("empty training set".into()))?;
        let dim = first.features.len();
        cfg.validate(data.len())?;
        let standardizer = if cfg.standardize {
            let rows: Vec<Vec<f64>> = data.iter().map(|s| s.features.clone()).collect();
            Some(Standardizer::fit(&rows)?)
        } else {
            None
        };
        let prepared: Vec<Sample> = match &standardizer {
            Some(st) => data
                .iter()
                .map(|s| Ok(Sample::new(st.transform(&s.features)?, s.target)))
                .collect::<Result<_>>()?,
            None => data.to_vec(),
        };
        let mut network = init_network(dim, &prepared, cfg)?;
        let trace = train(&mut network, &prepared, cfg)?;
        Ok((
            Self {
                network,
                standardizer,
            },
            trace,
        ))
    }

    pub fn input_dim(&self) -> usize {
        self.network.input_dim()
    }

    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        match &self.standardizer {
            Some(st) => predict(&self.network, &st.transform(features)?),
            None => predict(&self.network, features),
        }
    }
}
