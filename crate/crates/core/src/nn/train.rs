//! Mini-batch gradient descent on the mean squared error.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{Gradients, Network};
use super::rbm::RbmConfig;
use crate::error::{Error, Result};

/// One training example: feature vector and target in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub target: f64,
}

impl Sample {
    pub fn new(features: Vec<f64>, target: f64) -> Self {
        Self { features, target }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pretrain {
    #[default]
    None,
    Rbm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Widths of the ReLU hidden layers; the input width comes from the data
    /// and the output is a single sigmoid unit.
    pub hidden_layers: Vec<usize>,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
    /// Z-score the inputs with training-set statistics before the network.
    pub standardize: bool,
    pub pretrain: Pretrain,
    pub rbm: RbmConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_layers: vec![32, 16],
            batch_size: 2,
            learning_rate: 0.1,
            epochs: 200,
            seed: 0,
            shuffle: true,
            standardize: true,
            pretrain: Pretrain::None,
            rbm: RbmConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn layer_sizes(&self, input_dim: usize) -> Vec<usize> {
        std::iter::once(input_dim)
            .chain(self.hidden_layers.iter().copied())
            .chain(std::iter::once(1))
            .collect()
    }

    pub fn validate(&self, dataset_size: usize) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be positive".into()));
        }
        if self.batch_size > dataset_size {
            return Err(Error::InvalidConfig(format!(
                "batch size {} exceeds the {dataset_size} training samples",
                self.batch_size
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate {} outside (0, 1]",
                self.learning_rate
            )));
        }
        if self.hidden_layers.contains(&0) {
            return Err(Error::InvalidConfig("zero-width hidden layer".into()));
        }
        self.rbm.validate()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    /// Mean loss over the whole training set after each epoch.
    pub epoch_losses: Vec<f64>,
    pub updates_per_epoch: Vec<usize>,
}

impl TrainTrace {
    pub fn final_loss(&self) -> Option<f64> {
        self.epoch_losses.last().copied()
    }

    pub fn total_updates(&self) -> usize {
        self.updates_per_epoch.iter().sum()
    }
}

/// `(1/2m) Σ_i (Y_i - A_i)^2`.
pub fn mse_loss(outputs: &[f64], targets: &[f64]) -> Result<f64> {
    if outputs.is_empty() {
        return Err(Error::InvalidInput("loss of an empty batch".into()));
    }
    if outputs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: outputs.len(),
            actual: targets.len(),
        });
    }
    let sum: f64 = outputs
        .iter()
        .zip(targets)
        .map(|(a, y)| (y - a) * (y - a))
        .sum();
    Ok(sum / (2.0 * outputs.len() as f64))
}

/// Mean loss of `net` over `data`.
pub fn dataset_loss(net: &Network, data: &[Sample]) -> Result<f64> {
    let outputs = data
        .iter()
        .map(|s| net.output(&s.features))
        .collect::<Result<Vec<_>>>()?;
    let targets: Vec<f64> = data.iter().map(|s| s.target).collect();
    mse_loss(&outputs, &targets)
}

/// Averaged gradient of the batch loss.
pub fn batch_gradient(net: &Network, batch: &[&Sample]) -> Result<(Gradients, f64)> {
    if batch.is_empty() {
        return Err(Error::InvalidInput("empty batch".into()));
    }
    let mut total = Gradients::zeros_like(net);
    let mut loss = 0.0;
    for sample in batch {
        let acts = net.forward(&sample.features)?;
        let a = acts.output();
        loss += (sample.target - a) * (sample.target - a) / 2.0;
        total.accumulate(&net.backprop(&acts, sample.target));
    }
    let m = batch.len() as f64;
    total.scale(1.0 / m);
    Ok((total, loss / m))
}

/// One update `θ ← θ - (η/m) Σ_i ∇C_{X_i}`. Returns the batch loss measured
/// before the update.
pub fn mbgd_step(net: &mut Network, batch: &[&Sample], learning_rate: f64) -> Result<f64> {
    if !(learning_rate >= 0.0) || !learning_rate.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "learning rate {learning_rate} must be finite and non-negative"
        )));
    }
    let (grads, loss) = batch_gradient(net, batch)?;
    net.apply_gradients(&grads, learning_rate);
    Ok(loss)
}

/// Trains `net` in place for `cfg.epochs` passes over `data`.
///
/// Each epoch visits the (optionally shuffled) samples in consecutive
/// batches of `cfg.batch_size`; the last batch may be shorter. Shuffling is
/// driven by `cfg.seed`, so equal inputs give bit-identical networks.
pub fn train(net: &mut Network, data: &[Sample], cfg: &TrainConfig) -> Result<TrainTrace> {
    let mut trace = TrainTrace::default();
    if cfg.epochs == 0 {
        return Ok(trace);
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("empty training set".into()));
    }
    cfg.validate(data.len())?;
    if let Some(s) = data.iter().find(|s| s.features.len() != net.input_dim()) {
        return Err(Error::DimensionMismatch {
            expected: net.input_dim(),
            actual: s.features.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 1..=cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let mut updates = 0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| &data[i]).collect();
            mbgd_step(net, &batch, cfg.learning_rate)?;
            updates += 1;
        }
        let loss = dataset_loss(net, data)?;
        if !loss.is_finite() || net.validate().is_err() {
            return Err(Error::Diverged {
                epoch,
                learning_rate: cfg.learning_rate,
                loss,
            });
        }
        trace.epoch_losses.push(loss);
        trace.updates_per_epoch.push(updates);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        assert_eq!(mse_loss(&[0.3, 0.9], &[0.3, 0.9]).unwrap(), 0.0);
        assert_eq!(mse_loss(&[0.0], &[1.0]).unwrap(), 0.5);
        assert_eq!(mse_loss(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.125);
        assert!(mse_loss(&[], &[]).is_err());
        assert!(mse_loss(&[0.1], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn zero_learning_rate_leaves_network_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut net = Network::he_init(&[2, 3, 1], &mut rng).unwrap();
        let before = net.clone();
        let s = Sample::new(vec![0.4, -1.0], 1.0);
        mbgd_step(&mut net, &[&s], 0.0).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn zero_epochs_is_a_no_op() {
        let mut net = Network::zeros(&[2, 2, 1]).unwrap();
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let trace = train(&mut net, &[], &cfg).unwrap();
        assert!(trace.epoch_losses.is_empty());
        assert_eq!(net, Network::zeros(&[2, 2, 1]).unwrap());
    }

    #[test]
    fn config_validation() {
        let cfg = TrainConfig::default();
        assert!(cfg.validate(1).is_err());
        assert!(TrainConfig {
            learning_rate: 0.0,
            ..cfg.clone()
        }
        .validate(10)
        .is_err());
        assert!(TrainConfig {
            learning_rate: 1.5,
            ..cfg.clone()
        }
        .validate(10)
        .is_err());
        assert!(TrainConfig {
            batch_size: 0,
            ..cfg.clone()
        }
        .validate(10)
        .is_err());
        assert!(cfg.validate(10).is_ok());
        assert_eq!(cfg.layer_sizes(19), vec![19, 32, 16, 1]);
    }

    #[test]
    fn divergence_names_epoch_and_rate() {
        let mut net = Network::zeros(&[2, 1]).unwrap();
        net.layers_mut()[0].weights = vec![2.0, 2.0];
        let data = vec![
            Sample::new(vec![f64::MAX, -f64::MAX], 1.0),
            Sample::new(vec![1.0, 1.0], 0.0),
        ];
        let cfg = TrainConfig {
            hidden_layers: vec![],
            learning_rate: 1.0,
            epochs: 5,
            shuffle: false,
            ..TrainConfig::default()
        };
        match train(&mut net, &data, &cfg) {
            Err(Error::Diverged {
                epoch,
                learning_rate,
                ..
            }) => {
                assert_eq!(epoch, 1);
                assert_eq!(learning_rate, 1.0);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
