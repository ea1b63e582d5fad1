//! Layer-wise RBM pre-training with k-step contrastive divergence.
//!
//! The first RBM has Gaussian visible units (unit variance, on standardized
//! inputs); the ones above it are Bernoulli-Bernoulli and see the hidden
//! probabilities of the layer below. Labels are never used.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::network::{sigmoid, Layer};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbmConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub cd_steps: usize,
    pub batch_size: usize,
}

impl Default for RbmConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            learning_rate: 0.01,
            cd_steps: 1,
            batch_size: 2,
        }
    }
}

impl RbmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cd_steps == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig(
                "RBM cd_steps and batch_size must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "RBM learning rate {} must be positive",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisibleUnits {
    Gaussian,
    Bernoulli,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rbm {
    pub visible: usize,
    pub hidden: usize,
    pub kind: VisibleUnits,
    /// `hidden x visible`, row-major.
    pub weights: Vec<f64>,
    pub visible_bias: Vec<f64>,
    pub hidden_bias: Vec<f64>,
}

impl Rbm {
    /// Small Gaussian weights (std 0.01) and zero biases.
    pub fn new<R: Rng + ?Sized>(
        visible: usize,
        hidden: usize,
        kind: VisibleUnits,
        rng: &mut R,
    ) -> Self {
        let normal = Normal::new(0.0, 0.01).expect("positive std");
        Self {
            visible,
            hidden,
            kind,
            weights: (0..visible * hidden).map(|_| normal.sample(rng)).collect(),
            visible_bias: vec![0.0; visible],
            hidden_bias: vec![0.0; hidden],
        }
    }

    pub fn hidden_probs(&self, v: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.visible)
            .zip(&self.hidden_bias)
            .map(|(row, c)| sigmoid(row.iter().zip(v).map(|(w, x)| w * x).sum::<f64>() + c))
            .collect()
    }

    /// Mean of the visible units given hidden states.
    pub fn visible_mean(&self, h: &[f64]) -> Vec<f64> {
        let mut act = self.visible_bias.clone();
        for (row, hj) in self.weights.chunks_exact(self.visible).zip(h) {
            act.iter_mut().zip(row).for_each(|(a, w)| *a += w * hj);
        }
        if self.kind == VisibleUnits::Bernoulli {
            act.iter_mut().for_each(|a| *a = sigmoid(*a));
        }
        act
    }

    /// Mean squared error of the one-step mean-field reconstruction.
    pub fn reconstruction_error(&self, data: &[Vec<f64>]) -> f64 {
        let total: f64 = data
            .iter()
            .map(|v| {
                let recon = self.visible_mean(&self.hidden_probs(v));
                v.iter()
                    .zip(&recon)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .sum();
        total / (data.len() * self.visible) as f64
    }

    fn cd_batch<R: Rng + ?Sized>(&mut self, batch: &[&Vec<f64>], cfg: &RbmConfig, rng: &mut R) {
        let (nv, nh) = (self.visible, self.hidden);
        let mut dw = vec![0.0; nv * nh];
        let mut dvb = vec![0.0; nv];
        let mut dhb = vec![0.0; nh];
        for v0 in batch {
            let ph0 = self.hidden_probs(v0);
            let mut h: Vec<f64> = ph0
                .iter()
                .map(|&p| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
                .collect();
            let mut vk = Vec::new();
            let mut phk = Vec::new();
            for step in 0..cfg.cd_steps {
                vk = self.visible_mean(&h);
                phk = self.hidden_probs(&vk);
                if step + 1 < cfg.cd_steps {
                    h = phk
                        .iter()
                        .map(|&p| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
                        .collect();
                }
            }
            for j in 0..nh {
                let row = &mut dw[j * nv..(j + 1) * nv];
                for i in 0..nv {
                    row[i] += ph0[j] * v0[i] - phk[j] * vk[i];
                }
                dhb[j] += ph0[j] - phk[j];
            }
            for i in 0..nv {
                dvb[i] += v0[i] - vk[i];
            }
        }
        let step = cfg.learning_rate / batch.len() as f64;
        self.weights
            .iter_mut()
            .zip(&dw)
            .for_each(|(w, d)| *w += step * d);
        self.visible_bias
            .iter_mut()
            .zip(&dvb)
            .for_each(|(b, d)| *b += step * d);
        self.hidden_bias
            .iter_mut()
            .zip(&dhb)
            .for_each(|(b, d)| *b += step * d);
    }

    /// Runs `cfg.epochs` passes of CD-k in data order and returns the
    /// reconstruction error after each epoch.
    ///
    /// Fails if the error becomes non-finite or grows tenfold in one epoch.
    pub fn train<R: Rng + ?Sized>(
        &mut self,
        data: &[Vec<f64>],
        cfg: &RbmConfig,
        layer: usize,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        cfg.validate()?;
        if let Some(v) = data.iter().find(|v| v.len() != self.visible) {
            return Err(Error::DimensionMismatch {
                expected: self.visible,
                actual: v.len(),
            });
        }
        let mut errors = Vec::with_capacity(cfg.epochs);
        if data.is_empty() {
            return Ok(errors);
        }
        let mut previous = self.reconstruction_error(data);
        for epoch in 1..=cfg.epochs {
            let refs: Vec<&Vec<f64>> = data.iter().collect();
            for batch in refs.chunks(cfg.batch_size) {
                self.cd_batch(batch, cfg, rng);
            }
            let error = self.reconstruction_error(data);
            if !error.is_finite() || error > 10.0 * previous {
                return Err(Error::RbmDiverged {
                    layer,
                    epoch,
                    error,
                    previous,
                });
            }
            errors.push(error);
            previous = error;
        }
        Ok(errors)
    }

    /// The recognition weights as a feedforward layer.
    pub fn to_layer(&self) -> Layer {
        Layer {
            inputs: self.visible,
            outputs: self.hidden,
            weights: self.weights.clone(),
            biases: self.hidden_bias.clone(),
        }
    }
}

/// Column means and standard deviations (1 where a column is constant).
pub(crate) fn column_stats(data: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let d = data[0].len();
    let n = data.len() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|j| data.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let std = (0..d)
        .map(|j| {
            let var = data.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
            if var > 0.0 {
                var.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    (mean, std)
}

/// Greedy layer-wise pre-training of the hidden stack.
///
/// Returns one [`Layer`] per entry of `hidden_sizes`. The standardization
/// applied to the Gaussian layer is folded into the first layer's weights
/// and biases, so the result consumes raw `inputs`.
pub fn pretrain_rbm_stack<R: Rng + ?Sized>(
    inputs: &[Vec<f64>],
    hidden_sizes: &[usize],
    cfg: &RbmConfig,
    rng: &mut R,
) -> Result<Vec<Layer>> {
    cfg.validate()?;
    let first = inputs
        .first()
        .ok_or_else(|| Error::InvalidInput("no data to pre-train on".into()))?;
    if hidden_sizes.is_empty() || hidden_sizes.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "cannot pre-train hidden stack {hidden_sizes:?}"
        )));
    }
    let dim = first.len();
    if let Some(v) = inputs.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: v.len(),
        });
    }

    let (mean, std) = column_stats(inputs);
    let mut data: Vec<Vec<f64>> = inputs
        .iter()
        .map(|v| {
            v.iter()
                .zip(&mean)
                .zip(&std)
                .map(|((x, m), s)| (x - m) / s)
                .collect()
        })
        .collect();

    let mut layers = Vec::with_capacity(hidden_sizes.len());
    let mut visible = dim;
    for (index, &hidden) in hidden_sizes.iter().enumerate() {
        let kind = if index == 0 {
            VisibleUnits::Gaussian
        } else {
            VisibleUnits::Bernoulli
        };
        let mut rbm = Rbm::new(visible, hidden, kind, rng);
        rbm.train(&data, cfg, index + 1, rng)?;
        data = data.iter().map(|v| rbm.hidden_probs(v)).collect();
        layers.push(rbm.to_layer());
        visible = hidden;
    }

    // W' = W / σ, b' = b - W' μ.
    let l0 = &mut layers[0];
    for o in 0..l0.outputs {
        let row = &mut l0.weights[o * l0.inputs..(o + 1) * l0.inputs];
        let mut shift = 0.0;
        for i in 0..row.len() {
            row[i] /= std[i];
            shift += row[i] * mean[i];
        }
        l0.biases[o] -= shift;
    }
    Ok(layers)
}
