use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn relu(z: f64) -> f64 {
    z.max(0.0)
}

/// Derivative of ReLU, taken as 0 at `z = 0`.
pub fn relu_derivative(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else {
        0.0
    }
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Fully connected layer `z = W v + b` with `W` stored row-major as
/// `outputs x inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    /// Gaussian weights with variance `2 / inputs`, zero biases.
    pub fn he<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, (2.0 / inputs as f64).sqrt()).expect("positive std");
        Self {
            inputs,
            outputs,
            weights: (0..inputs * outputs).map(|_| normal.sample(rng)).collect(),
            biases: vec![0.0; outputs],
        }
    }

    pub fn weight(&self, out: usize, input: usize) -> f64 {
        self.weights[out * self.inputs + input]
    }

    fn affine(&self, v: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.inputs)
            .zip(&self.biases)
            .map(|(row, b)| row.iter().zip(v).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect()
    }

    fn validate(&self, index: usize) -> Result<()> {
        if self.inputs == 0 || self.outputs == 0 {
            return Err(Error::InvalidConfig(format!(
                "layer {index} has a zero dimension"
            )));
        }
        if self.weights.len() != self.inputs * self.outputs || self.biases.len() != self.outputs {
            return Err(Error::InvalidConfig(format!(
                "layer {index}: parameter counts do not match {}x{}",
                self.outputs, self.inputs
            )));
        }
        if self
            .weights
            .iter()
            .chain(&self.biases)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "layer {index} has non-finite parameters"
            )));
        }
        Ok(())
    }
}

/// Feedforward network with ReLU hidden layers and one sigmoid output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    layers: Vec<Layer>,
}

/// Everything the forward pass computed, kept for backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations {
    /// `z^1 ..= z^L`.
    pub pre: Vec<Vec<f64>>,
    /// `v^0 ..= v^L`, with `v^0` the input.
    pub post: Vec<Vec<f64>>,
}

impl Activations {
    pub fn output(&self) -> f64 {
        self.post.last().expect("input layer always present")[0]
    }
}

/// `∂C/∂W^l` and `∂C/∂b^l`, laid out like the network's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| Layer::zeros(l.inputs, l.outputs))
                .collect(),
        }
    }

    pub fn accumulate(&mut self, other: &Gradients) {
        for (acc, g) in self.layers.iter_mut().zip(&other.layers) {
            acc.weights
                .iter_mut()
                .zip(&g.weights)
                .for_each(|(a, b)| *a += b);
            acc.biases
                .iter_mut()
                .zip(&g.biases)
                .for_each(|(a, b)| *a += b);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            l.weights
                .iter_mut()
                .chain(&mut l.biases)
                .for_each(|v| *v *= factor);
        }
    }
}

pub(crate) fn check_layer_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "a network needs an input and an output layer, got sizes {sizes:?}"
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "zero-width layer in {sizes:?}"
        )));
    }
    if *sizes.last().unwrap() != 1 {
        return Err(Error::InvalidConfig(format!(
            "the output layer must have exactly one unit, got sizes {sizes:?}"
        )));
    }
    Ok(())
}

impl Network {
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        let net = Self { layers };
        net.validate()?;
        Ok(net)
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        check_layer_sizes(sizes)?;
        Ok(Self {
            layers: sizes.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect(),
        })
    }

    pub fn he_init<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        check_layer_sizes(sizes)?;
        Ok(Self {
            layers: sizes
                .windows(2)
                .map(|w| Layer::he(w[0], w[1], rng))
                .collect(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidConfig("network has no layers".into()));
        }
        for (i, pair) in self.layers.windows(2).enumerate() {
            if pair[0].outputs != pair[1].inputs {
                return Err(Error::InvalidConfig(format!(
                    "layer {} emits {} values but layer {} expects {}",
                    i + 1,
                    pair[0].outputs,
                    i + 2,
                    pair[1].inputs
                )));
            }
        }
        for (i, l) in self.layers.iter().enumerate() {
            l.validate(i + 1)?;
        }
        check_layer_sizes(&self.layer_sizes())
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    /// `[N_0, N_1, ..., N_L]`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].inputs)
            .chain(self.layers.iter().map(|l| l.outputs))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn num_parameters(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Activations> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite network input".into()));
        }
        let last = self.layers.len() - 1;
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len() + 1);
        post.push(x.to_vec());
        for (l, layer) in self.layers.iter().enumerate() {
            let z = layer.affine(post.last().unwrap());
            let v = if l == last {
                z.iter().map(|&z| sigmoid(z)).collect()
            } else {
                z.iter().map(|&z| relu(z)).collect()
            };
            pre.push(z);
            post.push(v);
        }
        Ok(Activations { pre, post })
    }

    /// Sigmoid output for one input.
    pub fn output(&self, x: &[f64]) -> Result<f64> {
        Ok(self.forward(x)?.output())
    }

    /// Gradients of the per-sample loss `(A - Y)^2 / 2` with respect to every
    /// weight and bias.
    pub fn backprop(&self, activations: &Activations, target: f64) -> Gradients {
        let depth = self.layers.len();
        let mut grads = Gradients::zeros_like(self);
        let out = activations.output();
        // Output error: (A - Y) σ'(z^L) with σ' = A (1 - A).
        let mut error = vec![(out - target) * out * (1.0 - out)];
        for l in (0..depth).rev() {
            let input = &activations.post[l];
            let g = &mut grads.layers[l];
            for (o, e) in error.iter().enumerate() {
                g.biases[o] = *e;
                let row = &mut g.weights[o * g.inputs..(o + 1) * g.inputs];
                row.iter_mut().zip(input).for_each(|(w, v)| *w = e * v);
            }
            if l == 0 {
                break;
            }
            let layer = &self.layers[l];
            let z_below = &activations.pre[l - 1];
            error = (0..layer.inputs)
                .map(|i| {
                    let back: f64 = error
                        .iter()
                        .enumerate()
                        .map(|(o, e)| layer.weight(o, i) * e)
                        .sum();
                    relu_derivative(z_below[i]) * back
                })
                .collect();
        }
        grads
    }

    /// `θ ← θ - η g`.
    pub fn apply_gradients(&mut self, grads: &Gradients, learning_rate: f64) {
        for (layer, g) in self.layers.iter_mut().zip(&grads.layers) {
            layer
                .weights
                .iter_mut()
                .zip(&g.weights)
                .for_each(|(w, d)| *w -= learning_rate * d);
            layer
                .biases
                .iter_mut()
                .zip(&g.biases)
                .for_each(|(b, d)| *b -= learning_rate * d);
        }
    }
}
