//! Feed-forward regression network trained with Adam on squared error.
//!
//! The architecture is input -> hidden layers (activation) -> 1 linear
//! output. Parameters live in one flat vector (per-layer weights
//! row-major, then biases), which keeps the Adam state and the
//! finite-difference gradient check straightforward.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::tree::validate_matrix;
use crate::rng::DeterministicRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed in terms of the pre-activation.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - z.tanh().powi(2),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub hidden_layers: Vec<usize>,
    pub activation: Activation,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_layers: vec![64, 64],
            activation: Activation::Relu,
            learning_rate: 1e-3,
            epochs: 200,
            batch_size: 64,
        }
    }
}

/// Raw network over unscaled inputs; one scalar output.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    /// Layer widths, input first, 1 last.
    sizes: Vec<usize>,
    activation: Activation,
    /// Flat parameters: for each layer, weights (out x in, row-major)
    /// followed by biases.
    params: Vec<f64>,
}

impl Network {
    /// He-scaled normal initialization, biases zero.
    pub fn new(sizes: &[usize], activation: Activation, rng: &mut DeterministicRng) -> Network {
        assert!(sizes.len() >= 2, "need input and output layers");
        assert_eq!(*sizes.last().unwrap(), 1, "single regression output");
        let mut params = Vec::new();
        for l in 1..sizes.len() {
            let fan_in = sizes[l - 1];
            let scale = (2.0 / fan_in as f64).sqrt();
            for _ in 0..sizes[l] * fan_in {
                params.push(rng.normal() * scale);
            }
            for _ in 0..sizes[l] {
                params.push(0.0);
            }
        }
        Network {
            sizes: sizes.to_vec(),
            activation,
            params,
        }
    }

    pub fn zeroed(sizes: &[usize], activation: Activation) -> Network {
        let mut rng = DeterministicRng::seeded(0);
        let mut net = Network::new(sizes, activation, &mut rng);
        net.params.iter_mut().for_each(|p| *p = 0.0);
        net
    }

    pub fn parameter_count(&self) -> usize {
        self.params.len()
    }

    pub fn parameters(&self) -> &[f64] {
        &self.params
    }

    pub fn parameters_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn layer_offsets(&self) -> Vec<(usize, usize, usize, usize)> {
        // (weight offset, bias offset, fan_in, fan_out) per layer
        let mut offsets = Vec::with_capacity(self.sizes.len() - 1);
        let mut at = 0;
        for l in 1..self.sizes.len() {
            let fan_in = self.sizes[l - 1];
            let fan_out = self.sizes[l];
            offsets.push((at, at + fan_in * fan_out, fan_in, fan_out));
            at += fan_in * fan_out + fan_out;
        }
        offsets
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.sizes[0]);
        let offsets = self.layer_offsets();
        let n_layers = offsets.len();
        let mut activation: Vec<f64> = x.to_vec();
        for (l, &(w_off, b_off, fan_in, fan_out)) in offsets.iter().enumerate() {
            let mut next = Vec::with_capacity(fan_out);
            for o in 0..fan_out {
                let mut z = self.params[b_off + o];
                let row = &self.params[w_off + o * fan_in..w_off + (o + 1) * fan_in];
                for (w, a) in row.iter().zip(&activation) {
                    z += w * a;
                }
                next.push(if l + 1 == n_layers {
                    z // linear output layer
                } else {
                    self.activation.apply(z)
                });
            }
            activation = next;
        }
        activation[0]
    }

    /// Mean squared error over a batch.
    pub fn batch_loss(&self, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        xs.iter()
            .zip(ys)
            .map(|(x, y)| {
                let d = self.forward(x) - y;
                d * d
            })
            .sum::<f64>()
            / n
    }

    /// Loss and flat gradient of the batch MSE via backpropagation.
    pub fn batch_gradient(&self, xs: &[Vec<f64>], ys: &[f64]) -> (f64, Vec<f64>) {
        let offsets = self.layer_offsets();
        let n_layers = offsets.len();
        let batch = xs.len() as f64;
        let mut grad = vec![0.0; self.params.len()];
        let mut loss = 0.0;

        for (x, &y) in xs.iter().zip(ys) {
            // forward pass keeping pre-activations and activations
            let mut activations: Vec<Vec<f64>> = vec![x.clone()];
            let mut pre: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
            for (l, &(w_off, b_off, fan_in, fan_out)) in offsets.iter().enumerate() {
                let input = &activations[l];
                let mut z = Vec::with_capacity(fan_out);
                for o in 0..fan_out {
                    let mut s = self.params[b_off + o];
                    let row = &self.params[w_off + o * fan_in..w_off + (o + 1) * fan_in];
                    for (w, a) in row.iter().zip(input) {
                        s += w * a;
                    }
                    z.push(s);
                }
                let a: Vec<f64> = if l + 1 == n_layers {
                    z.clone()
                } else {
                    z.iter().map(|&v| self.activation.apply(v)).collect()
                };
                pre.push(z);
                activations.push(a);
            }

            let prediction = activations[n_layers][0];
            let residual = prediction - y;
            loss += residual * residual;

            // backward pass: d(loss)/d(pre-activation), starting at the
            // linear output with d/d(pred) = 2 * residual / batch
            let mut delta = vec![2.0 * residual / batch];
            for l in (0..n_layers).rev() {
                let (w_off, b_off, fan_in, fan_out) = offsets[l];
                let input = &activations[l];
                for o in 0..fan_out {
                    let d = delta[o];
                    grad[b_off + o] += d;
                    let g_row = &mut grad[w_off + o * fan_in..w_off + (o + 1) * fan_in];
                    for (g, a) in g_row.iter_mut().zip(input) {
                        *g += d * a;
                    }
                }
                if l > 0 {
                    let mut prev = vec![0.0; fan_in];
                    for o in 0..fan_out {
                        let d = delta[o];
                        let row = &self.params[w_off + o * fan_in..w_off + (o + 1) * fan_in];
                        for (p, w) in prev.iter_mut().zip(row) {
                            *p += d * w;
                        }
                    }
                    for (p, z) in prev.iter_mut().zip(&pre[l - 1]) {
                        *p *= self.activation.derivative(*z);
                    }
                    delta = prev;
                }
            }
        }
        (loss / batch, grad)
    }
}

/// Adam optimizer state over a flat parameter vector.
pub struct Adam {
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(learning_rate: f64, n_params: usize) -> Adam {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / b1t;
            let v_hat = self.v[i] / b2t;
            params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

/// A trained model: the raw network plus the feature/target standardization
/// it was trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    network: Network,
    x_mean: Vec<f64>,
    x_std: Vec<f64>,
    y_mean: f64,
    y_std: f64,
}

impl MlpModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let scaled: Vec<f64> = row
            .iter()
            .zip(self.x_mean.iter().zip(&self.x_std))
            .map(|(x, (m, s))| (x - m) / s)
            .collect();
        self.network.forward(&scaled) * self.y_std + self.y_mean
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }
}

/// Trains the network on standardized features and a standardized target;
/// predictions are mapped back to the original target scale. Deterministic
/// for a fixed seed: initialization and the per-epoch batch order both come
/// from the same seeded generator.
pub fn fit_mlp(x: &[Vec<f64>], y: &[f64], config: &MlpConfig, seed: u64) -> Result<MlpModel> {
    let m = validate_matrix(x, y)?;
    if config.batch_size == 0 || config.epochs == 0 {
        return Err(Error::invalid("batch_size and epochs must be positive"));
    }
    if !(config.learning_rate > 0.0) {
        return Err(Error::invalid(format!(
            "learning rate {} must be positive",
            config.learning_rate
        )));
    }
    let n = x.len();

    let mut x_mean = vec![0.0; m];
    let mut x_std = vec![1.0; m];
    for j in 0..m {
        let mu = x.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = x.iter().map(|r| (r[j] - mu) * (r[j] - mu)).sum::<f64>() / n as f64;
        x_mean[j] = mu;
        x_std[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let y_var = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum::<f64>() / n as f64;
    let y_std = if y_var > 0.0 { y_var.sqrt() } else { 1.0 };

    let mut sizes = Vec::with_capacity(config.hidden_layers.len() + 2);
    sizes.push(m);
    sizes.extend_from_slice(&config.hidden_layers);
    sizes.push(1);

    if y_var == 0.0 {
        // constant target: the standardized problem is identically zero,
        // so a zeroed network is already its exact minimizer
        return Ok(MlpModel {
            network: Network::zeroed(&sizes, config.activation),
            x_mean,
            x_std,
            y_mean,
            y_std,
        });
    }

    let xs: Vec<Vec<f64>> = x
        .iter()
        .map(|r| {
            (0..m)
                .map(|j| (r[j] - x_mean[j]) / x_std[j])
                .collect()
        })
        .collect();
    let ys: Vec<f64> = y.iter().map(|v| (v - y_mean) / y_std).collect();

    let mut rng = DeterministicRng::seeded(seed);
    let mut network = Network::new(&sizes, config.activation, &mut rng);
    let mut adam = Adam::new(config.learning_rate, network.parameter_count());
    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 0..config.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let bx: Vec<Vec<f64>> = chunk.iter().map(|&i| xs[i].clone()).collect();
            let by: Vec<f64> = chunk.iter().map(|&i| ys[i]).collect();
            let (loss, grad) = network.batch_gradient(&bx, &by);
            epoch_loss += loss * chunk.len() as f64;
            adam.step(network.parameters_mut(), &grad);
        }
        epoch_loss /= n as f64;
        if !epoch_loss.is_finite() {
            return Err(Error::Divergence {
                epoch,
                loss: epoch_loss,
            });
        }
    }

    Ok(MlpModel {
        network,
        x_mean,
        x_std,
        y_mean,
        y_std,
    })
}
