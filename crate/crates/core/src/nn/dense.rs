//! Fully connected networks with hand-derived backward passes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::NnError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative in terms of the pre-activation z.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Identity => 1.0,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Tanh => 1,
            Activation::Identity => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Activation> {
        match code {
            0 => Some(Activation::Relu),
            1 => Some(Activation::Tanh),
            2 => Some(Activation::Identity),
            _ => None,
        }
    }
}

/// One affine layer: out×in weights (row-major), out biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Vec<f32>,
    pub bias: Vec<f32>,
    pub input_dim: usize,
    pub output_dim: usize,
    pub activation: Activation,
}

impl Layer {
    pub fn zeros(input_dim: usize, output_dim: usize, activation: Activation) -> Self {
        Layer {
            weights: vec![0.0; input_dim * output_dim],
            bias: vec![0.0; output_dim],
            input_dim,
            output_dim,
            activation,
        }
    }
}

/// Activations cached by forward for the backward pass.
#[derive(Debug, Clone)]
pub struct Tape {
    /// Input to each layer (first entry is the network input).
    layer_inputs: Vec<Vec<f64>>,
    /// Pre-activation z of each layer.
    pre_activations: Vec<Vec<f64>>,
}

/// Parameter-shaped gradient arrays, f64.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Gradients {
            layers: net
                .layers
                .iter()
                .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.bias.len()]))
                .collect(),
        }
    }

    pub fn matches(&self, net: &DenseNet) -> bool {
        self.layers.len() == net.layers.len()
            && self.layers.iter().zip(&net.layers).all(|((w, b), l)| {
                w.len() == l.weights.len() && b.len() == l.bias.len()
            })
    }

    /// self += scale * other
    pub fn add_scaled(&mut self, other: &Gradients, scale: f64) {
        for ((w, b), (ow, ob)) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in w.iter_mut().zip(ow) {
                *x += scale * y;
            }
            for (x, y) in b.iter_mut().zip(ob) {
                *x += scale * y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for (w, b) in &mut self.layers {
            w.iter_mut().for_each(|x| *x *= s);
            b.iter_mut().for_each(|x| *x *= s);
        }
    }

    pub fn global_norm(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|(w, b)| w.iter().chain(b.iter()))
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Scales the whole gradient down so its global L2 norm is at most `max`.
    pub fn clip_global_norm(&mut self, max: f64) {
        let norm = self.global_norm();
        if norm > max && norm > 0.0 {
            self.scale(max / norm);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .flat_map(|(w, b)| w.iter().chain(b.iter()))
            .all(|x| x.is_finite())
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|(w, b)| w.iter().chain(b.iter()).copied())
            .collect()
    }
}

/// An MLP. Adjacent layer dimensions chain; parameters stay finite
/// after every update.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet {
    pub layers: Vec<Layer>,
}

impl DenseNet {
    /// He-style uniform init, bound sqrt(6 / fan_in), zero biases.
    /// Hidden layers use `hidden`, the last layer `output`.
    pub fn init<R: Rng>(
        dims: &[usize],
        hidden: Activation,
        output: Activation,
        rng: &mut R,
    ) -> Self {
        assert!(dims.len() >= 2, "need at least input and output dims");
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(i, pair)| {
                let (fan_in, fan_out) = (pair[0], pair[1]);
                let bound = (6.0 / fan_in as f64).sqrt();
                let activation = if i + 2 == dims.len() { output } else { hidden };
                Layer {
                    weights: (0..fan_in * fan_out)
                        .map(|_| (rng.gen_range(-bound..bound)) as f32)
                        .collect(),
                    bias: vec![0.0; fan_out],
                    input_dim: fan_in,
                    output_dim: fan_out,
                    activation,
                }
            })
            .collect();
        DenseNet { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().output_dim
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Forward pass with the tape needed for backward.
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, Tape), NnError> {
        if x.len() != self.input_dim() {
            return Err(NnError::InputLength {
                got: x.len(),
                want: self.input_dim(),
            });
        }
        let mut layer_inputs = Vec::with_capacity(self.layers.len());
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        let mut activation = x.to_vec();
        for layer in &self.layers {
            let z = affine(layer, &activation);
            let a = z.iter().map(|&v| layer.activation.apply(v)).collect();
            layer_inputs.push(activation);
            pre_activations.push(z);
            activation = a;
        }
        Ok((
            activation,
            Tape {
                layer_inputs,
                pre_activations,
            },
        ))
    }

    /// Tape-free forward for rollouts.
    pub fn infer(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        if x.len() != self.input_dim() {
            return Err(NnError::InputLength {
                got: x.len(),
                want: self.input_dim(),
            });
        }
        let mut activation = x.to_vec();
        for layer in &self.layers {
            let z = affine(layer, &activation);
            activation = z.iter().map(|&v| layer.activation.apply(v)).collect();
        }
        Ok(activation)
    }

    /// Backpropagates dL/dy through the tape; returns parameter
    /// gradients and dL/dx (for chaining into an upstream network).
    pub fn backward(&self, tape: &Tape, dl_dy: &[f64]) -> Result<(Gradients, Vec<f64>), NnError> {
        if tape.layer_inputs.len() != self.layers.len() || dl_dy.len() != self.output_dim() {
            return Err(NnError::ShapeMismatch);
        }
        let mut grads = Gradients::zeros_like(self);
        let mut upstream = dl_dy.to_vec();
        for (idx, layer) in self.layers.iter().enumerate().rev() {
            let z = &tape.pre_activations[idx];
            let x = &tape.layer_inputs[idx];
            if z.len() != layer.output_dim || x.len() != layer.input_dim {
                return Err(NnError::ShapeMismatch);
            }
            // delta = dL/dz = dL/da * act'(z)
            let delta: Vec<f64> = upstream
                .iter()
                .zip(z)
                .map(|(&u, &zv)| u * layer.activation.derivative(zv))
                .collect();
            let (gw, gb) = &mut grads.layers[idx];
            for (o, &d) in delta.iter().enumerate() {
                gb[o] += d;
                let row = &mut gw[o * layer.input_dim..(o + 1) * layer.input_dim];
                for (w, &xv) in row.iter_mut().zip(x) {
                    *w += d * xv;
                }
            }
            // dL/dx = W^T delta
            let mut dl_dx = vec![0.0; layer.input_dim];
            for (o, &d) in delta.iter().enumerate() {
                let row = &layer.weights[o * layer.input_dim..(o + 1) * layer.input_dim];
                for (acc, &w) in dl_dx.iter_mut().zip(row) {
                    *acc += d * w as f64;
                }
            }
            upstream = dl_dx;
        }
        Ok((grads, upstream))
    }

    pub fn params_finite(&self) -> bool {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()))
            .all(|v| v.is_finite())
    }

    pub fn flatten_params(&self) -> Vec<f32> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
            .collect()
    }

    pub fn set_params(&mut self, flat: &[f32]) -> Result<(), NnError> {
        if flat.len() != self.param_count() {
            return Err(NnError::ShapeMismatch);
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            layer.weights.copy_from_slice(&flat[offset..offset + layer.weights.len()]);
            offset += layer.weights.len();
            layer.bias.copy_from_slice(&flat[offset..offset + layer.bias.len()]);
            offset += layer.bias.len();
        }
        Ok(())
    }
}

fn affine(layer: &Layer, x: &[f64]) -> Vec<f64> {
    let mut z = Vec::with_capacity(layer.output_dim);
    for o in 0..layer.output_dim {
        let row = &layer.weights[o * layer.input_dim..(o + 1) * layer.input_dim];
        let mut acc = layer.bias[o] as f64;
        for (&w, &xv) in row.iter().zip(x) {
            acc += w as f64 * xv;
        }
        z.push(acc);
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_net_maps_to_zero() {
        let net = DenseNet {
            layers: vec![Layer::zeros(3, 2, Activation::Identity)],
        };
        let (y, _) = net.forward(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(y, vec![0.0, 0.0]);
    }

    #[test]
    fn identity_weights_with_relu_clamp_negatives() {
        let mut layer = Layer::zeros(2, 2, Activation::Relu);
        layer.weights = vec![1.0, 0.0, 0.0, 1.0];
        let net = DenseNet { layers: vec![layer] };
        let (y, _) = net.forward(&[-1.0, 2.0]).unwrap();
        assert_eq!(y, vec![0.0, 2.0]);
    }

    #[test]
    fn two_layer_forward_matches_hand_arithmetic() {
        // independent oracle: naive matrix product written out long-hand
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let net = DenseNet::init(&[3, 4, 2], Activation::Tanh, Activation::Identity, &mut rng);
        let x = [0.3, -0.7, 1.1];
        let (y, _) = net.forward(&x).unwrap();

        let l0 = &net.layers[0];
        let mut h = [0.0f64; 4];
        for o in 0..4 {
            let mut acc = l0.bias[o] as f64;
            for i in 0..3 {
                acc += l0.weights[o * 3 + i] as f64 * x[i];
            }
            h[o] = acc.tanh();
        }
        let l1 = &net.layers[1];
        for o in 0..2 {
            let mut acc = l1.bias[o] as f64;
            for i in 0..4 {
                acc += l1.weights[o * 4 + i] as f64 * h[i];
            }
            assert!((y[o] - acc).abs() < 1e-6, "{} vs {acc}", y[o]);
        }
    }

    #[test]
    fn infer_agrees_with_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = DenseNet::init(&[5, 8, 3], Activation::Relu, Activation::Identity, &mut rng);
        let x: Vec<f64> = (0..5).map(|i| (i as f64 - 2.0) * 0.3).collect();
        assert_eq!(net.infer(&x).unwrap(), net.forward(&x).unwrap().0);
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let net = DenseNet::init(&[4, 6, 2], Activation::Relu, Activation::Identity, &mut rng);
        let (_, tape) = net.forward(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let (grads, dl_dx) = net.backward(&tape, &[0.0, 0.0]).unwrap();
        assert!(grads.flatten().iter().all(|&g| g == 0.0));
        assert!(dl_dx.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn dimension_mismatch_is_a_contract_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = DenseNet::init(&[4, 2], Activation::Relu, Activation::Identity, &mut rng);
        assert!(matches!(
            net.forward(&[1.0, 2.0]),
            Err(NnError::InputLength { got: 2, want: 4 })
        ));
        let (_, tape) = net.forward(&[1.0; 4]).unwrap();
        assert!(matches!(
            net.backward(&tape, &[1.0, 2.0, 3.0]),
            Err(NnError::ShapeMismatch)
        ));
    }

    #[test]
    fn clip_rescales_to_the_requested_norm() {
        let net = DenseNet {
            layers: vec![Layer::zeros(2, 2, Activation::Identity)],
        };
        let mut grads = Gradients::zeros_like(&net);
        grads.layers[0].0 = vec![3.0, 0.0, 0.0, 4.0];
        assert!((grads.global_norm() - 5.0).abs() < 1e-12);
        grads.clip_global_norm(1.0);
        assert!((grads.global_norm() - 1.0).abs() < 1e-12);
        // already-small gradients are untouched
        let before = grads.flatten();
        grads.clip_global_norm(10.0);
        assert_eq!(grads.flatten(), before);
    }

    #[test]
    fn param_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut net = DenseNet::init(&[3, 5, 2], Activation::Tanh, Activation::Identity, &mut rng);
        let flat = net.flatten_params();
        let mut other = net.clone();
        other.set_params(&vec![0.0; flat.len()]).unwrap();
        assert_ne!(net, other);
        other.set_params(&flat).unwrap();
        assert_eq!(net, other);
        assert!(net.set_params(&[0.0]).is_err());
        net.set_params(&flat).unwrap();
    }
}
