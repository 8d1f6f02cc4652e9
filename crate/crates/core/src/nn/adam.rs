//! Adam with bias correction. Moments are kept in f64; parameters are
//! written back as f32.

use serde::{Deserialize, Serialize};

use super::dense::{DenseNet, Gradients};
use super::NnError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Global-norm clip applied by the trainers before each step.
    pub grad_clip: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            grad_clip: 5.0,
        }
    }
}

/// First/second moment estimates shaped like the network parameters.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<(Vec<f64>, Vec<f64>)>,
    v: Vec<(Vec<f64>, Vec<f64>)>,
    pub step: u64,
}

impl AdamState {
    pub fn new(net: &DenseNet) -> Self {
        let zeros = || {
            net.layers
                .iter()
                .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.bias.len()]))
                .collect::<Vec<_>>()
        };
        AdamState {
            m: zeros(),
            v: zeros(),
            step: 0,
        }
    }
}

/// One Adam update. Rejects non-finite gradients (the usual divergence
/// signal) without touching the parameters.
pub fn adam_step(
    net: &mut DenseNet,
    grads: &Gradients,
    state: &mut AdamState,
    hp: &OptimizerConfig,
) -> Result<(), NnError> {
    if !grads.matches(net) || state.m.len() != net.layers.len() {
        return Err(NnError::ShapeMismatch);
    }
    if !grads.is_finite() {
        return Err(NnError::NonFiniteGradient);
    }
    state.step += 1;
    let t = state.step as f64;
    let bc1 = 1.0 - hp.beta1.powi(state.step as i32);
    let bc2 = 1.0 - hp.beta2.powi(state.step as i32);
    debug_assert!(t >= 1.0);

    for (layer_idx, layer) in net.layers.iter_mut().enumerate() {
        let (gw, gb) = &grads.layers[layer_idx];
        let (mw, mb) = &mut state.m[layer_idx];
        let (vw, vb) = &mut state.v[layer_idx];
        update_slice(&mut layer.weights, gw, mw, vw, hp, bc1, bc2);
        update_slice(&mut layer.bias, gb, mb, vb, hp, bc1, bc2);
    }
    debug_assert!(net.params_finite());
    Ok(())
}

fn update_slice(
    params: &mut [f32],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    hp: &OptimizerConfig,
    bc1: f64,
    bc2: f64,
) {
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = hp.beta1 * m[i] + (1.0 - hp.beta1) * g;
        v[i] = hp.beta2 * v[i] + (1.0 - hp.beta2) * g * g;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        let delta = hp.learning_rate * m_hat / (v_hat.sqrt() + hp.epsilon);
        params[i] = (params[i] as f64 - delta) as f32;
    }
}
