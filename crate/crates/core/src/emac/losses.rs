//! Critic, actor (with entropy regularizer), and triplet losses, each
//! returning the loss value together with analytic gradients.

use super::buffer::{TrajectoryBuffer, TripletPick};
use super::model::EmacModel;
use super::EntropyMode;
use crate::nn::{entropy, softmax, DenseNet, Gradients, NnError};

/// Mean squared error of a scalar-output net against fixed targets.
/// Gradients flow into the net only. This is the critic loss; IAC
/// reuses it for its per-agent critics.
pub fn value_loss(
    net: &DenseNet,
    inputs: &[&[f64]],
    targets: &[f64],
) -> Result<(f64, Gradients), NnError> {
    assert_eq!(inputs.len(), targets.len());
    let n = inputs.len().max(1) as f64;
    let mut grads = Gradients::zeros_like(net);
    let mut loss = 0.0;
    for (x, &target) in inputs.iter().zip(targets) {
        let (y, tape) = net.forward(x)?;
        let err = y[0] - target;
        loss += err * err / n;
        let (g, _) = net.backward(&tape, &[2.0 * err / n])?;
        grads.add_scaled(&g, 1.0);
    }
    Ok((loss, grads))
}

/// Critic loss over aligned (global state, return target) pairs.
pub fn critic_loss(
    model: &EmacModel,
    states: &[&[f64]],
    targets: &[f64],
) -> Result<(f64, Gradients), NnError> {
    value_loss(&model.critic, states, targets)
}

/// Per-sample policy-gradient + entropy loss on raw logits.
///
/// loss = -log pi(u) * A + c * H_term, where H_term is either
/// sum_a pi(a) log pi(a) (Full) or pi(u) log pi(u) (Taken). Returns the
/// sample loss and dloss/dlogits (unnormalized; the caller divides by
/// the batch size).
pub fn policy_logit_grad(
    logits: &[f64],
    action: usize,
    advantage: f64,
    entropy_coeff: f64,
    mode: EntropyMode,
) -> (f64, Vec<f64>) {
    let probs = softmax(logits);
    let log_p_u = probs[action].max(f64::MIN_POSITIVE).ln();
    let mut loss = -log_p_u * advantage;
    // d(-log pi(u) * A)/dz_k = -A * (1[k == u] - p_k)
    let mut dl_dz: Vec<f64> = probs.iter().map(|&p| advantage * p).collect();
    dl_dz[action] -= advantage;

    match mode {
        EntropyMode::Full => {
            // + c * sum_a p_a log p_a  (= -c * H)
            let h = entropy(&probs);
            loss -= entropy_coeff * h;
            for (k, &p) in probs.iter().enumerate() {
                if p > 0.0 {
                    dl_dz[k] += entropy_coeff * p * (p.ln() + h);
                }
            }
        }
        EntropyMode::Taken => {
            let p_u = probs[action];
            loss += entropy_coeff * p_u * log_p_u;
            for (k, &p) in probs.iter().enumerate() {
                let indicator = if k == action { 1.0 } else { 0.0 };
                dl_dz[k] += entropy_coeff * (log_p_u + 1.0) * p_u * (indicator - p);
            }
        }
    }
    (loss, dl_dz)
}

/// One actor-loss sample: which agent acted, on what observation, what
/// it did, and its advantage (already critic-detached).
#[derive(Debug, Clone, Copy)]
pub struct ActorBatchItem<'a> {
    pub agent: usize,
    pub obs: &'a [f64],
    pub action: usize,
    pub advantage: f64,
}

/// Actor loss over a batch: mean policy-gradient term plus the entropy
/// regularizer. Gradients flow through the shared actor and, when the
/// model is configured for it, through each agent's encoder.
pub fn actor_loss(
    model: &EmacModel,
    batch: &[ActorBatchItem<'_>],
) -> Result<(f64, Gradients, Vec<Gradients>), NnError> {
    let n = batch.len().max(1) as f64;
    let mut actor_grads = Gradients::zeros_like(&model.actor);
    let mut encoder_grads: Vec<Gradients> =
        model.encoders.iter().map(Gradients::zeros_like).collect();
    let mut loss = 0.0;
    for item in batch {
        let (embedding, enc_tape) = model.encoders[item.agent].forward(item.obs)?;
        let (logits, actor_tape) = model.actor.forward(&embedding)?;
        let (sample_loss, dl_dz) = policy_logit_grad(
            &logits,
            item.action,
            item.advantage,
            model.entropy_coeff,
            model.entropy_mode,
        );
        loss += sample_loss / n;
        let scaled: Vec<f64> = dl_dz.iter().map(|g| g / n).collect();
        let (ga, dl_dembed) = model.actor.backward(&actor_tape, &scaled)?;
        actor_grads.add_scaled(&ga, 1.0);
        if model.encoder_actor_grads {
            let (ge, _) = model.encoders[item.agent].backward(&enc_tape, &dl_dembed)?;
            encoder_grads[item.agent].add_scaled(&ge, 1.0);
        }
    }
    Ok((loss, actor_grads, encoder_grads))
}

/// Triplet loss over sampled picks: mean of hinge(z) (or softplus(z)
/// when `soft_margin`), z = ||a-p||² - ||a-n||² + margin. Gradients
/// reach every encoder involved.
pub fn triplet_loss(
    model: &EmacModel,
    buffer: &TrajectoryBuffer,
    picks: &[TripletPick],
) -> Result<(f64, Vec<Gradients>), NnError> {
    let n = picks.len().max(1) as f64;
    let mut encoder_grads: Vec<Gradients> =
        model.encoders.iter().map(Gradients::zeros_like).collect();
    let mut loss = 0.0;
    for pick in picks {
        let env = &buffer.envs[pick.env];
        let anchor_obs = &env.steps[pick.t].agents[pick.agent].as_ref().unwrap().obs;
        let positive_obs = &env.steps[pick.t].agents[pick.positive_agent]
            .as_ref()
            .unwrap()
            .obs;
        let negative_obs = &env.steps[pick.negative_t].agents[pick.agent]
            .as_ref()
            .unwrap()
            .obs;

        let (a, a_tape) = model.encoders[pick.agent].forward(&anchor_obs.values)?;
        let (p, p_tape) = model.encoders[pick.positive_agent].forward(&positive_obs.values)?;
        let (neg, n_tape) = model.encoders[pick.agent].forward(&negative_obs.values)?;

        let d_ap: f64 = a.iter().zip(&p).map(|(x, y)| (x - y) * (x - y)).sum();
        let d_an: f64 = a.iter().zip(&neg).map(|(x, y)| (x - y) * (x - y)).sum();
        let z = d_ap - d_an + model.triplet.margin;

        let (sample_loss, dz_scale) = if model.triplet.soft_margin {
            // softplus(z), stable for large |z|
            let softplus = if z > 30.0 { z } else { (1.0 + z.exp()).ln() };
            (softplus, sigmoid(z))
        } else {
            (z.max(0.0), if z > 0.0 { 1.0 } else { 0.0 })
        };
        loss += sample_loss / n;
        if dz_scale == 0.0 {
            continue;
        }
        let scale = dz_scale / n;
        // dz/da = 2(n - p), dz/dp = -2(a - p), dz/dn = 2(a - n)
        let dl_da: Vec<f64> = neg.iter().zip(&p).map(|(nv, pv)| scale * 2.0 * (nv - pv)).collect();
        let dl_dp: Vec<f64> = a.iter().zip(&p).map(|(av, pv)| scale * -2.0 * (av - pv)).collect();
        let dl_dn: Vec<f64> = a.iter().zip(&neg).map(|(av, nv)| scale * 2.0 * (av - nv)).collect();

        let (g, _) = model.encoders[pick.agent].backward(&a_tape, &dl_da)?;
        encoder_grads[pick.agent].add_scaled(&g, 1.0);
        let (g, _) = model.encoders[pick.positive_agent].backward(&p_tape, &dl_dp)?;
        encoder_grads[pick.positive_agent].add_scaled(&g, 1.0);
        let (g, _) = model.encoders[pick.agent].backward(&n_tape, &dl_dn)?;
        encoder_grads[pick.agent].add_scaled(&g, 1.0);
    }
    Ok((loss, encoder_grads))
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}
