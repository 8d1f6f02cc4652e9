//! Independent Q-learning: one online/target network pair and one
//! replay buffer per agent, epsilon-greedy behaviour, TD targets from
//! the target network.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::emac::{CurvePoint, TrainError, TrainOutput, TrainSink, TrainStats};
use crate::io::RunConfig;
use crate::nn::{adam_step, AdamState, Activation, DenseNet, Gradients, NnError};
use crate::obs::{build_observation, observation_len, BeliefState};
use crate::policy::TrainedModel;
use crate::seed::{self, STREAM_EVAL, STREAM_MODEL, STREAM_ROLLOUT, STREAM_TRAIN};
use crate::sim::{generate_world, Action};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IqlConfig {
    pub replay_capacity: usize,
    pub batch_size: usize,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of training over which epsilon anneals linearly.
    pub anneal_fraction: f64,
    /// Target network sync period, in updates.
    pub target_sync: u64,
    /// One minibatch update per this many environment steps.
    pub update_every: usize,
    /// Disable to update online from each fresh transition instead.
    pub use_replay: bool,
}

impl Default for IqlConfig {
    fn default() -> Self {
        IqlConfig {
            replay_capacity: 50_000,
            batch_size: 64,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            anneal_fraction: 0.5,
            target_sync: 500,
            update_every: 4,
            use_replay: true,
        }
    }
}

impl IqlConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.batch_size == 0 || self.replay_capacity < self.batch_size {
            return Err("iql.replay_capacity must be >= iql.batch_size >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.epsilon_start) || !(0.0..=1.0).contains(&self.epsilon_end) {
            return Err("iql.epsilon_start/epsilon_end must be in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.anneal_fraction) {
            return Err("iql.anneal_fraction must be in [0, 1]".into());
        }
        if self.update_every == 0 || self.target_sync == 0 {
            return Err("iql.update_every and iql.target_sync must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_obs: Vec<f64>,
    pub done: bool,
}

/// One agent's learner state.
#[derive(Debug, Clone)]
pub struct QLearner {
    pub online: DenseNet,
    pub target: DenseNet,
    pub replay: VecDeque<Transition>,
    pub updates: u64,
}

impl QLearner {
    pub fn from_net(online: DenseNet) -> Self {
        QLearner {
            target: online.clone(),
            online,
            replay: VecDeque::new(),
            updates: 0,
        }
    }

    pub fn greedy_action(&self, obs: &[f64]) -> Result<usize, NnError> {
        Ok(crate::emac::argmax(&self.online.infer(obs)?))
    }
}

/// Mean squared TD-error against fixed targets; gradients w.r.t. the
/// online network only (dL/dQ is one-hot at the taken action).
pub fn q_regression_loss(
    net: &DenseNet,
    batch: &[(&[f64], usize, f64)],
) -> Result<(f64, Gradients), NnError> {
    let n = batch.len().max(1) as f64;
    let mut grads = Gradients::zeros_like(net);
    let mut loss = 0.0;
    for &(obs, action, target) in batch {
        let (q, tape) = net.forward(obs)?;
        let err = q[action] - target;
        loss += err * err / n;
        let mut dl_dq = vec![0.0; q.len()];
        dl_dq[action] = 2.0 * err / n;
        let (g, _) = net.backward(&tape, &dl_dq)?;
        grads.add_scaled(&g, 1.0);
    }
    Ok((loss, grads))
}

/// TD target: y = r + gamma * max_a Q_target(o', a), or y = r on
/// terminal transitions.
pub fn td_target(learner: &QLearner, transition: &Transition, gamma: f64) -> Result<f64, NnError> {
    if transition.done {
        return Ok(transition.reward);
    }
    let q_next = learner.target.infer(&transition.next_obs)?;
    let max = q_next.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(transition.reward + gamma * max)
}

pub fn iql_train(
    cfg: &RunConfig,
    master_seed: u64,
    sink: &mut dyn TrainSink,
) -> Result<TrainOutput<Vec<QLearner>>, TrainError> {
    cfg.validate().map_err(|e| TrainError::Config(e.to_string()))?;
    let mut model_rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, STREAM_MODEL, 2));
    let mut learners: Vec<QLearner> = cfg
        .world
        .sensor_k
        .iter()
        .map(|&k| {
            let mut dims = vec![observation_len(k, &cfg.observation)];
            dims.extend(&cfg.network.q_hidden);
            dims.push(Action::COUNT);
            QLearner::from_net(DenseNet::init(
                &dims,
                Activation::Relu,
                Activation::Identity,
                &mut model_rng,
            ))
        })
        .collect();
    let mut adams: Vec<AdamState> = learners.iter().map(|l| AdamState::new(&l.online)).collect();
    let mut update_rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, STREAM_MODEL, 3));

    let episodes = cfg.training.episodes;
    let num_envs = cfg.training.parallel_envs;
    let anneal_span = ((episodes as f64) * cfg.iql.anneal_fraction).max(1.0);
    let mut env_steps = 0usize;
    let mut train_curve = Vec::with_capacity(episodes);
    let mut eval_curve = Vec::new();
    let mut stats = TrainStats::default();

    for episode in 0..episodes {
        let progress = (episode as f64 / anneal_span).min(1.0);
        let epsilon =
            cfg.iql.epsilon_start + (cfg.iql.epsilon_end - cfg.iql.epsilon_start) * progress;

        let mut length_sum = 0usize;
        for env in 0..num_envs {
            let idx = (episode * num_envs + env) as u64;
            let mut world = generate_world(
                seed::derive(master_seed, STREAM_TRAIN, idx),
                &cfg.world,
                &cfg.rewards,
                &cfg.disturbances,
            )?;
            let mut beliefs = BeliefState::new(&world, cfg.disturbances.comm_delay_steps);
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed::derive(master_seed, STREAM_ROLLOUT, idx));
            loop {
                let mut decided: Vec<Option<(Vec<f64>, usize)>> = Vec::new();
                let mut joint = Vec::new();
                for agent in &world.agents {
                    if !agent.active {
                        joint.push(Action::NoMove);
                        decided.push(None);
                        continue;
                    }
                    let obs = build_observation(
                        &world,
                        beliefs.belief(agent.id),
                        agent,
                        &cfg.observation,
                    );
                    let action = if rng.gen::<f64>() < epsilon {
                        rng.gen_range(0..Action::COUNT)
                    } else {
                        learners[agent.id].greedy_action(&obs.values)?
                    };
                    joint.push(Action::from_index(action).unwrap());
                    decided.push(Some((obs.values, action)));
                }
                let out = world.step(&joint)?;
                beliefs.update(&world);
                for (agent_id, choice) in decided.into_iter().enumerate() {
                    let Some((obs, action)) = choice else { continue };
                    let agent = &world.agents[agent_id];
                    // an agent deactivated during the step has no future:
                    // treat its final transition as terminal
                    let terminal = out.done || !agent.active;
                    let next_obs = if terminal {
                        vec![0.0; obs.len()]
                    } else {
                        build_observation(&world, beliefs.belief(agent_id), agent, &cfg.observation)
                            .values
                    };
                    let learner = &mut learners[agent_id];
                    learner.replay.push_back(Transition {
                        obs,
                        action,
                        reward: out.rewards.per_agent[agent_id].total(),
                        next_obs,
                        done: terminal,
                    });
                    if learner.replay.len() > cfg.iql.replay_capacity {
                        learner.replay.pop_front();
                    }
                }
                env_steps += 1;
                if env_steps % cfg.iql.update_every == 0 {
                    for (learner, adam) in learners.iter_mut().zip(&mut adams) {
                        let loss = update_learner(learner, adam, cfg, &mut update_rng)?;
                        if let Some(loss) = loss {
                            if !loss.is_finite() {
                                sink.on_diverged(episode, &TrainedModel::Iql(learners.clone()));
                                return Err(TrainError::Diverged {
                                    episode,
                                    loss: "q-regression",
                                });
                            }
                            stats.critic_updates += 1;
                        }
                    }
                }
                if out.done {
                    break;
                }
            }
            length_sum += world.t;
        }

        let mean_len = length_sum as f64 / num_envs as f64;
        train_curve.push(CurvePoint { episode, value: mean_len });
        sink.on_episode(episode, mean_len);

        if cfg.training.eval_interval > 0 && (episode + 1) % cfg.training.eval_interval == 0 {
            let seeds: Vec<u64> = (0..cfg.training.eval_trials)
                .map(|i| {
                    seed::derive(master_seed, STREAM_EVAL, (episode as u64) * 1_000_003 + i as u64)
                })
                .collect();
            let mut policy = crate::policy::IqlPolicy::new(&learners, cfg.observation);
            let trial_stats = crate::eval::run_trials(&mut policy, cfg, &seeds, None)
                .map_err(|e| TrainError::Config(e.to_string()))?;
            eval_curve.push(CurvePoint { episode: episode + 1, value: trial_stats.mean_steps() });
            sink.on_eval(episode + 1, trial_stats.mean_steps());
        }
    }

    Ok(TrainOutput {
        model: learners,
        train_curve,
        eval_curve,
        stats,
    })
}

/// One minibatch update (or one online-transition update when replay is
/// disabled). Returns the loss, or None when there is not enough data.
fn update_learner(
    learner: &mut QLearner,
    adam: &mut AdamState,
    cfg: &RunConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Option<f64>, TrainError> {
    let gamma = cfg.training.gamma;
    let picks: Vec<usize> = if cfg.iql.use_replay {
        if learner.replay.len() < cfg.iql.batch_size {
            return Ok(None);
        }
        (0..cfg.iql.batch_size)
            .map(|_| rng.gen_range(0..learner.replay.len()))
            .collect()
    } else {
        if learner.replay.is_empty() {
            return Ok(None);
        }
        vec![learner.replay.len() - 1]
    };
    let mut targets = Vec::with_capacity(picks.len());
    for &i in &picks {
        targets.push(td_target(learner, &learner.replay[i], gamma)?);
    }
    let batch: Vec<(&[f64], usize, f64)> = picks
        .iter()
        .zip(&targets)
        .map(|(&i, &y)| {
            let tr = &learner.replay[i];
            (tr.obs.as_slice(), tr.action, y)
        })
        .collect();
    let (loss, mut grads) = q_regression_loss(&learner.online, &batch)?;
    grads.clip_global_norm(cfg.optimizer.grad_clip);
    adam_step(&mut learner.online, &grads, adam, &cfg.optimizer)?;
    learner.updates += 1;
    if learner.updates % cfg.iql.target_sync == 0 {
        learner.target = learner.online.clone();
    }
    Ok(Some(loss))
}
