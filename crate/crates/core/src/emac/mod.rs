//! EMAC: per-agent embedding networks with a triplet loss, a shared
//! actor over the fixed-length embeddings, and a centralized critic on
//! the global state. Trained with Monte Carlo advantage actor-critic
//! over parallel environments; executed decentralized (no critic).

mod buffer;
mod losses;
mod model;
mod returns;
mod trainer;

pub use buffer::{sample_triplets, AgentSample, EnvStep, EnvTrajectory, TrajectoryBuffer, TripletPick};
pub use losses::{actor_loss, critic_loss, policy_logit_grad, triplet_loss, value_loss, ActorBatchItem};
pub use model::{argmax, global_state, global_state_len, EmacModel};
pub use returns::{compute_returns, returns_table};
pub use trainer::{
    rollout_episode, train_emac, CurvePoint, NoopSink, TrainError, TrainOutput, TrainSink,
};

use serde::{Deserialize, Serialize};

/// How the entropy regularizer is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMode {
    /// Sum over the full action distribution (default).
    Full,
    /// Evaluated only at the taken action.
    Taken,
}

/// Network shapes. The embedding layer is a single dense layer per
/// agent; actor and critic widths are hidden-layer lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub embedding_dim: usize,
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    pub q_hidden: Vec<usize>,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            embedding_dim: 64,
            actor_hidden: vec![64, 64],
            critic_hidden: vec![128, 128],
            q_hidden: vec![64, 64],
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.embedding_dim == 0 {
            return Err("network.embedding_dim must be >= 1".into());
        }
        if self.actor_hidden.iter().chain(&self.critic_hidden).chain(&self.q_hidden).any(|&h| h == 0) {
            return Err("network hidden sizes must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub episodes: usize,
    /// Parallel environment count E.
    pub parallel_envs: usize,
    pub gamma: f64,
    pub entropy_coeff: f64,
    pub entropy_mode: EntropyMode,
    /// Whether actor-loss gradients flow into the encoders.
    pub encoder_actor_grads: bool,
    /// Greedy evaluation every this many episodes (0 disables).
    pub eval_interval: usize,
    pub eval_trials: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            episodes: 15_000,
            parallel_envs: 8,
            gamma: 0.99,
            entropy_coeff: 0.01,
            entropy_mode: EntropyMode::Full,
            encoder_actor_grads: true,
            eval_interval: 100,
            eval_trials: 40,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(format!("training.gamma must be in [0, 1), got {}", self.gamma));
        }
        if self.parallel_envs == 0 {
            return Err("training.parallel_envs must be >= 1".into());
        }
        if self.episodes == 0 {
            return Err("training.episodes must be >= 1".into());
        }
        Ok(())
    }
}

/// Triplet-loss shape: hinge by default, soft-margin behind the flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TripletConfig {
    pub margin: f64,
    /// Negatives must be more than this many steps from the anchor.
    pub time_buffer: usize,
    /// Scale on the encoder triplet update.
    pub weight: f64,
    /// Use log(1 + exp(z)) instead of max(0, z).
    pub soft_margin: bool,
}

impl Default for TripletConfig {
    fn default() -> Self {
        TripletConfig {
            margin: 0.2,
            time_buffer: 5,
            weight: 0.1,
            soft_margin: false,
        }
    }
}

impl TripletConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.margin < 0.0 {
            return Err(format!("triplet.margin must be >= 0, got {}", self.margin));
        }
        if self.weight < 0.0 {
            return Err(format!("triplet.weight must be >= 0, got {}", self.weight));
        }
        Ok(())
    }
}
