//! The EMAC model: n embedding networks, one shared actor, one
//! centralized critic.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{EntropyMode, NetworkConfig, TrainingConfig, TripletConfig};
use crate::nn::{sample_categorical, softmax, Activation, DenseNet, NnError};
use crate::obs::{observation_len, ObsConfig, Observation};
use crate::sim::{Action, World};

/// Flattened global state: terrain (0/1), coverage (0/1), and active
/// agent occupancy (0/1), length 3M².
pub fn global_state(world: &World) -> Vec<f64> {
    let m = world.size();
    let mut state = Vec::with_capacity(3 * m * m);
    for r in 0..m {
        for c in 0..m {
            state.push(if world.terrain.is_free((r, c)) { 0.0 } else { 1.0 });
        }
    }
    for r in 0..m {
        for c in 0..m {
            state.push(if world.coverage.is_covered((r, c)) { 1.0 } else { 0.0 });
        }
    }
    let mut occupancy = vec![0.0; m * m];
    for agent in world.agents.iter().filter(|a| a.active) {
        occupancy[agent.position.0 * m + agent.position.1] = 1.0;
    }
    state.extend(occupancy);
    state
}

pub fn global_state_len(grid_size: usize) -> usize {
    3 * grid_size * grid_size
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmacModel {
    /// One single-layer encoder per agent, L_i -> d.
    pub encoders: Vec<DenseNet>,
    /// Shared policy head over embeddings, d -> ... -> 9.
    pub actor: DenseNet,
    /// Centralized value function, 3M² -> ... -> 1.
    pub critic: DenseNet,
    pub embedding_dim: usize,
    pub gamma: f64,
    pub entropy_coeff: f64,
    pub entropy_mode: EntropyMode,
    pub encoder_actor_grads: bool,
    pub triplet: TripletConfig,
}

impl EmacModel {
    pub fn init(
        sensor_k: &[usize],
        grid_size: usize,
        obs_cfg: &ObsConfig,
        net_cfg: &NetworkConfig,
        train_cfg: &TrainingConfig,
        triplet: &TripletConfig,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let d = net_cfg.embedding_dim;
        let encoders = sensor_k
            .iter()
            .map(|&k| {
                let l_i = observation_len(k, obs_cfg);
                DenseNet::init(&[l_i, d], Activation::Identity, Activation::Identity, rng)
            })
            .collect();
        let mut actor_dims = vec![d];
        actor_dims.extend(&net_cfg.actor_hidden);
        actor_dims.push(Action::COUNT);
        let actor = DenseNet::init(&actor_dims, Activation::Relu, Activation::Identity, rng);
        let mut critic_dims = vec![global_state_len(grid_size)];
        critic_dims.extend(&net_cfg.critic_hidden);
        critic_dims.push(1);
        let critic = DenseNet::init(&critic_dims, Activation::Relu, Activation::Identity, rng);
        EmacModel {
            encoders,
            actor,
            critic,
            embedding_dim: d,
            gamma: train_cfg.gamma,
            entropy_coeff: train_cfg.entropy_coeff,
            entropy_mode: train_cfg.entropy_mode,
            encoder_actor_grads: train_cfg.encoder_actor_grads,
            triplet: triplet.clone(),
        }
    }

    pub fn num_agents(&self) -> usize {
        self.encoders.len()
    }

    /// Fixed-length embedding of one agent's observation.
    pub fn embed(&self, agent: usize, obs: &Observation) -> Result<Vec<f64>, NnError> {
        self.encoders[agent].infer(&obs.values)
    }

    /// Action logits for one agent.
    pub fn policy_logits(&self, agent: usize, obs: &Observation) -> Result<Vec<f64>, NnError> {
        let embedding = self.embed(agent, obs)?;
        self.actor.infer(&embedding)
    }

    /// Decentralized action selection: each agent's action depends only
    /// on its own observation (and one rng draw when sampling). Agents
    /// without an observation (inactive) get NoMove.
    pub fn act(
        &self,
        observations: &[Option<&Observation>],
        rng: &mut ChaCha8Rng,
        greedy: bool,
    ) -> Result<Vec<Action>, NnError> {
        let mut joint = Vec::with_capacity(observations.len());
        for (agent, obs) in observations.iter().enumerate() {
            let Some(obs) = obs else {
                joint.push(Action::NoMove);
                continue;
            };
            let logits = self.policy_logits(agent, obs)?;
            let idx = if greedy {
                argmax(&logits)
            } else {
                sample_categorical(&softmax(&logits), rng)
            };
            joint.push(Action::from_index(idx).unwrap());
        }
        Ok(joint)
    }
}

/// Lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{generate_world, CollisionMode, DisturbanceConfig, RewardConfig, WorldConfig};
    use rand::SeedableRng;

    fn model(sensor_k: &[usize]) -> EmacModel {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        EmacModel::init(
            sensor_k,
            8,
            &ObsConfig::default(),
            &NetworkConfig {
                embedding_dim: 16,
                actor_hidden: vec![12],
                critic_hidden: vec![12],
                q_hidden: vec![12],
            },
            &TrainingConfig::default(),
            &TripletConfig::default(),
            &mut rng,
        )
    }

    fn obs_of_len(len: usize, fill: f64) -> Observation {
        Observation { values: vec![fill; len] }
    }

    #[test]
    fn zero_weight_encoder_embeds_to_zero() {
        let mut m = model(&[5]);
        let zeros = vec![0.0f32; m.encoders[0].param_count()];
        m.encoders[0].set_params(&zeros).unwrap();
        let obs = obs_of_len(m.encoders[0].input_dim(), 0.7);
        assert!(m.embed(0, &obs).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn heterogeneous_sensors_embed_to_the_same_dimension() {
        let m = model(&[7, 9]);
        let o7 = obs_of_len(m.encoders[0].input_dim(), 0.5);
        let o9 = obs_of_len(m.encoders[1].input_dim(), 0.5);
        assert_ne!(o7.len(), o9.len());
        assert_eq!(m.embed(0, &o7).unwrap().len(), 16);
        assert_eq!(m.embed(1, &o9).unwrap().len(), 16);
    }

    #[test]
    fn embedding_is_deterministic() {
        let m = model(&[5]);
        let obs = obs_of_len(m.encoders[0].input_dim(), 0.3);
        assert_eq!(m.embed(0, &obs).unwrap(), m.embed(0, &obs).unwrap());
    }

    #[test]
    fn wrong_observation_length_is_a_contract_error() {
        let m = model(&[5]);
        let obs = obs_of_len(3, 0.1);
        assert!(matches!(m.embed(0, &obs), Err(NnError::InputLength { .. })));
    }

    #[test]
    fn greedy_act_takes_the_dominant_logit() {
        let mut m = model(&[5]);
        // zero actor with a large bias on action 4
        let zeros = vec![0.0f32; m.actor.param_count()];
        m.actor.set_params(&zeros).unwrap();
        let last = m.actor.layers.len() - 1;
        m.actor.layers[last].bias[4] = 10.0;
        let obs = obs_of_len(m.encoders[0].input_dim(), 0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let joint = m.act(&[Some(&obs)], &mut rng, true).unwrap();
        assert_eq!(joint[0], Action::from_index(4).unwrap());
        // sampling with an overwhelming logit also lands there
        let joint = m.act(&[Some(&obs)], &mut rng, false).unwrap();
        assert_eq!(joint[0], Action::from_index(4).unwrap());
    }

    #[test]
    fn inactive_agents_receive_no_move() {
        let m = model(&[5, 5]);
        let obs = obs_of_len(m.encoders[0].input_dim(), 0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let joint = m.act(&[None, Some(&obs)], &mut rng, true).unwrap();
        assert_eq!(joint[0], Action::NoMove);
    }

    #[test]
    fn agent_action_ignores_other_agents_observations() {
        // one rng draw per observed agent: agent 1's sample only depends
        // on its own observation and its draw position
        let m = model(&[5, 5]);
        let own = obs_of_len(m.encoders[1].input_dim(), 0.4);
        let other_a = obs_of_len(m.encoders[0].input_dim(), 0.1);
        let other_b = obs_of_len(m.encoders[0].input_dim(), 0.9);
        for greedy in [true, false] {
            let mut rng_a = ChaCha8Rng::seed_from_u64(33);
            let mut rng_b = ChaCha8Rng::seed_from_u64(33);
            let ja = m.act(&[Some(&other_a), Some(&own)], &mut rng_a, greedy).unwrap();
            let jb = m.act(&[Some(&other_b), Some(&own)], &mut rng_b, greedy).unwrap();
            assert_eq!(ja[1], jb[1]);
        }
    }

    #[test]
    fn global_state_encodes_terrain_coverage_occupancy() {
        let world = generate_world(
            3,
            &WorldConfig {
                grid_size: 6,
                num_agents: 2,
                sensor_k: vec![3, 3],
                obstacle_density: 0.1,
                timeout: 20,
                collision_mode: CollisionMode::NoMove,
                eval_collision_mode: CollisionMode::Deactivate,
            },
            &RewardConfig::default(),
            &DisturbanceConfig::default(),
        )
        .unwrap();
        let s = global_state(&world);
        assert_eq!(s.len(), global_state_len(6));
        assert!(s.iter().all(|&v| v == 0.0 || v == 1.0));
        let occupied: f64 = s[72..].iter().sum();
        assert_eq!(occupied, 2.0);
        let obstacles: f64 = s[..36].iter().sum();
        assert_eq!(obstacles as usize, world.terrain.obstacle_count());
        let covered: f64 = s[36..72].iter().sum();
        assert_eq!(covered as usize, world.coverage.covered_count());
    }
}
