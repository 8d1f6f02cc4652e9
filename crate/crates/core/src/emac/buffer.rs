//! Per-episode trajectory storage and triplet sampling.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::obs::Observation;

/// One agent's record at one step. Absent entirely when the agent was
/// inactive at action time.
#[derive(Debug, Clone)]
pub struct AgentSample {
    pub obs: Observation,
    pub action: usize,
    pub log_prob: f64,
    pub reward: f64,
}

#[derive(Debug, Clone)]
pub struct EnvStep {
    /// Global state at action-selection time.
    pub global_state: Vec<f64>,
    pub agents: Vec<Option<AgentSample>>,
}

#[derive(Debug, Clone, Default)]
pub struct EnvTrajectory {
    pub steps: Vec<EnvStep>,
}

impl EnvTrajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Algorithm 1's buffer D: one trajectory per parallel environment.
#[derive(Debug, Clone, Default)]
pub struct TrajectoryBuffer {
    pub envs: Vec<EnvTrajectory>,
}

impl TrajectoryBuffer {
    pub fn total_samples(&self) -> usize {
        self.envs
            .iter()
            .flat_map(|e| &e.steps)
            .map(|s| s.agents.iter().flatten().count())
            .sum()
    }

    pub fn clear(&mut self) {
        self.envs.clear();
    }
}

/// One sampled triplet, by reference into the buffer. The anchor and
/// negative come from the same agent at times more than `time_buffer`
/// apart; the positive is a different agent at the anchor time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripletPick {
    pub env: usize,
    pub t: usize,
    pub agent: usize,
    pub positive_agent: usize,
    pub negative_t: usize,
}

/// One triplet per (env, agent, t) where a valid teammate and a valid
/// negative time exist. Environments shorter than 2*time_buffer + 1
/// steps are skipped entirely.
pub fn sample_triplets(
    buffer: &TrajectoryBuffer,
    time_buffer: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<TripletPick> {
    let mut picks = Vec::new();
    for (env_idx, env) in buffer.envs.iter().enumerate() {
        let horizon = env.steps.len();
        if horizon < 2 * time_buffer + 1 {
            continue;
        }
        for (t, step) in env.steps.iter().enumerate() {
            for (agent, sample) in step.agents.iter().enumerate() {
                if sample.is_none() {
                    continue;
                }
                let teammates: Vec<usize> = step
                    .agents
                    .iter()
                    .enumerate()
                    .filter(|(j, s)| *j != agent && s.is_some())
                    .map(|(j, _)| j)
                    .collect();
                if teammates.is_empty() {
                    continue;
                }
                let negatives: Vec<usize> = (0..horizon)
                    .filter(|&t2| {
                        t2.abs_diff(t) > time_buffer && env.steps[t2].agents[agent].is_some()
                    })
                    .collect();
                if negatives.is_empty() {
                    continue;
                }
                picks.push(TripletPick {
                    env: env_idx,
                    t,
                    agent,
                    positive_agent: teammates[rng.gen_range(0..teammates.len())],
                    negative_t: negatives[rng.gen_range(0..negatives.len())],
                });
            }
        }
    }
    picks
}
