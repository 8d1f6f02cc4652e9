//! Monte Carlo discounted returns.

use super::buffer::TrajectoryBuffer;

/// Backward recursion R_t = r_t + gamma * R_{t+1}, no bootstrapping.
pub fn compute_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut returns = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        acc = rewards[t] + gamma * acc;
        returns[t] = acc;
    }
    returns
}

/// Per (env, t, agent) returns aligned with the buffer; `None` where the
/// agent has no sample. An agent that drops mid-episode gets returns
/// over its own recorded prefix.
pub fn returns_table(buffer: &TrajectoryBuffer, gamma: f64) -> Vec<Vec<Vec<Option<f64>>>> {
    buffer
        .envs
        .iter()
        .map(|env| {
            let horizon = env.steps.len();
            let num_agents = env.steps.first().map_or(0, |s| s.agents.len());
            let mut table = vec![vec![None; num_agents]; horizon];
            for agent in 0..num_agents {
                let ts: Vec<usize> = (0..horizon)
                    .filter(|&t| env.steps[t].agents[agent].is_some())
                    .collect();
                let rewards: Vec<f64> = ts
                    .iter()
                    .map(|&t| env.steps[t].agents[agent].as_ref().unwrap().reward)
                    .collect();
                for (&t, &ret) in ts.iter().zip(compute_returns(&rewards, gamma).iter()) {
                    table[t][agent] = Some(ret);
                }
            }
            table
        })
        .collect()
}
