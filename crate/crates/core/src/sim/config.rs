//! World, reward, and disturbance configuration.

use serde::{Deserialize, Serialize};

/// What happens to an agent whose action would collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionMode {
    /// Collision converts to a no-move action (training default).
    NoMove,
    /// Colliding agents become inactive (evaluation default).
    Deactivate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    /// Cells per side (M).
    pub grid_size: usize,
    /// Team size (n).
    pub num_agents: usize,
    /// Per-agent sensor footprint side; odd, one entry per agent.
    pub sensor_k: Vec<usize>,
    /// Obstacle density rho; round(rho * M^2) cells become obstacles.
    pub obstacle_density: f64,
    /// Maximum episode length.
    pub timeout: usize,
    /// Collision handling during training rollouts.
    pub collision_mode: CollisionMode,
    /// Collision handling during evaluation trials.
    pub eval_collision_mode: CollisionMode,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            grid_size: 16,
            num_agents: 3,
            sensor_k: vec![7, 7, 7],
            obstacle_density: 0.10,
            timeout: 100,
            collision_mode: CollisionMode::NoMove,
            eval_collision_mode: CollisionMode::Deactivate,
        }
    }
}

impl WorldConfig {
    /// Key-by-key validation; the returned string names the offending key.
    pub fn validate(&self) -> Result<(), String> {
        if self.grid_size < 2 {
            return Err(format!("world.grid_size must be >= 2, got {}", self.grid_size));
        }
        if self.num_agents == 0 {
            return Err("world.num_agents must be >= 1".into());
        }
        if self.sensor_k.len() != self.num_agents {
            return Err(format!(
                "world.sensor_k must list one entry per agent ({} agents, {} entries)",
                self.num_agents,
                self.sensor_k.len()
            ));
        }
        for &k in &self.sensor_k {
            if k % 2 == 0 || k < 3 {
                return Err(format!("world.sensor_k entries must be odd and >= 3, got {k}"));
            }
        }
        if !(0.0..1.0).contains(&self.obstacle_density) {
            return Err(format!(
                "world.obstacle_density must be in [0, 1), got {}",
                self.obstacle_density
            ));
        }
        if self.timeout == 0 {
            return Err("world.timeout must be >= 1".into());
        }
        Ok(())
    }
}

/// Reward coefficients. The structure is fixed (terminal, progress,
/// discovery, visitation penalty, collision penalty); magnitudes are
/// configurable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    /// Team reward when coverage completes.
    pub terminal: f64,
    /// Scale on the team progress reward (fraction newly covered).
    pub progress_scale: f64,
    /// Individual reward for uncovering at least one new cell.
    pub discovery: f64,
    /// Individual penalty for uncovering none (applied as negative).
    pub visit_penalty: f64,
    /// Individual penalty for an attempted collision (applied as negative).
    pub collision_penalty: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            terminal: 10.0,
            progress_scale: 1.0,
            discovery: 0.1,
            visit_penalty: 0.05,
            collision_penalty: 0.5,
        }
    }
}

/// Environmental effects; probability 0 disables an effect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisturbanceConfig {
    /// Teammate messages arrive this many steps late.
    pub comm_delay_steps: usize,
    /// Per-step probability an active agent drops.
    pub dropout_prob: f64,
    /// Dropout never reduces the active count below this.
    pub dropout_min_agents: usize,
    /// Per-step probability a movement action slips to a ring neighbour.
    pub wind_prob: f64,
}

impl Default for DisturbanceConfig {
    fn default() -> Self {
        DisturbanceConfig {
            comm_delay_steps: 0,
            dropout_prob: 0.0,
            dropout_min_agents: 1,
            wind_prob: 0.0,
        }
    }
}

impl DisturbanceConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.dropout_prob) {
            return Err(format!(
                "disturbances.dropout_prob must be in [0, 1], got {}",
                self.dropout_prob
            ));
        }
        if !(0.0..=1.0).contains(&self.wind_prob) {
            return Err(format!(
                "disturbances.wind_prob must be in [0, 1], got {}",
                self.wind_prob
            ));
        }
        if self.dropout_min_agents == 0 {
            return Err("disturbances.dropout_min_agents must be >= 1".into());
        }
        Ok(())
    }
}
