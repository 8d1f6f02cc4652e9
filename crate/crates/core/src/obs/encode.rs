//! Egocentric observation encoding.

use super::belief::BeliefCoverage;
use super::ObsError;
use crate::sim::{Action, AgentState, Cell, CoverageGrid, World};
use serde::{Deserialize, Serialize};

/// Team-wide observation sizes; heterogeneity enters only through each
/// agent's sensor k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObsConfig {
    /// Near-field visit window side j (odd).
    pub near_field: usize,
    /// Far-field pooled output side m, 1 <= m <= 2M.
    pub far_field: usize,
}

impl Default for ObsConfig {
    fn default() -> Self {
        ObsConfig {
            near_field: 5,
            far_field: 8,
        }
    }
}

impl ObsConfig {
    pub fn validate(&self, grid_size: usize) -> Result<(), ObsError> {
        if self.near_field % 2 == 0 || self.near_field == 0 {
            return Err(ObsError::BadConfig(format!(
                "observation.near_field must be odd and >= 1, got {}",
                self.near_field
            )));
        }
        if self.far_field < 1 || self.far_field > 2 * grid_size {
            return Err(ObsError::BadConfig(format!(
                "observation.far_field must be in [1, {}], got {}",
                2 * grid_size,
                self.far_field
            )));
        }
        Ok(())
    }
}

/// Flattened observation vector, every entry in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub values: Vec<f64>,
}

impl Observation {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// L_i = k_i^2 + j^2 + m^2 + 9.
pub fn observation_len(sensor_k: usize, cfg: &ObsConfig) -> usize {
    sensor_k * sensor_k + cfg.near_field * cfg.near_field + cfg.far_field * cfg.far_field
        + Action::COUNT
}

/// k×k egocentric terrain patch: Free = 0.0, Obstacle = 1.0, off-map
/// padded 1.0 (impassable).
pub fn sense_terrain(world: &World, agent: &AgentState) -> Vec<f64> {
    let k = agent.sensor_k as i32;
    let radius = (k - 1) / 2;
    let (pr, pc) = (agent.position.0 as i32, agent.position.1 as i32);
    let mut patch = Vec::with_capacity((k * k) as usize);
    for dr in -radius..=radius {
        for dc in -radius..=radius {
            let (r, c) = (pr + dr, pc + dc);
            let v = if world.terrain.in_bounds(r, c) {
                if world.terrain.is_free((r as usize, c as usize)) {
                    0.0
                } else {
                    1.0
                }
            } else {
                1.0
            };
            patch.push(v);
        }
    }
    patch
}

fn visit_window(believed: &CoverageGrid, center: Cell, side: usize) -> Vec<f64> {
    let radius = (side as i32 - 1) / 2;
    let size = believed.size() as i32;
    let (pr, pc) = (center.0 as i32, center.1 as i32);
    let mut patch = Vec::with_capacity(side * side);
    for dr in -radius..=radius {
        for dc in -radius..=radius {
            let (r, c) = (pr + dr, pc + dc);
            let v = if r >= 0 && c >= 0 && r < size && c < size {
                if believed.is_covered((r as usize, c as usize)) {
                    1.0
                } else {
                    0.0
                }
            } else {
                // off-map reads as already covered: never worth visiting
                1.0
            };
            patch.push(v);
        }
    }
    patch
}

/// j×j egocentric window of believed coverage.
pub fn near_field_visits(belief: &BeliefCoverage, agent: &AgentState, j: usize) -> Vec<f64> {
    visit_window(&belief.believed, agent.position, j)
}

/// Adaptive average-pool of the full (2M-1)×(2M-1) egocentric believed
/// coverage window down to m×m. Bin (a, b) averages input rows
/// floor(a*W/m)..floor((a+1)*W/m) (and likewise for columns), W = 2M-1.
pub fn far_field_visits(belief: &BeliefCoverage, agent: &AgentState, m: usize) -> Vec<f64> {
    let grid = belief.believed.size();
    let w = 2 * grid - 1;
    debug_assert!(m >= 1 && m <= 2 * grid);
    let window = visit_window(&belief.believed, agent.position, w);
    let mut pooled = Vec::with_capacity(m * m);
    for a in 0..m {
        let r0 = a * w / m;
        let r1 = (a + 1) * w / m;
        for b in 0..m {
            let c0 = b * w / m;
            let c1 = (b + 1) * w / m;
            let mut sum = 0.0;
            for r in r0..r1 {
                for c in c0..c1 {
                    sum += window[r * w + c];
                }
            }
            pooled.push(sum / ((r1 - r0) * (c1 - c0)) as f64);
        }
    }
    pooled
}

/// [terrain | near | far | one_hot(last_action)], row-major per patch.
pub fn build_observation(
    world: &World,
    belief: &BeliefCoverage,
    agent: &AgentState,
    cfg: &ObsConfig,
) -> Observation {
    let mut values = sense_terrain(world, agent);
    values.extend(near_field_visits(belief, agent, cfg.near_field));
    values.extend(far_field_visits(belief, agent, cfg.far_field));
    let mut one_hot = [0.0; Action::COUNT];
    one_hot[agent.last_action.index()] = 1.0;
    values.extend(one_hot);
    debug_assert_eq!(values.len(), observation_len(agent.sensor_k, cfg));
    Observation { values }
}
