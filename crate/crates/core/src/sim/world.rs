//! The world state and its joint-action transition.

use rand_chacha::ChaCha8Rng;

use super::action::Action;
use super::config::{CollisionMode, DisturbanceConfig, RewardConfig, WorldConfig};
use super::disturbance::{apply_dropout, apply_wind};
use super::grid::{sensor_footprint, Cell, CoverageGrid, TerrainGrid};
use super::rewards::{compute_rewards, RewardVector};
use super::SimError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentState {
    pub id: usize,
    pub position: Cell,
    /// Sensor footprint side; odd.
    pub sensor_k: usize,
    pub active: bool,
    pub last_action: Action,
}

/// Everything the transition function produced beyond the rewards.
#[derive(Debug, Clone)]
pub struct StepInfo {
    /// Cells newly covered this step (all agents).
    pub newly_covered: usize,
    /// Exclusive per-agent attribution of the newly covered cells
    /// (lower agent index wins shared cells).
    pub per_agent_new_cells: Vec<usize>,
    /// Whether each agent attempted a collision this step.
    pub collisions: Vec<bool>,
    pub done_by_coverage: bool,
    pub coverage_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub rewards: RewardVector,
    pub done: bool,
    pub info: StepInfo,
}

/// The true environment state: terrain, coverage, agents, step counter,
/// and the per-instance rng that drives wind and dropout.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub terrain: TerrainGrid,
    pub coverage: CoverageGrid,
    pub agents: Vec<AgentState>,
    /// Steps taken so far.
    pub t: usize,
    pub rng: ChaCha8Rng,
    pub factors: DisturbanceConfig,
    pub rewards: RewardConfig,
    pub timeout: usize,
    pub collision_mode: CollisionMode,
}

impl World {
    pub fn size(&self) -> usize {
        self.terrain.size()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn active_count(&self) -> usize {
        self.agents.iter().filter(|a| a.active).count()
    }

    pub fn done(&self) -> bool {
        self.coverage.is_complete() || self.t >= self.timeout
    }

    /// Restores the fields derived from a config (used by log replay).
    pub fn config(&self) -> WorldConfig {
        WorldConfig {
            grid_size: self.size(),
            num_agents: self.num_agents(),
            sensor_k: self.agents.iter().map(|a| a.sensor_k).collect(),
            obstacle_density: self.terrain.obstacle_count() as f64
                / (self.size() * self.size()) as f64,
            timeout: self.timeout,
            collision_mode: self.collision_mode,
            eval_collision_mode: self.collision_mode,
        }
    }

    /// Advances the world by one joint action.
    ///
    /// Order: wind, dropout, intended targets, collision resolution,
    /// position update, coverage update, rewards, step count. Done when
    /// coverage is complete or the timeout is reached.
    pub fn step(&mut self, joint_action: &[Action]) -> Result<StepOutcome, SimError> {
        let n = self.agents.len();
        if joint_action.len() != n {
            return Err(SimError::JointActionLength {
                got: joint_action.len(),
                want: n,
            });
        }
        if self.t >= self.timeout {
            return Err(SimError::PastTimeout { timeout: self.timeout });
        }

        // 1) wind perturbs each active agent's action
        let mut actions: Vec<Action> = joint_action.to_vec();
        for (agent, action) in self.agents.iter().zip(actions.iter_mut()) {
            if agent.active {
                *action = apply_wind(*action, self.factors.wind_prob, &mut self.rng);
            }
        }

        // 2) dropout
        apply_dropout(
            &mut self.agents,
            self.factors.dropout_prob,
            self.factors.dropout_min_agents,
            &mut self.rng,
        );

        // 3-5) movement with collision resolution
        let collisions = self.resolve_moves(&actions);

        // 6) coverage from the new footprints, attributed in index order
        let before = self.coverage.clone();
        let mut per_agent_new = vec![0usize; n];
        for i in 0..n {
            if !self.agents[i].active {
                continue;
            }
            let footprint =
                sensor_footprint(self.agents[i].position, self.agents[i].sensor_k, self.size());
            for cell in footprint {
                if self.coverage.cover(cell) {
                    per_agent_new[i] += 1;
                }
            }
        }

        // 7) rewards
        let done_by_coverage = self.coverage.is_complete();
        let rewards = compute_rewards(
            &before,
            &self.coverage,
            &per_agent_new,
            &collisions,
            done_by_coverage,
            &self.rewards,
        )?;

        // 8) advance time
        self.t += 1;
        let done = done_by_coverage || self.t >= self.timeout;

        Ok(StepOutcome {
            rewards,
            done,
            info: StepInfo {
                newly_covered: self.coverage.covered_count() - before.covered_count(),
                per_agent_new_cells: per_agent_new,
                collisions,
                done_by_coverage,
                coverage_fraction: self.coverage.fraction(),
            },
        })
    }

    /// Computes intended targets, resolves boundary/obstacle/agent-agent
    /// conflicts per the collision mode, and moves the agents. Returns
    /// the per-agent collision flags.
    ///
    /// Agent-agent conflicts (shared target or swap) count as collisions
    /// for both parties; the lower index wins a contested cell under
    /// no-move resolution. Repairs convert moves into stays, so the
    /// conflict scan iterates to a fixpoint; it terminates because each
    /// round strictly reduces the number of moving agents.
    fn resolve_moves(&mut self, actions: &[Action]) -> Vec<bool> {
        let n = self.agents.len();
        let mut collided = vec![false; n];
        let mut targets: Vec<Cell> = self.agents.iter().map(|a| a.position).collect();

        // boundary and obstacle collisions
        for i in 0..n {
            if !self.agents[i].active {
                continue;
            }
            let (dr, dc) = actions[i].delta();
            if !actions[i].is_move() {
                continue;
            }
            let (r, c) = (
                self.agents[i].position.0 as i32 + dr,
                self.agents[i].position.1 as i32 + dc,
            );
            if !self.terrain.in_bounds(r, c) || !self.terrain.is_free((r as usize, c as usize)) {
                collided[i] = true;
                self.repair(i); // stays put or deactivates
            } else {
                targets[i] = (r as usize, c as usize);
            }
        }

        // agent-agent conflicts to fixpoint
        loop {
            let mut changed = false;
            for i in 0..n {
                if !self.agents[i].active {
                    continue;
                }
                for j in (i + 1)..n {
                    if !self.agents[j].active {
                        continue;
                    }
                    let (pi, pj) = (self.agents[i].position, self.agents[j].position);
                    let (ti, tj) = (targets[i], targets[j]);
                    if ti == tj {
                        // contested cell: lower index wins
                        collided[i] = true;
                        collided[j] = true;
                        targets[j] = pj;
                        self.repair(j);
                        changed = true;
                    } else if ti == pj && tj == pi && ti != pi {
                        // swap: both bounce
                        collided[i] = true;
                        collided[j] = true;
                        targets[i] = pi;
                        targets[j] = pj;
                        self.repair(i);
                        self.repair(j);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        for i in 0..n {
            if self.agents[i].active {
                self.agents[i].position = targets[i];
                self.agents[i].last_action = actions[i];
            }
        }
        collided
    }

    fn repair(&mut self, i: usize) {
        if self.collision_mode == CollisionMode::Deactivate {
            self.agents[i].active = false;
        }
    }
}
