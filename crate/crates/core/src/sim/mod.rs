//! Gridworld simulator: terrain generation, joint-action transitions,
//! reward computation, termination, and the environmental disturbance
//! models (wind turbulence, agent dropout; communication delay lives in
//! [`crate::obs`] since it only affects what agents believe).

mod action;
mod config;
mod disturbance;
mod generate;
mod grid;
mod rewards;
mod world;

pub use action::Action;
pub use config::{CollisionMode, DisturbanceConfig, RewardConfig, WorldConfig};
pub use disturbance::{apply_dropout, apply_wind};
pub use generate::generate_world;
pub use grid::{sensor_footprint, Cell, CoverageGrid, Terrain, TerrainGrid};
pub use rewards::{compute_rewards, RewardComponents, RewardVector};
pub use world::{AgentState, StepInfo, StepOutcome, World};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("no free-connected terrain found in {attempts} rejection attempts (density {density})")]
    GenerationFailed { attempts: usize, density: f64 },
    #[error("{requested} agents requested but only {free} free cells exist")]
    TooManyAgents { requested: usize, free: usize },
    #[error("joint action has {got} entries, world has {want} agents")]
    JointActionLength { got: usize, want: usize },
    #[error("step called on a world already at its timeout of {timeout}")]
    PastTimeout { timeout: usize },
    #[error("coverage regressed: cell ({0}, {1}) was covered before but not after")]
    CoverageRegressed(usize, usize),
    #[error("invalid world config: {0}")]
    BadConfig(String),
}
