//! Per-agent observation pipeline.
//!
//! Each agent's observation is the concatenation of four [0, 1]-scaled
//! parts: a k×k sensed terrain patch, a j×j near-field visit map, an
//! m×m pooled far-field visit map, and a one-hot of the last action.
//! Visit maps read from the agent's *belief* coverage, which lags true
//! coverage when communication delay is enabled.

mod belief;
mod encode;

pub use belief::{BeliefCoverage, BeliefState};
pub use encode::{
    build_observation, far_field_visits, near_field_visits, observation_len, sense_terrain,
    ObsConfig, Observation,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ObsError {
    #[error("invalid observation config: {0}")]
    BadConfig(String),
}
