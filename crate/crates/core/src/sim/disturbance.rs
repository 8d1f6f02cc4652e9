//! Wind turbulence and agent dropout.
//!
//! Both consume randomness only when their probability is positive, so
//! disabling an effect leaves the rng stream untouched and a disabled
//! run reproduces the undisturbed baseline exactly.

use rand::Rng;

use super::action::Action;
use super::world::AgentState;

/// With probability `wind_prob`, a movement action slips to one of its
/// two compass neighbours (each equally likely). NoMove never slips.
pub fn apply_wind<R: Rng>(action: Action, wind_prob: f64, rng: &mut R) -> Action {
    if wind_prob <= 0.0 || !action.is_move() {
        return action;
    }
    if rng.gen::<f64>() < wind_prob {
        let (ccw, cw) = action.ring_neighbors().expect("movement action has neighbours");
        if rng.gen::<bool>() {
            ccw
        } else {
            cw
        }
    } else {
        action
    }
}

/// Each active agent independently drops with probability `p`, processed
/// in agent-index order; drops are skipped once only `min_agents` remain.
pub fn apply_dropout<R: Rng>(agents: &mut [AgentState], p: f64, min_agents: usize, rng: &mut R) {
    if p <= 0.0 {
        return;
    }
    let mut active = agents.iter().filter(|a| a.active).count();
    for agent in agents.iter_mut() {
        if active <= min_agents {
            break;
        }
        if agent.active && rng.gen::<f64>() < p {
            agent.active = false;
            active -= 1;
        }
    }
}
