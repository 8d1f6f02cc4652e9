//! Per-agent reward computation with components recorded separately.

use super::config::RewardConfig;
use super::grid::CoverageGrid;
use super::SimError;

/// The five reward components for one agent. Penalties are stored as
/// negative values so the total is a plain sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RewardComponents {
    pub terminal: f64,
    pub progress: f64,
    pub discovery: f64,
    pub visit_penalty: f64,
    pub collision_penalty: f64,
}

impl RewardComponents {
    pub fn total(&self) -> f64 {
        self.terminal + self.progress + self.discovery + self.visit_penalty + self.collision_penalty
    }
}

/// One [`RewardComponents`] per agent.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardVector {
    pub per_agent: Vec<RewardComponents>,
}

impl RewardVector {
    pub fn totals(&self) -> Vec<f64> {
        self.per_agent.iter().map(|c| c.total()).collect()
    }
}

/// Rewards for one transition:
///
/// r_i = [done_by_coverage] * R_term
///     + beta * newly_covered / M^2
///     + [new_cells_i > 0] * R_disc
///     - [new_cells_i == 0] * R_visit
///     - [collided_i] * R_coll
///
/// Terminal and progress are team components shared by every agent.
pub fn compute_rewards(
    coverage_before: &CoverageGrid,
    coverage_after: &CoverageGrid,
    per_agent_new_cells: &[usize],
    collisions: &[bool],
    done_by_coverage: bool,
    coeffs: &RewardConfig,
) -> Result<RewardVector, SimError> {
    if let Some(cell) = coverage_after.missing_from(coverage_before) {
        return Err(SimError::CoverageRegressed(cell.0, cell.1));
    }
    let m2 = (coverage_after.size() * coverage_after.size()) as f64;
    let newly = (coverage_after.covered_count() - coverage_before.covered_count()) as f64;
    let terminal = if done_by_coverage { coeffs.terminal } else { 0.0 };
    let progress = coeffs.progress_scale * newly / m2;

    let per_agent = per_agent_new_cells
        .iter()
        .zip(collisions)
        .map(|(&new_cells, &collided)| RewardComponents {
            terminal,
            progress,
            discovery: if new_cells > 0 { coeffs.discovery } else { 0.0 },
            visit_penalty: if new_cells == 0 { -coeffs.visit_penalty } else { 0.0 },
            collision_penalty: if collided { -coeffs.collision_penalty } else { 0.0 },
        })
        .collect();
    Ok(RewardVector { per_agent })
}
