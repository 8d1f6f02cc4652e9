//! Seeded world generation with rejection sampling for connectivity.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::action::Action;
use super::config::{DisturbanceConfig, RewardConfig, WorldConfig};
use super::grid::{sensor_footprint, Cell, CoverageGrid, Terrain, TerrainGrid};
use super::world::{AgentState, World};
use super::SimError;

const MAX_REJECTION_ATTEMPTS: usize = 1000;

/// Builds a fresh world: round(rho * M^2) obstacles placed uniformly at
/// random (re-sampled until the free cells are 8-connected), agents on
/// distinct random free cells, coverage seeded with the agents' initial
/// sensor footprints. Identical (seed, config) yields an identical world.
pub fn generate_world(
    seed: u64,
    config: &WorldConfig,
    rewards: &RewardConfig,
    factors: &DisturbanceConfig,
) -> Result<World, SimError> {
    config.validate().map_err(SimError::BadConfig)?;
    factors.validate().map_err(SimError::BadConfig)?;

    let m = config.grid_size;
    let n_cells = m * m;
    let n_obstacles = (config.obstacle_density * n_cells as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let all_cells: Vec<Cell> = (0..m).flat_map(|r| (0..m).map(move |c| (r, c))).collect();

    let terrain = {
        let mut found = None;
        for _ in 0..MAX_REJECTION_ATTEMPTS {
            let mut t = TerrainGrid::filled(m, Terrain::Free);
            for &cell in all_cells.choose_multiple(&mut rng, n_obstacles) {
                t.set(cell, Terrain::Obstacle);
            }
            if t.free_connected() {
                found = Some(t);
                break;
            }
        }
        found.ok_or(SimError::GenerationFailed {
            attempts: MAX_REJECTION_ATTEMPTS,
            density: config.obstacle_density,
        })?
    };

    let free = terrain.free_cells();
    if config.num_agents > free.len() {
        return Err(SimError::TooManyAgents {
            requested: config.num_agents,
            free: free.len(),
        });
    }
    let starts: Vec<Cell> = free
        .choose_multiple(&mut rng, config.num_agents)
        .copied()
        .collect();

    let agents: Vec<AgentState> = starts
        .iter()
        .zip(&config.sensor_k)
        .enumerate()
        .map(|(id, (&position, &sensor_k))| AgentState {
            id,
            position,
            sensor_k,
            active: true,
            last_action: Action::NoMove,
        })
        .collect();

    let mut coverage = CoverageGrid::empty(m);
    for agent in &agents {
        for cell in sensor_footprint(agent.position, agent.sensor_k, m) {
            coverage.cover(cell);
        }
    }

    Ok(World {
        terrain,
        coverage,
        agents,
        t: 0,
        rng,
        factors: factors.clone(),
        rewards: rewards.clone(),
        timeout: config.timeout,
        collision_mode: config.collision_mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(grid_size: usize, num_agents: usize, k: usize, density: f64) -> WorldConfig {
        WorldConfig {
            grid_size,
            num_agents,
            sensor_k: vec![k; num_agents],
            obstacle_density: density,
            timeout: 100,
            collision_mode: crate::sim::CollisionMode::NoMove,
            eval_collision_mode: crate::sim::CollisionMode::Deactivate,
        }
    }

    fn gen(seed: u64, config: &WorldConfig) -> Result<World, SimError> {
        generate_world(seed, config, &RewardConfig::default(), &DisturbanceConfig::default())
    }

    #[test]
    fn seed_seven_reference_world() {
        let world = gen(7, &cfg(16, 3, 7, 0.10)).unwrap();
        // round(0.10 * 256) = 26 obstacle cells
        assert_eq!(world.terrain.obstacle_count(), 26);
        assert!(world.terrain.free_connected());
        assert_eq!(world.t, 0);
        let positions: Vec<_> = world.agents.iter().map(|a| a.position).collect();
        for (i, &p) in positions.iter().enumerate() {
            assert!(world.terrain.is_free(p));
            for &q in &positions[i + 1..] {
                assert_ne!(p, q);
            }
        }
        // coverage is exactly the union of the initial footprints
        let mut expected = CoverageGrid::empty(16);
        for a in &world.agents {
            for cell in sensor_footprint(a.position, a.sensor_k, 16) {
                expected.cover(cell);
            }
        }
        assert_eq!(world.coverage, expected);
    }

    #[test]
    fn zero_density_means_no_obstacles() {
        let world = gen(3, &cfg(10, 2, 5, 0.0)).unwrap();
        assert_eq!(world.terrain.obstacle_count(), 0);
    }

    #[test]
    fn same_seed_and_config_is_bit_identical() {
        let config = cfg(12, 3, 5, 0.15);
        assert_eq!(gen(42, &config).unwrap(), gen(42, &config).unwrap());
        assert_ne!(gen(42, &config).unwrap(), gen(43, &config).unwrap());
    }

    #[test]
    fn too_many_agents_is_an_error() {
        // 3x3 grid at density just under 1 leaves very few free cells
        let mut config = cfg(3, 8, 3, 0.7);
        config.sensor_k = vec![3; 8];
        match gen(1, &config) {
            Err(SimError::TooManyAgents { .. }) | Err(SimError::GenerationFailed { .. }) => {}
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn impossible_density_fails_generation() {
        // density 0.9 on 16x16 essentially never yields a connected map
        let config = cfg(16, 1, 3, 0.9);
        assert!(matches!(
            gen(1, &config),
            Err(SimError::GenerationFailed { .. })
        ));
    }
}
