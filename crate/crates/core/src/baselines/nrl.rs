//! The non-learning coverage planner: Voronoi decomposition of a fully
//! observed world, boundary waypoints ordered by a coverage-greedy
//! heuristic, an inward spiral over each region, and BFS routing around
//! obstacles. Plans execute open loop with no replanning.

use std::collections::VecDeque;

use thiserror::Error;

use crate::sim::{sensor_footprint, Action, Cell, CoverageGrid, TerrainGrid, World};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("duplicate seed cell ({0}, {1})")]
    DuplicateSeed(usize, usize),
    #[error("seed ({0}, {1}) is not a free cell")]
    SeedNotFree(usize, usize),
    #[error("no path between ({},{}) and ({},{})", from.0, from.1, to.0, to.1)]
    NoPath { from: Cell, to: Cell },
}

/// Assignment of every free cell to its nearest seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoronoiPartition {
    size: usize,
    assignment: Vec<Option<usize>>,
    pub seeds: Vec<Cell>,
}

impl VoronoiPartition {
    pub fn owner(&self, cell: Cell) -> Option<usize> {
        self.assignment[cell.0 * self.size + cell.1]
    }

    pub fn region_cells(&self, agent: usize) -> Vec<Cell> {
        (0..self.size)
            .flat_map(|r| (0..self.size).map(move |c| (r, c)))
            .filter(|&cell| self.owner(cell) == Some(agent))
            .collect()
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

fn chebyshev(a: Cell, b: Cell) -> usize {
    let dr = a.0.abs_diff(b.0);
    let dc = a.1.abs_diff(b.1);
    dr.max(dc)
}

fn euclid_sq(a: Cell, b: Cell) -> usize {
    let dr = a.0.abs_diff(b.0);
    let dc = a.1.abs_diff(b.1);
    dr * dr + dc * dc
}

/// Nearest seed by Chebyshev distance (matching 8-connected motion);
/// Chebyshev ties refine by squared Euclidean distance, remaining ties
/// go to the lowest agent id.
pub fn voronoi_partition(
    terrain: &TerrainGrid,
    seeds: &[Cell],
) -> Result<VoronoiPartition, PlanError> {
    for (i, &s) in seeds.iter().enumerate() {
        if !terrain.is_free(s) {
            return Err(PlanError::SeedNotFree(s.0, s.1));
        }
        if seeds[..i].contains(&s) {
            return Err(PlanError::DuplicateSeed(s.0, s.1));
        }
    }
    let size = terrain.size();
    let mut assignment = vec![None; size * size];
    for r in 0..size {
        for c in 0..size {
            if !terrain.is_free((r, c)) {
                continue;
            }
            let winner = seeds
                .iter()
                .enumerate()
                .map(|(id, &s)| (chebyshev((r, c), s), euclid_sq((r, c), s), id))
                .min()
                .map(|(_, _, id)| id);
            assignment[r * size + c] = winner;
        }
    }
    Ok(VoronoiPartition {
        size,
        assignment,
        seeds: seeds.to_vec(),
    })
}

const EXPANSION_ORDER: [Action; 8] = [
    Action::North,
    Action::NorthEast,
    Action::East,
    Action::SouthEast,
    Action::South,
    Action::SouthWest,
    Action::West,
    Action::NorthWest,
];

fn step_toward(cell: Cell, action: Action, size: usize) -> Option<Cell> {
    let (dr, dc) = action.delta();
    let (r, c) = (cell.0 as i32 + dr, cell.1 as i32 + dc);
    (r >= 0 && c >= 0 && (r as usize) < size && (c as usize) < size)
        .then(|| (r as usize, c as usize))
}

/// BFS distances from `start` over cells satisfying `allow`, with the
/// fixed expansion order N, NE, E, SE, S, SW, W, NW.
fn bfs_distances(
    terrain: &TerrainGrid,
    start: Cell,
    allow: &dyn Fn(Cell) -> bool,
) -> Vec<Option<(u32, Cell)>> {
    let size = terrain.size();
    // (distance, parent) per cell
    let mut dist: Vec<Option<(u32, Cell)>> = vec![None; size * size];
    if !allow(start) {
        return dist;
    }
    dist[start.0 * size + start.1] = Some((0, start));
    let mut queue = VecDeque::from([start]);
    while let Some(cell) = queue.pop_front() {
        let d = dist[cell.0 * size + cell.1].unwrap().0;
        for action in EXPANSION_ORDER {
            if let Some(next) = step_toward(cell, action, size) {
                if allow(next) && dist[next.0 * size + next.1].is_none() {
                    dist[next.0 * size + next.1] = Some((d + 1, cell));
                    queue.push_back(next);
                }
            }
        }
    }
    dist
}

fn bfs_route_where(
    terrain: &TerrainGrid,
    from: Cell,
    to: Cell,
    allow: &dyn Fn(Cell) -> bool,
) -> Option<Vec<Cell>> {
    let size = terrain.size();
    let dist = bfs_distances(terrain, from, allow);
    dist[to.0 * size + to.1]?;
    let mut path = vec![to];
    let mut cursor = to;
    while cursor != from {
        cursor = dist[cursor.0 * size + cursor.1].unwrap().1;
        path.push(cursor);
    }
    path.reverse();
    Some(path)
}

/// Shortest 8-connected path over free cells, both endpoints included.
pub fn bfs_route(terrain: &TerrainGrid, from: Cell, to: Cell) -> Result<Vec<Cell>, PlanError> {
    bfs_route_where(terrain, from, to, &|c| terrain.is_free(c))
        .ok_or(PlanError::NoPath { from, to })
}

/// Waypoints along one region's perimeter (spacing ~ sensor k) plus the
/// region centroid, with all-pairs BFS path lengths over free cells.
#[derive(Debug, Clone)]
pub struct WaypointGraph {
    pub waypoints: Vec<Cell>,
    /// BFS path length between waypoints; `None` when unreachable.
    pub dist: Vec<Vec<Option<u32>>>,
}

pub fn build_boundary_graph(
    terrain: &TerrainGrid,
    partition: &VoronoiPartition,
    agent: usize,
    sensor_k: usize,
) -> WaypointGraph {
    let region = partition.region_cells(agent);
    if region.is_empty() {
        return WaypointGraph { waypoints: vec![], dist: vec![] };
    }
    let size = terrain.size();
    let in_region = |cell: Cell| partition.owner(cell) == Some(agent);

    // perimeter: region cells with a non-region 8-neighbour or map edge
    let mut perimeter: Vec<Cell> = region
        .iter()
        .copied()
        .filter(|&cell| {
            EXPANSION_ORDER.iter().any(|&a| match step_toward(cell, a, size) {
                Some(n) => !in_region(n),
                None => true,
            })
        })
        .collect();

    let centroid_target = (
        region.iter().map(|c| c.0).sum::<usize>() as f64 / region.len() as f64,
        region.iter().map(|c| c.1).sum::<usize>() as f64 / region.len() as f64,
    );
    // walk the perimeter in angular order and keep every ~k-th cell
    perimeter.sort_by(|&a, &b| {
        let angle = |c: Cell| {
            (c.0 as f64 - centroid_target.0).atan2(c.1 as f64 - centroid_target.1)
        };
        angle(a).partial_cmp(&angle(b)).unwrap().then(a.cmp(&b))
    });
    let mut waypoints: Vec<Cell> = Vec::new();
    for &cell in &perimeter {
        if waypoints.last().map_or(true, |&last| chebyshev(last, cell) >= sensor_k) {
            waypoints.push(cell);
        }
    }
    if waypoints.is_empty() {
        waypoints.push(perimeter[0]);
    }

    // region centroid (nearest region cell to the mean position)
    let centroid = *region
        .iter()
        .min_by_key(|&&c| {
            let dr = (c.0 as f64 - centroid_target.0).abs();
            let dc = (c.1 as f64 - centroid_target.1).abs();
            ((dr * dr + dc * dc) * 1_000_000.0) as u64
        })
        .unwrap();
    if !waypoints.contains(&centroid) {
        waypoints.push(centroid);
    }

    let dist_rows: Vec<Vec<Option<u32>>> = waypoints
        .iter()
        .map(|&w| {
            let map = bfs_distances(terrain, w, &|c| terrain.is_free(c));
            waypoints
                .iter()
                .map(|&v| map[v.0 * size + v.1].map(|(d, _)| d))
                .collect()
        })
        .collect();

    WaypointGraph {
        waypoints,
        dist: dist_rows,
    }
}

/// Orders waypoints by repeatedly taking the one whose footprint holds
/// the most currently-uncovered cells; ties go to the shorter BFS
/// distance from the current position, then the lowest cell index.
pub fn greedy_visit_order(
    graph: &WaypointGraph,
    start: Cell,
    terrain: &TerrainGrid,
    sensor_k: usize,
    initial_coverage: &CoverageGrid,
) -> Vec<Cell> {
    let size = terrain.size();
    let mut covered = initial_coverage.clone();
    let mut remaining: Vec<usize> = (0..graph.waypoints.len()).collect();
    let mut order = Vec::with_capacity(remaining.len());
    let mut current = start;
    while !remaining.is_empty() {
        let dist_map = bfs_distances(terrain, current, &|c| terrain.is_free(c));
        let mut best: Option<(usize, u32, usize, usize)> = None; // (gain, dist, cell_idx, remaining_idx)
        for (pos, &w) in remaining.iter().enumerate() {
            let cell = graph.waypoints[w];
            let gain = sensor_footprint(cell, sensor_k, size)
                .iter()
                .filter(|&&c| !covered.is_covered(c))
                .count();
            let dist = dist_map[cell.0 * size + cell.1].map_or(u32::MAX, |(d, _)| d);
            let cell_idx = cell.0 * size + cell.1;
            let better = match best {
                None => true,
                Some((bg, bd, bi, _)) => {
                    (gain, std::cmp::Reverse(dist), std::cmp::Reverse(cell_idx))
                        > (bg, std::cmp::Reverse(bd), std::cmp::Reverse(bi))
                }
            };
            if better {
                best = Some((gain, dist, cell_idx, pos));
            }
        }
        let (_, _, _, pos) = best.unwrap();
        let w = remaining.swap_remove(pos);
        let cell = graph.waypoints[w];
        for c in sensor_footprint(cell, sensor_k, size) {
            covered.cover(c);
        }
        current = cell;
        order.push(cell);
    }
    order
}

/// Inward rectangular spiral over the region's bounding box with lane
/// spacing `sensor_k`, restricted to region cells; a completeness pass
/// appends extra waypoints so every region cell falls inside some
/// waypoint's footprint.
pub fn spiral_sweep(region: &[Cell], sensor_k: usize, entry: Cell) -> Vec<Cell> {
    if region.is_empty() {
        return vec![];
    }
    let r0 = region.iter().map(|c| c.0).min().unwrap() as i32;
    let r1 = region.iter().map(|c| c.0).max().unwrap() as i32;
    let c0 = region.iter().map(|c| c.1).min().unwrap() as i32;
    let c1 = region.iter().map(|c| c.1).max().unwrap() as i32;
    let radius = (sensor_k as i32 - 1) / 2;
    let half = ((r1 - r0).min(c1 - c0)) / 2;
    let first_offset = radius.min(half);

    let in_region = |cell: (i32, i32)| {
        cell.0 >= 0
            && cell.1 >= 0
            && region.contains(&(cell.0 as usize, cell.1 as usize))
    };

    let mut waypoints: Vec<Cell> = Vec::new();
    let mut offset = first_offset;
    let mut first_ring = true;
    while r0 + offset <= r1 - offset && c0 + offset <= c1 - offset {
        let (top, bottom, left, right) = (r0 + offset, r1 - offset, c0 + offset, c1 - offset);
        let mut ring: Vec<(i32, i32)> = Vec::new();
        for c in left..=right {
            ring.push((top, c));
        }
        for r in top + 1..=bottom {
            ring.push((r, right));
        }
        if bottom > top {
            for c in (left..right).rev() {
                ring.push((bottom, c));
            }
        }
        if right > left {
            for r in (top + 1..bottom).rev() {
                ring.push((r, left));
            }
        }
        let mut ring: Vec<Cell> = ring
            .into_iter()
            .filter(|&c| in_region(c))
            .map(|c| (c.0 as usize, c.1 as usize))
            .collect();
        if first_ring && !ring.is_empty() {
            // rotate the outermost ring to start nearest the entry cell
            let start = ring
                .iter()
                .enumerate()
                .min_by_key(|(_, &c)| (chebyshev(c, entry), c))
                .map(|(i, _)| i)
                .unwrap();
            ring.rotate_left(start);
            first_ring = false;
        }
        waypoints.extend(ring);
        offset += sensor_k as i32;
    }

    // completeness pass: chase down anything the lanes missed
    let grid_hint = region.iter().map(|c| c.0.max(c.1)).max().unwrap() + 1;
    let mut covered: std::collections::HashSet<Cell> = std::collections::HashSet::new();
    for &w in &waypoints {
        covered.extend(sensor_footprint(w, sensor_k, grid_hint));
    }
    loop {
        let last = *waypoints.last().unwrap_or(&entry);
        let missing: Vec<Cell> = region
            .iter()
            .copied()
            .filter(|c| !covered.contains(c))
            .collect();
        if missing.is_empty() {
            break;
        }
        let next = *missing
            .iter()
            .min_by_key(|&&c| (chebyshev(c, last), c))
            .unwrap();
        covered.extend(sensor_footprint(next, sensor_k, grid_hint));
        waypoints.push(next);
    }
    waypoints
}

/// Per-agent ordered waypoints and the executable action sequence.
#[derive(Debug, Clone, Default)]
pub struct CoveragePlan {
    pub waypoints: Vec<Cell>,
    pub actions: Vec<Action>,
    /// Cells traversed, in order, starting at the agent's start cell.
    pub path: Vec<Cell>,
}

fn action_between(from: Cell, to: Cell) -> Action {
    let dr = to.0 as i32 - from.0 as i32;
    let dc = to.1 as i32 - from.1 as i32;
    *Action::ALL
        .iter()
        .find(|a| a.delta() == (dr, dc))
        .expect("cells must be 8-adjacent")
}

/// Plans every agent: Voronoi partition from the start cells, boundary
/// graph, greedy ordering, spiral sweep, BFS glue. Routes stay inside
/// the agent's own partition whenever the target is reachable there
/// (which keeps plans collision-free); they fall back to free-cell
/// routing only for region fragments cut off by obstacles. Waypoints
/// whose footprint adds nothing by plan time are skipped.
pub fn plan_team(world: &World) -> Result<(Vec<CoveragePlan>, VoronoiPartition), PlanError> {
    let terrain = &world.terrain;
    let size = terrain.size();
    let seeds: Vec<Cell> = world.agents.iter().map(|a| a.position).collect();
    let partition = voronoi_partition(terrain, &seeds)?;

    let mut planned_cov = world.coverage.clone();
    let mut plans: Vec<CoveragePlan> = Vec::with_capacity(world.num_agents());

    for agent in &world.agents {
        let k = agent.sensor_k;
        let graph = build_boundary_graph(terrain, &partition, agent.id, k);
        let boundary = greedy_visit_order(&graph, agent.position, terrain, k, &planned_cov);
        let region = partition.region_cells(agent.id);
        let entry = *boundary.last().unwrap_or(&agent.position);
        let spiral = spiral_sweep(&region, k, entry);

        let mut plan = CoveragePlan {
            path: vec![agent.position],
            ..Default::default()
        };
        let mut position = agent.position;
        for target in boundary.into_iter().chain(spiral) {
            if target == position {
                continue;
            }
            let gain = sensor_footprint(target, k, size)
                .iter()
                .any(|&c| !planned_cov.is_covered(c));
            if !gain {
                continue;
            }
            let own = |c: Cell| partition.owner(c) == Some(agent.id);
            let route = bfs_route_where(terrain, position, target, &own)
                .or_else(|| bfs_route_where(terrain, position, target, &|c| terrain.is_free(c)))
                .ok_or(PlanError::NoPath { from: position, to: target })?;
            for pair in route.windows(2) {
                plan.actions.push(action_between(pair[0], pair[1]));
                plan.path.push(pair[1]);
                for c in sensor_footprint(pair[1], k, size) {
                    planned_cov.cover(c);
                }
            }
            plan.waypoints.push(target);
            position = target;
        }
        plans.push(plan);
    }

    // team completeness: some obstacle cells may sit outside every
    // region lane; send the nearest owner to a free cell that sees them
    let all_covered = |cov: &CoverageGrid| (0..size)
        .flat_map(|r| (0..size).map(move |c| (r, c)))
        .all(|c| cov.is_covered(c));
    if !all_covered(&planned_cov) {
        let free = terrain.free_cells();
        let uncovered: Vec<Cell> = (0..size)
            .flat_map(|r| (0..size).map(move |c| (r, c)))
            .filter(|&c| !planned_cov.is_covered(c))
            .collect();
        for cell in uncovered {
            if planned_cov.is_covered(cell) {
                continue;
            }
            // nearest free cell whose footprint reaches it
            let candidate = free
                .iter()
                .copied()
                .filter(|&f| {
                    let k = world.agents[partition.owner(f).unwrap()].sensor_k;
                    chebyshev(f, cell) <= (k - 1) / 2
                })
                .min_by_key(|&f| (chebyshev(f, cell), f));
            let Some(target) = candidate else { continue }; // permanently unseeable
            let owner = partition.owner(target).unwrap();
            let k = world.agents[owner].sensor_k;
            let position = *plans[owner].path.last().unwrap();
            if let Some(route) =
                bfs_route_where(terrain, position, target, &|c| terrain.is_free(c))
            {
                for pair in route.windows(2) {
                    plans[owner].actions.push(action_between(pair[0], pair[1]));
                    plans[owner].path.push(pair[1]);
                    for c in sensor_footprint(pair[1], k, size) {
                        planned_cov.cover(c);
                    }
                }
                plans[owner].waypoints.push(target);
            }
        }
    }

    Ok((plans, partition))
}

/// Plans and executes one full episode open loop, returning the episode
/// log. The world is generated from (seed, config) so the log replays.
pub fn nrl_execute(
    cfg: &crate::io::RunConfig,
    seed: u64,
) -> Result<crate::io::EpisodeLog, crate::eval::EvalError> {
    let mut policy = crate::policy::NrlPolicy::new();
    let (_, log) = crate::eval::run_logged_trial(&mut policy, cfg, seed)?;
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Terrain;

    fn empty_terrain(size: usize) -> TerrainGrid {
        TerrainGrid::filled(size, Terrain::Free)
    }

    #[test]
    fn mirror_symmetric_seeds_split_an_even_grid_evenly() {
        let terrain = empty_terrain(8);
        let partition = voronoi_partition(&terrain, &[(4, 1), (4, 6)]).unwrap();
        let a = partition.region_cells(0).len();
        let b = partition.region_cells(1).len();
        assert_eq!(a, b, "{a} vs {b}");
        assert_eq!(a + b, 64);
    }

    #[test]
    fn single_seed_owns_every_free_cell() {
        let mut terrain = empty_terrain(6);
        terrain.set((2, 2), Terrain::Obstacle);
        let partition = voronoi_partition(&terrain, &[(0, 0)]).unwrap();
        assert_eq!(partition.region_cells(0).len(), 35);
        assert_eq!(partition.owner((2, 2)), None);
    }

    #[test]
    fn assignment_matches_a_brute_force_scan() {
        let terrain = empty_terrain(16);
        let seeds = [(2, 3), (10, 12), (14, 1)];
        let partition = voronoi_partition(&terrain, &seeds).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                let want = seeds
                    .iter()
                    .enumerate()
                    .map(|(id, &s)| (chebyshev((r, c), s), euclid_sq((r, c), s), id))
                    .min()
                    .map(|(_, _, id)| id);
                assert_eq!(partition.owner((r, c)), want);
            }
        }
    }

    #[test]
    fn duplicate_seeds_are_rejected() {
        let terrain = empty_terrain(6);
        assert!(matches!(
            voronoi_partition(&terrain, &[(1, 1), (1, 1)]),
            Err(PlanError::DuplicateSeed(1, 1))
        ));
    }

    #[test]
    fn trivial_bfs_cases() {
        let terrain = empty_terrain(8);
        assert_eq!(bfs_route(&terrain, (3, 3), (3, 3)).unwrap(), vec![(3, 3)]);
        // straight corridor of length 5: path visits 5 cells
        let path = bfs_route(&terrain, (2, 1), (2, 5)).unwrap();
        assert_eq!(path.len(), 5);
    }

    #[test]
    fn bfs_length_matches_an_independent_dijkstra() {
        use std::collections::BinaryHeap;
        let mut terrain = empty_terrain(10);
        // scatter deterministic obstacles
        for i in 0..18 {
            let cell = ((i * 7 + 3) % 10, (i * 13 + 1) % 10);
            if cell != (0, 0) && cell != (9, 9) {
                terrain.set(cell, Terrain::Obstacle);
            }
        }
        if !terrain.free_connected() {
            return; // fixture must stay connected for the comparison
        }
        let path = bfs_route(&terrain, (0, 0), (9, 9)).unwrap();
        // oracle: uniform-cost search with a different expansion scheme
        let mut dist = vec![u32::MAX; 100];
        let mut heap = BinaryHeap::new();
        dist[0] = 0;
        heap.push(std::cmp::Reverse((0u32, (0usize, 0usize))));
        while let Some(std::cmp::Reverse((d, cell))) = heap.pop() {
            if d > dist[cell.0 * 10 + cell.1] {
                continue;
            }
            for n in terrain.free_neighbors(cell) {
                if d + 1 < dist[n.0 * 10 + n.1] {
                    dist[n.0 * 10 + n.1] = d + 1;
                    heap.push(std::cmp::Reverse((d + 1, n)));
                }
            }
        }
        assert_eq!(path.len() as u32 - 1, dist[99]);
    }

    #[test]
    fn unreachable_targets_error() {
        let mut terrain = empty_terrain(5);
        for r in 0..5 {
            terrain.set((r, 2), Terrain::Obstacle);
        }
        assert!(matches!(
            bfs_route(&terrain, (0, 0), (0, 4)),
            Err(PlanError::NoPath { .. })
        ));
    }

    #[test]
    fn single_cell_region_graph_is_that_cell() {
        let terrain = empty_terrain(9);
        // seed 1 sits in a corner fully surrounded by seed 0's territory
        let partition = voronoi_partition(&terrain, &[(4, 4), (0, 0)]).unwrap();
        let lone = VoronoiPartition {
            size: 9,
            assignment: {
                let mut a = partition.assignment.clone();
                for v in a.iter_mut() {
                    *v = Some(0);
                }
                a[0] = Some(1);
                a
            },
            seeds: partition.seeds.clone(),
        };
        let graph = build_boundary_graph(&terrain, &lone, 1, 5);
        assert_eq!(graph.waypoints, vec![(0, 0)]);
    }

    #[test]
    fn rectangle_waypoint_count_tracks_perimeter_over_k() {
        let terrain = empty_terrain(12);
        let partition = voronoi_partition(&terrain, &[(5, 5)]).unwrap();
        let k = 3;
        let graph = build_boundary_graph(&terrain, &partition, 0, k);
        let perimeter = 4 * 12 - 4;
        let expected = perimeter as f64 / k as f64 + 1.0;
        let count = graph.waypoints.len() as f64;
        assert!(
            (count - expected).abs() <= 4.0,
            "count {count} vs expected {expected}"
        );
    }

    #[test]
    fn obstacle_split_region_still_yields_a_connected_graph() {
        let mut terrain = empty_terrain(9);
        // a wall with one gap splits the region visually but the free
        // cells stay connected
        for c in 0..8 {
            terrain.set((4, c), Terrain::Obstacle);
        }
        assert!(terrain.free_connected());
        let partition = voronoi_partition(&terrain, &[(0, 0)]).unwrap();
        let graph = build_boundary_graph(&terrain, &partition, 0, 3);
        for row in &graph.dist {
            assert!(row.iter().all(|d| d.is_some()), "graph is disconnected");
        }
    }

    #[test]
    fn greedy_prefers_bigger_gains_then_proximity() {
        let terrain = empty_terrain(16);
        let graph = WaypointGraph {
            waypoints: vec![(2, 2), (2, 13), (13, 13)],
            dist: vec![],
        };
        // pre-cover most of (2,2)'s footprint so (2,13) wins on gain
        let mut cov = CoverageGrid::empty(16);
        for c in sensor_footprint((2, 2), 5, 16) {
            cov.cover(c);
        }
        let order = greedy_visit_order(&graph, (2, 2), &terrain, 5, &cov);
        assert_eq!(order[0], (2, 13));
        // equal disjoint gains resolve nearest-first
        let order = greedy_visit_order(&graph, (2, 2), &terrain, 5, &CoverageGrid::empty(16));
        assert_eq!(order, vec![(2, 2), (2, 13), (13, 13)]);
    }

    #[test]
    fn greedy_matches_a_step_by_step_recomputation() {
        let terrain = empty_terrain(14);
        let waypoints: Vec<Cell> = (0..10).map(|i| ((i * 5 + 2) % 14, (i * 3 + 7) % 14)).collect();
        let graph = WaypointGraph { waypoints: waypoints.clone(), dist: vec![] };
        let start = (7, 7);
        let k = 3;
        let order = greedy_visit_order(&graph, start, &terrain, k, &CoverageGrid::empty(14));

        // oracle: literal re-simulation of the rule
        let mut covered = CoverageGrid::empty(14);
        let mut current = start;
        let mut remaining = waypoints;
        let mut expected = Vec::new();
        while !remaining.is_empty() {
            let mut scored: Vec<(usize, u32, usize, Cell)> = remaining
                .iter()
                .map(|&w| {
                    let gain = sensor_footprint(w, k, 14)
                        .iter()
                        .filter(|&&c| !covered.is_covered(c))
                        .count();
                    let dist = bfs_route(&terrain, current, w).unwrap().len() as u32 - 1;
                    (gain, dist, w.0 * 14 + w.1, w)
                })
                .collect();
            scored.sort_by_key(|&(gain, dist, idx, _)| {
                (std::cmp::Reverse(gain), dist, idx)
            });
            let (_, _, _, w) = scored[0];
            expected.push(w);
            remaining.retain(|&c| c != w);
            for c in sensor_footprint(w, k, 14) {
                covered.cover(c);
            }
            current = w;
        }
        assert_eq!(order, expected);
    }

    #[test]
    fn spiral_with_unit_sensor_visits_every_cell_exactly_once() {
        let region: Vec<Cell> = (2..7).flat_map(|r| (3..9).map(move |c| (r, c))).collect();
        let waypoints = spiral_sweep(&region, 1, (2, 3));
        assert_eq!(waypoints.len(), region.len());
        let unique: std::collections::HashSet<_> = waypoints.iter().collect();
        assert_eq!(unique.len(), region.len());
        for w in &waypoints {
            assert!(region.contains(w));
        }
    }

    #[test]
    fn spiral_over_one_footprint_is_a_single_waypoint() {
        let region: Vec<Cell> = (4..7).flat_map(|r| (4..7).map(move |c| (r, c))).collect();
        let waypoints = spiral_sweep(&region, 3, (4, 4));
        assert_eq!(waypoints, vec![(5, 5)]);
    }

    #[test]
    fn spiral_footprints_cover_the_whole_region() {
        for (seed, k) in [(3usize, 3usize), (5, 5), (9, 7)] {
            // an irregular region: a square with a bite taken out
            let region: Vec<Cell> = (0..11)
                .flat_map(|r| (0..11).map(move |c| (r, c)))
                .filter(|&(r, c)| !(r < seed && c < seed))
                .collect();
            let waypoints = spiral_sweep(&region, k, (10, 10));
            let mut covered = std::collections::HashSet::new();
            for &w in &waypoints {
                covered.extend(sensor_footprint(w, k, 11));
            }
            for cell in &region {
                assert!(covered.contains(cell), "missed {cell:?} at k={k}");
            }
        }
    }
}
