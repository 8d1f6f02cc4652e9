//! Terrain and coverage grids plus the k×k sensor footprint.

use serde::{Deserialize, Serialize};

/// (row, col) cell coordinate.
pub type Cell = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terrain {
    Free,
    Obstacle,
}

/// Square obstacle map. Generation guarantees the Free cells form one
/// 8-connected component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerrainGrid {
    size: usize,
    cells: Vec<Terrain>,
}

impl TerrainGrid {
    pub fn filled(size: usize, terrain: Terrain) -> Self {
        TerrainGrid {
            size,
            cells: vec![terrain; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn at(&self, cell: Cell) -> Terrain {
        self.cells[cell.0 * self.size + cell.1]
    }

    pub fn set(&mut self, cell: Cell, t: Terrain) {
        self.cells[cell.0 * self.size + cell.1] = t;
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.at(cell) == Terrain::Free
    }

    pub fn in_bounds(&self, row: i32, col: i32) -> bool {
        row >= 0 && col >= 0 && (row as usize) < self.size && (col as usize) < self.size
    }

    pub fn obstacle_count(&self) -> usize {
        self.cells.iter().filter(|&&t| t == Terrain::Obstacle).count()
    }

    pub fn free_cells(&self) -> Vec<Cell> {
        (0..self.size)
            .flat_map(|r| (0..self.size).map(move |c| (r, c)))
            .filter(|&cell| self.is_free(cell))
            .collect()
    }

    /// 8-connected free neighbours of a cell.
    pub fn free_neighbors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        const OFFS: [(i32, i32); 8] = [
            (-1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
            (1, 0),
            (1, -1),
            (0, -1),
            (-1, -1),
        ];
        OFFS.iter().filter_map(move |&(dr, dc)| {
            let (r, c) = (cell.0 as i32 + dr, cell.1 as i32 + dc);
            if self.in_bounds(r, c) && self.is_free((r as usize, c as usize)) {
                Some((r as usize, c as usize))
            } else {
                None
            }
        })
    }

    /// True when the Free cells form a single 8-connected component
    /// (vacuously true when there are none).
    pub fn free_connected(&self) -> bool {
        let free = self.free_cells();
        let Some(&start) = free.first() else {
            return true;
        };
        let mut seen = vec![false; self.size * self.size];
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start.0 * self.size + start.1] = true;
        let mut reached = 0usize;
        while let Some(cell) = queue.pop_front() {
            reached += 1;
            for n in self.free_neighbors(cell) {
                let idx = n.0 * self.size + n.1;
                if !seen[idx] {
                    seen[idx] = true;
                    queue.push_back(n);
                }
            }
        }
        reached == free.len()
    }
}

/// Boolean visited map; covered count only grows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageGrid {
    size: usize,
    covered: Vec<bool>,
    count: usize,
}

impl CoverageGrid {
    pub fn empty(size: usize) -> Self {
        CoverageGrid {
            size,
            covered: vec![false; size * size],
            count: 0,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_covered(&self, cell: Cell) -> bool {
        self.covered[cell.0 * self.size + cell.1]
    }

    /// Marks a cell covered; returns true when it was newly covered.
    pub fn cover(&mut self, cell: Cell) -> bool {
        let idx = cell.0 * self.size + cell.1;
        if self.covered[idx] {
            false
        } else {
            self.covered[idx] = true;
            self.count += 1;
            true
        }
    }

    pub fn covered_count(&self) -> usize {
        self.count
    }

    pub fn fraction(&self) -> f64 {
        self.count as f64 / (self.size * self.size) as f64
    }

    pub fn is_complete(&self) -> bool {
        self.count == self.size * self.size
    }

    pub fn is_superset_of(&self, other: &CoverageGrid) -> bool {
        self.size == other.size
            && self
                .covered
                .iter()
                .zip(&other.covered)
                .all(|(&a, &b)| a || !b)
    }

    /// First cell covered in `other` but not here, if any.
    pub fn missing_from(&self, other: &CoverageGrid) -> Option<Cell> {
        (0..self.size)
            .flat_map(|r| (0..self.size).map(move |c| (r, c)))
            .find(|&cell| other.is_covered(cell) && !self.is_covered(cell))
    }
}

/// All in-bounds cells within Chebyshev radius (k-1)/2 of `position`.
/// The footprint clips at grid edges and sees over obstacles.
pub fn sensor_footprint(position: Cell, k: usize, grid_size: usize) -> Vec<Cell> {
    debug_assert!(k % 2 == 1, "sensor size must be odd");
    let radius = (k as i32 - 1) / 2;
    let (pr, pc) = (position.0 as i32, position.1 as i32);
    let mut cells = Vec::with_capacity(k * k);
    for r in (pr - radius).max(0)..=(pr + radius).min(grid_size as i32 - 1) {
        for c in (pc - radius).max(0)..=(pc + radius).min(grid_size as i32 - 1) {
            cells.push((r as usize, c as usize));
        }
    }
    cells
}
