//! The nine-valued action set: eight compass moves plus no-move.

use serde::{Deserialize, Serialize};

/// One agent action. Compass actions displace by one cell (rows grow
/// southward); `NoMove` stays put.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    North,
    NorthEast,
    East,
    SouthEast,
    South,
    SouthWest,
    West,
    NorthWest,
    NoMove,
}

/// Compass ring in clockwise order; index i's wind neighbours are i±1 mod 8.
const RING: [Action; 8] = [
    Action::North,
    Action::NorthEast,
    Action::East,
    Action::SouthEast,
    Action::South,
    Action::SouthWest,
    Action::West,
    Action::NorthWest,
];

impl Action {
    pub const COUNT: usize = 9;

    pub const ALL: [Action; 9] = [
        Action::North,
        Action::NorthEast,
        Action::East,
        Action::SouthEast,
        Action::South,
        Action::SouthWest,
        Action::West,
        Action::NorthWest,
        Action::NoMove,
    ];

    /// (row, col) displacement in {-1, 0, 1}².
    pub fn delta(self) -> (i32, i32) {
        match self {
            Action::North => (-1, 0),
            Action::NorthEast => (-1, 1),
            Action::East => (0, 1),
            Action::SouthEast => (1, 1),
            Action::South => (1, 0),
            Action::SouthWest => (1, -1),
            Action::West => (0, -1),
            Action::NorthWest => (-1, -1),
            Action::NoMove => (0, 0),
        }
    }

    /// Stable index used for one-hot encodings and policy heads; NoMove is 8.
    pub fn index(self) -> usize {
        Action::ALL.iter().position(|&a| a == self).unwrap()
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }

    pub fn is_move(self) -> bool {
        self != Action::NoMove
    }

    /// The two adjacent compass actions (e.g. North -> NorthWest, NorthEast).
    /// NoMove has no ring neighbours.
    pub fn ring_neighbors(self) -> Option<(Action, Action)> {
        let i = RING.iter().position(|&a| a == self)?;
        Some((RING[(i + 7) % 8], RING[(i + 1) % 8]))
    }

    /// Short token used in episode logs.
    pub fn token(self) -> &'static str {
        match self {
            Action::North => "N",
            Action::NorthEast => "NE",
            Action::East => "E",
            Action::SouthEast => "SE",
            Action::South => "S",
            Action::SouthWest => "SW",
            Action::West => "W",
            Action::NorthWest => "NW",
            Action::NoMove => "NM",
        }
    }

    pub fn from_token(s: &str) -> Option<Action> {
        Action::ALL.iter().copied().find(|a| a.token() == s)
    }
}
