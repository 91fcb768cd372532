//! Warehouse grid construction, validation and undirected distances.
//!
//! A generated warehouse is a lattice of 3×3 blocks with a bin at the
//! centre of each block, surrounded by a one-cell border on which the pickup
//! stations sit. Bins are never traversable: robots deliver from one of the
//! four orthogonal neighbours of a bin (its *access cells*).

mod distance;
mod distribution;
mod map;
mod text;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use distance::{bfs_from, find_bridges, UNREACHABLE};
pub use distribution::TypeDistribution;
pub use map::{generate_map, StationPlacement, WarehouseMap};
pub use text::{load_map, save_map};

/// A grid coordinate. Ordering is lexicographic on `(row, col)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    #[inline]
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    /// Manhattan distance.
    pub fn manhattan(self, other: Cell) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }

    /// Chebyshev distance, i.e. the radius of the smallest square window
    /// centred on `self` that contains `other`.
    pub fn chebyshev(self, other: Cell) -> usize {
        self.row.abs_diff(other.row).max(self.col.abs_diff(other.col))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

impl From<(usize, usize)> for Cell {
    fn from((row, col): (usize, usize)) -> Self {
        Cell { row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    Free,
    Bin,
    Station,
}

impl CellKind {
    #[inline]
    pub fn is_traversable(self) -> bool {
        !matches!(self, CellKind::Bin)
    }
}

/// Compass direction of a single grid move. North is decreasing row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    North,
    South,
    East,
    West,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::North, Dir::South, Dir::East, Dir::West];

    #[inline]
    pub const fn bit(self) -> u8 {
        match self {
            Dir::North => 1,
            Dir::South => 2,
            Dir::East => 4,
            Dir::West => 8,
        }
    }

    pub const fn opposite(self) -> Dir {
        match self {
            Dir::North => Dir::South,
            Dir::South => Dir::North,
            Dir::East => Dir::West,
            Dir::West => Dir::East,
        }
    }

    /// Direction of the unit move `from -> to`, if the cells are orthogonally adjacent.
    pub fn between(from: Cell, to: Cell) -> Option<Dir> {
        match (
            to.row as isize - from.row as isize,
            to.col as isize - from.col as isize,
        ) {
            (-1, 0) => Some(Dir::North),
            (1, 0) => Some(Dir::South),
            (0, 1) => Some(Dir::East),
            (0, -1) => Some(Dir::West),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("map invariant violated: {0}")]
    Invariant(String),
    #[error("cell {0} is outside the map")]
    OutOfBounds(Cell),
    #[error("invalid type distribution: {0}")]
    Distribution(String),
}
