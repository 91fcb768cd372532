//! Directed road network over a warehouse grid.
//!
//! Horizontal streets (rows without bins) alternate east/west from the top
//! border down; vertical streets (columns without bins) alternate north/south
//! from the left border across. The left border column runs north so that
//! the outer ring circulates clockwise together with the top row running
//! east. The short connector segments inside bin rows all point west and
//! those inside bin columns all point south. Every traversable adjacency
//! therefore carries exactly one direction and head-on encounters cannot
//! happen.
//!
//! On generated maps the directed distance exceeds the undirected one by at
//! most [`STREET_DETOUR_BOUND`]. The worst pairs are one-step moves against
//! a border lane. A grid is bipartite, so the detour is always even.
//!
//! Maps that do not follow the block layout may fail the strong connectivity
//! check under this rule; [`orient`] then falls back to a depth-first
//! (Robbins) orientation, which carries no detour guarantee.

mod orient;

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::gridworld::{Cell, CellKind, Dir, WarehouseMap, UNREACHABLE};

pub use orient::{orient, orient_depth_first, orient_streets};

/// Largest detour the street orientation adds over undirected distance on
/// generated maps.
pub const STREET_DETOUR_BOUND: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoadError {
    #[error("orientation is not strongly connected: {0} cannot reach every cell")]
    NotStronglyConnected(Cell),
    #[error("cell {0} is not traversable")]
    NotTraversable(Cell),
    #[error("cell {0} is outside the map")]
    OutOfBounds(Cell),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationKind {
    /// Alternating streets; [`STREET_DETOUR_BOUND`] holds on generated maps.
    Streets,
    /// Depth-first strong orientation; no detour guarantee.
    DepthFirst,
}

/// A strongly connected orientation of a warehouse grid together with
/// goal-directed distance tables for every station and bin access cell.
#[derive(Debug)]
pub struct RoadNetwork {
    map: Arc<WarehouseMap>,
    allowed: Vec<u8>,
    kind: OrientationKind,
    /// Cell index -> slot into `to_tables`, or `u32::MAX`.
    goal_slot: Vec<u32>,
    goal_cells: Vec<Cell>,
    /// `to_tables[s][idx]`: directed distance from cell `idx` to goal cell `goal_cells[s]`.
    to_tables: Vec<Vec<u32>>,
    diameter: u32,
}

impl RoadNetwork {
    pub(crate) fn build(map: Arc<WarehouseMap>, allowed: Vec<u8>, kind: OrientationKind) -> Result<Self, RoadError> {
        let mut net = RoadNetwork {
            map,
            allowed,
            kind,
            goal_slot: Vec::new(),
            goal_cells: Vec::new(),
            to_tables: Vec::new(),
            diameter: 0,
        };
        net.check_strongly_connected()?;

        let map = &net.map;
        let mut goals: Vec<Cell> = map.stations().to_vec();
        for b in 0..map.bins().len() {
            goals.extend(map.access_cells(b));
        }
        goals.sort();
        goals.dedup();
        let mut goal_slot = vec![u32::MAX; map.len()];
        for (s, g) in goals.iter().enumerate() {
            goal_slot[map.index(*g)] = s as u32;
        }
        let to_tables: Vec<Vec<u32>> = goals.par_iter().map(|&g| net.bfs_to(g)).collect();
        let cells: Vec<Cell> = map.traversable_cells().collect();
        let diameter = cells
            .par_iter()
            .map(|&c| {
                let t = net.bfs_from(c);
                cells.iter().map(|x| t[map.index(*x)]).max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0);
        net.goal_slot = goal_slot;
        net.goal_cells = goals;
        net.to_tables = to_tables;
        net.diameter = diameter;
        Ok(net)
    }

    fn check_strongly_connected(&self) -> Result<(), RoadError> {
        let map = &self.map;
        let Some(root) = map.traversable_cells().next() else {
            return Ok(());
        };
        let fwd = self.bfs_from(root);
        let bwd = self.bfs_to(root);
        for c in map.traversable_cells() {
            let i = map.index(c);
            if fwd[i] == UNREACHABLE {
                return Err(RoadError::NotStronglyConnected(root));
            }
            if bwd[i] == UNREACHABLE {
                return Err(RoadError::NotStronglyConnected(c));
            }
        }
        Ok(())
    }

    pub fn map(&self) -> &Arc<WarehouseMap> {
        &self.map
    }

    pub fn kind(&self) -> OrientationKind {
        self.kind
    }

    /// Whether [`STREET_DETOUR_BOUND`] is guaranteed for this orientation.
    pub fn detour_bound_guaranteed(&self) -> bool {
        self.kind == OrientationKind::Streets
    }

    /// Longest directed distance between two traversable cells.
    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    #[inline]
    pub fn allows(&self, from: Cell, dir: Dir) -> bool {
        self.allowed[self.map.index(from)] & dir.bit() != 0
    }

    /// Whether the single move `from -> to` is permitted.
    #[inline]
    pub fn allows_move(&self, from: Cell, to: Cell) -> bool {
        Dir::between(from, to).is_some_and(|d| self.allows(from, d))
    }

    /// Permitted successor cells of `cell`, in lexicographic order.
    pub fn successors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        let Cell { row, col } = cell;
        [
            (row.wrapping_sub(1), col, Dir::North),
            (row, col.wrapping_sub(1), Dir::West),
            (row, col + 1, Dir::East),
            (row + 1, col, Dir::South),
        ]
        .into_iter()
        .filter(move |&(_, _, d)| self.allows(cell, d))
        .map(|(r, c, _)| Cell::new(r, c))
    }

    /// Cells with a permitted move into `cell`.
    pub fn predecessors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        self.map
            .open_neighbors(cell)
            .filter(move |&n| self.allows_move(n, cell))
    }

    /// Goal cells (stations and bin access cells) with cached tables.
    pub fn goal_cells(&self) -> &[Cell] {
        &self.goal_cells
    }

    /// Cached table of directed distances from every cell to `goal`, if
    /// `goal` is a station or a bin access cell.
    pub fn table_to(&self, goal: Cell) -> Option<&[u32]> {
        if !self.map.contains(goal) {
            return None;
        }
        let slot = self.goal_slot[self.map.index(goal)];
        (slot != u32::MAX).then(|| self.to_tables[slot as usize].as_slice())
    }

    /// Shortest directed path length from `from` to `to`.
    ///
    /// A bin target is reached through its best directed-reachable access
    /// cell plus one step. `Ok(None)` means unreachable, which cannot happen
    /// between traversable cells of a valid network.
    pub fn directed_distance(&self, from: Cell, to: Cell) -> Result<Option<u32>, RoadError> {
        for c in [from, to] {
            if !self.map.contains(c) {
                return Err(RoadError::OutOfBounds(c));
            }
        }
        if !self.map.is_traversable(from) {
            return Err(RoadError::NotTraversable(from));
        }
        if from == to {
            return Ok(Some(0));
        }
        let d = if self.map.kind(to) == CellKind::Bin {
            self.map
                .open_neighbors(to)
                .map(|a| self.raw_distance(from, a))
                .filter(|&d| d != UNREACHABLE)
                .min()
                .map_or(UNREACHABLE, |d| d + 1)
        } else {
            self.raw_distance(from, to)
        };
        Ok((d != UNREACHABLE).then_some(d))
    }

    fn raw_distance(&self, from: Cell, to: Cell) -> u32 {
        match self.table_to(to) {
            Some(t) => t[self.map.index(from)],
            None => self.bfs_from(from)[self.map.index(to)],
        }
    }

    /// Directed distances from `source` to every cell.
    pub fn bfs_from(&self, source: Cell) -> Vec<u32> {
        self.bfs(source, true)
    }

    /// Directed distances from every cell to `target`.
    pub fn bfs_to(&self, target: Cell) -> Vec<u32> {
        self.bfs(target, false)
    }

    fn bfs(&self, root: Cell, forward: bool) -> Vec<u32> {
        let map = &self.map;
        let mut dist = vec![UNREACHABLE; map.len()];
        if !map.is_traversable(root) {
            return dist;
        }
        dist[map.index(root)] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(cell) = queue.pop_front() {
            let next = dist[map.index(cell)] + 1;
            for n in map.open_neighbors(cell) {
                let ok = if forward {
                    self.allows_move(cell, n)
                } else {
                    self.allows_move(n, cell)
                };
                if ok && dist[map.index(n)] == UNREACHABLE {
                    dist[map.index(n)] = next;
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    /// Text rendering of the orientation: a horizontal layer (`>`/`<`) and a
    /// vertical layer (`^`/`v`), with `B` for bins, `S` for stations and `.`
    /// where a cell has no permitted move in that axis.
    pub fn dump_arrows(&self) -> String {
        let map = &self.map;
        let mut out = String::new();
        for (title, dirs) in [
            ("horizontal", [(Dir::East, '>'), (Dir::West, '<')]),
            ("vertical", [(Dir::North, '^'), (Dir::South, 'v')]),
        ] {
            out.push_str(title);
            out.push('\n');
            for r in 0..map.rows() {
                for c in 0..map.cols() {
                    let cell = Cell::new(r, c);
                    out.push(match map.kind(cell) {
                        CellKind::Bin => 'B',
                        CellKind::Station => 'S',
                        CellKind::Free => dirs
                            .iter()
                            .find(|(d, _)| self.allows(cell, *d))
                            .map_or('.', |(_, ch)| *ch),
                    });
                }
                out.push('\n');
            }
        }
        out
    }
}
