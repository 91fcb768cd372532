//! Decentralized prioritized recursive yielding.
//!
//! Each timestep every robot is marked either to move one vertex along its
//! path or to wait:
//!
//! 1. Robots in a directed cycle of robots, each heading into the cell of
//!    the next, all move. The cycle is found by passing a token along
//!    "next vertex -> its occupant" links; a robot that gets its own token
//!    back is in a cycle.
//! 2. Otherwise a robot first settles the occupant of its next vertex. If
//!    the occupant waits, so does the robot.
//! 3. Robots competing for the same vertex compare priority: a robot still
//!    carrying a parcel first, then the one with more steps to go, then a
//!    coin flip. The loser waits.
//!
//! Every lookup a decision makes stays inside the robot's 3×3 window on
//! street-oriented maps: the next vertex is adjacent, and a competitor for
//! it arrives along the other axis, so it sits diagonally.
//!
//! Moves are applied simultaneously once every robot is marked.

mod paths;

use std::cmp::Ordering;
use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridworld::Cell;
use crate::roadnet::RoadNetwork;

pub use paths::{plan_path, ReservationTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("goal {goal} is not reachable from {from}")]
    Unreachable { from: Cell, goal: Cell },
    #[error("goal {0} has no cached distance table")]
    UnknownGoal(Cell),
    #[error("invalid focal bound {0}; it must be at least 1")]
    BadFocalBound(f64),
}

/// How initial paths are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PlannerMode {
    /// One fixed shortest path, preferring the lexicographically smallest
    /// successor at every step.
    Plain,
    /// A shortest path drawn uniformly at random.
    Diversified,
    /// Fewest conflicts with announced paths among paths no longer than
    /// `w` times the shortest.
    Focal { w: f64 },
}

impl PlannerMode {
    pub const DEFAULT_FOCAL_W: f64 = 1.5;

    /// `pry`, `epry-random`, `epry-focal`.
    pub fn name(&self) -> &'static str {
        match self {
            PlannerMode::Plain => "pry",
            PlannerMode::Diversified => "epry-random",
            PlannerMode::Focal { .. } => "epry-focal",
        }
    }

    pub fn from_name(name: &str, focal_w: f64) -> Option<Self> {
        match name {
            "pry" => Some(PlannerMode::Plain),
            "epry-random" => Some(PlannerMode::Diversified),
            "epry-focal" => Some(PlannerMode::Focal { w: focal_w }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    Unmarked,
    MoveForward,
    Wait,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub id: usize,
    pub position: Cell,
    /// Type of the parcel on board; `None` once delivered.
    pub carried: Option<usize>,
    pub goal: Cell,
    /// Upcoming vertices, excluding `position`.
    pub path: VecDeque<Cell>,
    pub decision: Decision,
}

impl RobotState {
    pub fn new(id: usize, position: Cell) -> Self {
        RobotState {
            id,
            position,
            carried: None,
            goal: position,
            path: VecDeque::new(),
            decision: Decision::Unmarked,
        }
    }

    #[inline]
    pub fn next_vertex(&self) -> Option<Cell> {
        self.path.front().copied()
    }

    #[inline]
    pub fn is_carrying(&self) -> bool {
        self.carried.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepOutcome {
    /// `(robot index, cell entered)`.
    pub moves: Vec<(usize, Cell)>,
    pub waits: Vec<usize>,
    /// Robots that moved as part of a detected cycle.
    pub cycle_robots: usize,
    pub cycles_detected: usize,
    /// Contested vertices settled by priority.
    pub conflicts_resolved: usize,
}

/// Whether `a` goes before `b` for a contested vertex.
pub fn resolve_priority(a: &RobotState, b: &RobotState, rng: &mut impl Rng) -> bool {
    match a
        .is_carrying()
        .cmp(&b.is_carrying())
        .then(a.path.len().cmp(&b.path.len()))
    {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => rng.random_bool(0.5),
    }
}

const NONE: u32 = u32::MAX;

/// Robot index at every cell index, or `u32::MAX`.
fn occupancy(robots: &[RobotState], net: &RoadNetwork) -> Vec<u32> {
    let map = net.map();
    let mut occ = vec![NONE; map.len()];
    for (r, robot) in robots.iter().enumerate() {
        let slot = &mut occ[map.index(robot.position)];
        assert_eq!(*slot, NONE, "two robots share {}", robot.position);
        *slot = r as u32;
    }
    occ
}

/// For every robot, whether it belongs to a cycle of robots each heading
/// into the next one's cell.
pub fn detect_cycles(robots: &[RobotState], net: &RoadNetwork) -> Vec<bool> {
    let occ = occupancy(robots, net);
    cycles_with(robots, net, &occ).0
}

/// Cycle membership and the number of distinct cycles.
fn cycles_with(robots: &[RobotState], net: &RoadNetwork, occ: &[u32]) -> (Vec<bool>, usize) {
    let map = net.map();
    let link = |r: usize| -> Option<usize> {
        let next = robots[r].next_vertex()?;
        let o = occ[map.index(next)];
        (o != NONE).then_some(o as usize)
    };
    // 0 = unvisited, 1 = on the current token route, 2 = settled.
    let mut state = vec![0u8; robots.len()];
    let mut in_cycle = vec![false; robots.len()];
    let mut cycles = 0;
    for start in 0..robots.len() {
        let mut route = Vec::new();
        let mut r = start;
        loop {
            match state[r] {
                1 => {
                    let pos = route.iter().position(|&x| x == r).expect("token came back");
                    cycles += 1;
                    for &x in &route[pos..] {
                        in_cycle[x] = true;
                    }
                    break;
                }
                2 => break,
                _ => {}
            }
            state[r] = 1;
            route.push(r);
            match link(r) {
                Some(n) => r = n,
                None => break,
            }
        }
        for x in route {
            state[x] = 2;
        }
    }
    (in_cycle, cycles)
}

struct StepContext<'a, R: Rng> {
    robots: &'a mut [RobotState],
    net: &'a RoadNetwork,
    occ: Vec<u32>,
    rng: &'a mut R,
    in_progress: Vec<bool>,
    conflicts: usize,
}

impl<R: Rng> StepContext<'_, R> {
    fn occupant(&self, cell: Cell) -> Option<usize> {
        let o = self.occ[self.net.map().index(cell)];
        (o != NONE).then_some(o as usize)
    }

    /// Other robots whose next vertex is `v`.
    fn claimants(&self, v: Cell, me: usize) -> Vec<usize> {
        self.net
            .predecessors(v)
            .filter_map(|c| self.occupant(c))
            .filter(|&r| r != me && self.robots[r].next_vertex() == Some(v))
            .collect()
    }

    fn recursive_move(&mut self, i: usize) {
        if self.robots[i].decision != Decision::Unmarked {
            return;
        }
        let Some(next) = self.robots[i].next_vertex() else {
            self.robots[i].decision = Decision::Wait;
            return;
        };
        // Any loop through the occupant links was marked up front.
        assert!(!self.in_progress[i], "occupant chain revisits robot {i}");
        self.in_progress[i] = true;

        if let Some(j) = self.occupant(next) {
            self.recursive_move(j);
            if self.robots[j].decision == Decision::Wait {
                self.robots[i].decision = Decision::Wait;
                self.in_progress[i] = false;
                return;
            }
        }

        let rivals = self.claimants(next, i);
        if rivals
            .iter()
            .any(|&k| self.robots[k].decision == Decision::MoveForward)
        {
            self.robots[i].decision = Decision::Wait;
        } else if rivals.is_empty() {
            self.robots[i].decision = Decision::MoveForward;
        } else {
            self.conflicts += 1;
            let mut winner = i;
            for &k in &rivals {
                if self.robots[k].decision == Decision::Unmarked
                    && resolve_priority(&self.robots[k], &self.robots[winner], self.rng)
                {
                    winner = k;
                }
            }
            for &r in rivals.iter().chain(std::iter::once(&i)) {
                self.robots[r].decision = if r == winner {
                    Decision::MoveForward
                } else {
                    Decision::Wait
                };
            }
        }
        self.in_progress[i] = false;
    }
}

/// Result of marking one timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct Marking {
    pub decisions: Vec<Decision>,
    pub in_cycle: Vec<bool>,
    pub cycles: usize,
    pub conflicts: usize,
}

/// Marks every robot without moving anyone.
pub fn mark_all(robots: &mut [RobotState], net: &RoadNetwork, rng: &mut impl Rng) -> Marking {
    for r in robots.iter_mut() {
        r.decision = Decision::Unmarked;
    }
    let occ = occupancy(robots, net);
    let (in_cycle, cycles) = cycles_with(robots, net, &occ);
    for (r, &c) in robots.iter_mut().zip(&in_cycle) {
        if c {
            r.decision = Decision::MoveForward;
        }
    }
    let n = robots.len();
    let mut ctx = StepContext {
        robots,
        net,
        occ,
        rng,
        in_progress: vec![false; n],
        conflicts: 0,
    };
    for i in 0..n {
        ctx.recursive_move(i);
    }
    let conflicts = ctx.conflicts;
    Marking {
        decisions: robots.iter().map(|r| r.decision).collect(),
        in_cycle,
        cycles,
        conflicts,
    }
}

/// One synchronous timestep: mark every robot, then advance the movers.
pub fn step(robots: &mut [RobotState], net: &RoadNetwork, rng: &mut impl Rng) -> StepOutcome {
    let marking = mark_all(robots, net, rng);
    let mut out = StepOutcome {
        cycles_detected: marking.cycles,
        conflicts_resolved: marking.conflicts,
        ..StepOutcome::default()
    };
    for (i, d) in marking.decisions.iter().enumerate() {
        match d {
            Decision::MoveForward => {
                let r = &mut robots[i];
                let next = r.path.pop_front().expect("movers have a next vertex");
                debug_assert!(net.allows_move(r.position, next));
                r.position = next;
                out.moves.push((i, next));
                if marking.in_cycle[i] {
                    out.cycle_robots += 1;
                }
            }
            _ => out.waits.push(i),
        }
    }
    out
}
