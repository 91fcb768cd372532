use std::borrow::Cow;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use rand::Rng;

use super::{PlanError, PlannerMode, RobotState};
use crate::gridworld::{Cell, UNREACHABLE};
use crate::roadnet::RoadNetwork;

/// Announced robot positions indexed by `(cell, steps from now)`.
#[derive(Debug, Clone, Default)]
pub struct ReservationTable {
    counts: HashMap<(u32, u32), u32>,
}

impl ReservationTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Announces every robot's remaining path.
    pub fn from_robots(robots: &[RobotState], net: &RoadNetwork) -> Self {
        let mut t = Self::new();
        for r in robots {
            t.add_path(&r.path, net);
        }
        t
    }

    /// `path[s]` is announced at time `s + 1`.
    pub fn add_path(&mut self, path: &VecDeque<Cell>, net: &RoadNetwork) {
        for (s, &c) in path.iter().enumerate() {
            *self
                .counts
                .entry((net.map().index(c) as u32, s as u32 + 1))
                .or_insert(0) += 1;
        }
    }

    pub fn count(&self, cell_index: usize, time: u32) -> u32 {
        self.counts
            .get(&(cell_index as u32, time))
            .copied()
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Path from `from` to `goal` (excluding `from`) chosen according to `mode`.
///
/// Focal mode counts conflicts against `reservations`; the other modes
/// ignore it.
pub fn plan_path(
    net: &RoadNetwork,
    from: Cell,
    goal: Cell,
    mode: PlannerMode,
    reservations: Option<&ReservationTable>,
    rng: &mut impl Rng,
) -> Result<VecDeque<Cell>, PlanError> {
    let map = net.map();
    let table: Cow<[u32]> = match net.table_to(goal) {
        Some(t) => Cow::Borrowed(t),
        None if map.contains(goal) && map.is_traversable(goal) => Cow::Owned(net.bfs_to(goal)),
        None => return Err(PlanError::UnknownGoal(goal)),
    };
    if !map.contains(from) || table[map.index(from)] == UNREACHABLE {
        return Err(PlanError::Unreachable { from, goal });
    }
    match mode {
        PlannerMode::Plain => Ok(descend(net, &table, from, |_, options| options[0])),
        PlannerMode::Diversified => Ok(uniform_shortest(net, &table, from, rng)),
        PlannerMode::Focal { w } => {
            if !(w >= 1.0 && w.is_finite()) {
                return Err(PlanError::BadFocalBound(w));
            }
            let empty = ReservationTable::new();
            Ok(focal(net, &table, from, goal, w, reservations.unwrap_or(&empty)))
        }
    }
}

/// Walks down the distance table, letting `pick` choose among the
/// successors one step closer (given in lexicographic order).
fn descend(
    net: &RoadNetwork,
    table: &[u32],
    from: Cell,
    mut pick: impl FnMut(Cell, &[Cell]) -> Cell,
) -> VecDeque<Cell> {
    let map = net.map();
    let mut path = VecDeque::with_capacity(table[map.index(from)] as usize);
    let mut cur = from;
    let mut options = Vec::with_capacity(2);
    while table[map.index(cur)] > 0 {
        let want = table[map.index(cur)] - 1;
        options.clear();
        options.extend(net.successors(cur).filter(|s| table[map.index(*s)] == want));
        cur = pick(cur, &options);
        path.push_back(cur);
    }
    path
}

/// Samples uniformly among all shortest paths by weighting each step with
/// the number of shortest continuations.
fn uniform_shortest(net: &RoadNetwork, table: &[u32], from: Cell, rng: &mut impl Rng) -> VecDeque<Cell> {
    let map = net.map();
    let idx = |c: Cell| map.index(c);
    let mut layer = vec![from];
    let mut layers = Vec::new();
    let mut seen = HashSet::from([idx(from)]);
    while table[idx(layer[0])] > 0 {
        let mut next = Vec::new();
        for &c in &layer {
            let want = table[idx(c)] - 1;
            for s in net.successors(c) {
                if table[idx(s)] == want && seen.insert(idx(s)) {
                    next.push(s);
                }
            }
        }
        layers.push(std::mem::replace(&mut layer, next));
    }
    // Path counts can overflow integers on long routes; only ratios matter.
    let mut ways: HashMap<usize, f64> = HashMap::from([(idx(layer[0]), 1.0)]);
    for l in layers.iter().rev() {
        for &c in l {
            let want = table[idx(c)] - 1;
            let w: f64 = net
                .successors(c)
                .filter(|s| table[idx(*s)] == want)
                .map(|s| ways[&idx(s)])
                .sum();
            ways.insert(idx(c), w);
        }
    }
    descend(net, table, from, |cur, options| {
        if options.len() == 1 {
            return options[0];
        }
        let total = ways[&idx(cur)];
        let mut x = rng.random::<f64>() * total;
        for &o in options {
            x -= ways[&idx(o)];
            if x < 0.0 {
                return o;
            }
        }
        *options.last().expect("a shortest successor exists")
    })
}

/// Best-first search over `(cell, steps)` restricted to paths of length at
/// most `floor(w * shortest)`, ordered by conflicts with `reservations`,
/// then path length estimate, then remaining distance.
fn focal(
    net: &RoadNetwork,
    table: &[u32],
    from: Cell,
    goal: Cell,
    w: f64,
    reservations: &ReservationTable,
) -> VecDeque<Cell> {
    struct Node {
        cell: Cell,
        g: u32,
        parent: u32,
    }
    let map = net.map();
    let shortest = table[map.index(from)];
    let bound = ((w * shortest as f64).floor() as u32).max(shortest);
    let mut nodes = vec![Node {
        cell: from,
        g: 0,
        parent: u32::MAX,
    }];
    let mut open = BinaryHeap::from([Reverse((0u32, shortest, shortest, 0u32))]);
    let mut closed: HashSet<(usize, u32)> = HashSet::new();
    while let Some(Reverse((conflicts, _, _, id))) = open.pop() {
        let (cell, g) = (nodes[id as usize].cell, nodes[id as usize].g);
        if cell == goal {
            let mut path = VecDeque::with_capacity(g as usize);
            let mut at = id;
            while nodes[at as usize].parent != u32::MAX {
                path.push_front(nodes[at as usize].cell);
                at = nodes[at as usize].parent;
            }
            return path;
        }
        if !closed.insert((map.index(cell), g)) {
            continue;
        }
        for s in net.successors(cell) {
            let si = map.index(s);
            let (gs, hs) = (g + 1, table[si]);
            if hs == UNREACHABLE || gs + hs > bound || closed.contains(&(si, gs)) {
                continue;
            }
            let child = nodes.len() as u32;
            nodes.push(Node {
                cell: s,
                g: gs,
                parent: id,
            });
            open.push(Reverse((conflicts + reservations.count(si, gs), gs + hs, hs, child)));
        }
    }
    unreachable!("the shortest path always satisfies the bound")
}
