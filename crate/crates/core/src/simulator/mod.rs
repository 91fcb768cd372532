//! Lifelong pickup-and-delivery loop.
//!
//! Robots start on random free cells, empty-handed, and head for the nearest
//! station. At a station a robot loads a parcel whose type is drawn from the
//! station's row of the type distribution, then heads for the nearest access
//! cell of a bin sorting that type. Dropping the parcel sends it back to the
//! nearest station. Loading and dropping take no time.
//!
//! Metrics are a pure function of the configuration; wall-clock timings are
//! reported separately in [`Timing`].

use std::collections::HashSet;
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::BinAssignment;
use crate::gridworld::{Cell, TypeDistribution, UNREACHABLE};
use crate::planner::{plan_path, step, PlanError, PlannerMode, ReservationTable, RobotState};
use crate::roadnet::RoadNetwork;
use crate::seed::SeedSet;

pub const DEFAULT_LIVENESS_FACTOR: u32 = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("deadlock suspected: {0}")]
    Deadlock(Box<DeadlockReport>),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// A robot whose current task outlived the liveness bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeadlockReport {
    pub step: usize,
    pub robot: usize,
    pub position: Cell,
    pub goal: Cell,
    pub task_age: usize,
    pub bound: usize,
    /// Robots within two cells of the stuck robot.
    pub neighbourhood: Vec<(usize, Cell)>,
}

impl std::fmt::Display for DeadlockReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "robot {} at {} heading to {} has spent {} steps on its task (bound {}) at step {}",
            self.robot, self.position, self.goal, self.task_age, self.bound, self.step
        )
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub net: Arc<RoadNetwork>,
    pub distribution: TypeDistribution,
    pub assignment: BinAssignment,
    pub robots: usize,
    pub horizon: usize,
    pub seeds: SeedSet,
    pub mode: PlannerMode,
    /// Steps excluded from delivery counts.
    pub warmup: usize,
    /// A task older than this multiple of the directed diameter aborts the run.
    pub liveness_factor: u32,
    pub record_trace: bool,
}

impl SimConfig {
    /// Plain planner, global seed 0, no warmup, no trace.
    pub fn new(
        net: Arc<RoadNetwork>,
        distribution: TypeDistribution,
        assignment: BinAssignment,
        robots: usize,
        horizon: usize,
    ) -> Self {
        SimConfig {
            net,
            distribution,
            assignment,
            robots,
            horizon,
            seeds: SeedSet::from_global(0),
            mode: PlannerMode::Plain,
            warmup: 0,
            liveness_factor: DEFAULT_LIVENESS_FACTOR,
            record_trace: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seeds = SeedSet::from_global(seed);
        self
    }

    pub fn with_mode(mut self, mode: PlannerMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        let map = self.net.map();
        if self.robots >= map.traversable_count() {
            return bad(format!(
                "{} robots need fewer than the {} free cells",
                self.robots,
                map.traversable_count()
            ));
        }
        if map.stations().is_empty() {
            return bad("the map has no stations".into());
        }
        if let Err(e) = self.distribution.validate_for(map) {
            return bad(e.to_string());
        }
        if self.assignment.n_bins() != map.bins().len() {
            return bad(format!(
                "assignment covers {} bins, the map has {}",
                self.assignment.n_bins(),
                map.bins().len()
            ));
        }
        if self.assignment.n_types() != self.distribution.n_types() {
            return bad(format!(
                "assignment uses {} types, the distribution {}",
                self.assignment.n_types(),
                self.distribution.n_types()
            ));
        }
        if self.warmup > self.horizon {
            return bad("warmup exceeds the horizon".into());
        }
        if self.robots > 1 {
            if let Some(k) = self.deterministic_loop() {
                return bad(format!(
                    "station {k} always issues one type whose nearest bin returns to it; robots could circle forever"
                ));
            }
        }
        if let PlannerMode::Focal { w } = self.mode {
            if !(w >= 1.0 && w.is_finite()) {
                return Err(PlanError::BadFocalBound(w).into());
            }
        }
        Ok(())
    }

    /// A station with a one-hot row whose nearest matching bin sends
    /// robots straight back to it. Nothing random breaks such a loop.
    fn deterministic_loop(&self) -> Option<usize> {
        let net = &*self.net;
        let map = net.map();
        let stations = map.stations();
        let nearest = |from: Cell, cells: &mut dyn Iterator<Item = Cell>| {
            let at = map.index(from);
            cells
                .filter_map(|c| net.table_to(c).map(|t| (t[at], c)))
                .filter(|&(d, _)| d != UNREACHABLE)
                .min()
                .map(|p| p.1)
        };
        (0..stations.len()).find(|&k| {
            let row = self.distribution.row(k);
            let Some(j) = row.iter().position(|&p| p >= 1.0 - 1e-12) else {
                return false;
            };
            let mut goals = self.assignment.bins_of(j).flat_map(|b| map.access_cells(b));
            let Some(goal) = nearest(stations[k], &mut goals) else {
                return false;
            };
            nearest(goal, &mut stations.iter().copied()) == Some(stations[k])
        })
    }
}

/// Run statistics that depend only on the configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub robots: usize,
    pub horizon: usize,
    pub warmup: usize,
    /// Deliveries after the warmup.
    pub deliveries: u64,
    /// `deliveries / (horizon - warmup)`.
    pub throughput: f64,
    pub per_type_deliveries: Vec<u64>,
    /// Mean steps from loading a parcel to dropping it.
    pub mean_delivery_leg: f64,
    /// Mean steps from dropping a parcel to loading the next.
    pub mean_return_leg: f64,
    /// Sum of the two legs: the mean time per parcel of one robot.
    pub mean_task_distance: f64,
    pub waits: u64,
    pub conflicts_resolved: u64,
    pub cycles_detected: u64,
    pub replans: u64,
    pub max_task_age: usize,
    pub meet_collisions: u64,
    pub swap_collisions: u64,
    pub bin_occupancies: u64,
}

/// Wall-clock cost of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
    pub mean_step_ms: f64,
    pub max_step_ms: f64,
}

/// Robot position after `step` moves; step 0 is the initial placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub robot: usize,
    pub row: usize,
    pub col: usize,
    /// 1-based parcel type, if carrying.
    pub carried: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SimReport {
    pub metrics: Metrics,
    pub timing: Timing,
    pub trace: Option<Vec<TraceRow>>,
}

/// Writes trace rows as CSV with a `step,robot,row,col,carried` header.
pub fn write_trace(rows: &[TraceRow], out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Draws a parcel type for station `station`.
pub fn sample_parcel(station: usize, distribution: &TypeDistribution, rng: &mut impl Rng) -> usize {
    WeightedIndex::new(distribution.row(station))
        .expect("distribution rows are validated")
        .sample(rng)
}

/// Candidate with the smallest directed distance from `from`; ties go to
/// the lexicographically smaller cell.
pub fn nearest_goal(from: Cell, candidates: &[Cell], net: &RoadNetwork) -> Option<Cell> {
    candidates
        .iter()
        .filter_map(|&c| {
            let d = net.directed_distance(from, c).ok().flatten()?;
            Some((d, c))
        })
        .min()
        .map(|(_, c)| c)
}

/// Goal cells of one kind with the bin each serves.
struct Targets {
    cells: Vec<Cell>,
    bins: Vec<Option<usize>>,
}

impl Targets {
    /// Nearest cell, using the cached goal tables.
    fn nearest(&self, net: &RoadNetwork, from: Cell) -> (Cell, Option<usize>) {
        let at = net.map().index(from);
        let mut best = (UNREACHABLE, Cell::new(usize::MAX, usize::MAX), None);
        for (&c, &b) in self.cells.iter().zip(&self.bins) {
            let d = net.table_to(c).map_or(UNREACHABLE, |t| t[at]);
            if (d, c) < (best.0, best.1) {
                best = (d, c, b);
            }
        }
        assert!(best.0 != UNREACHABLE, "no reachable goal from {from}");
        (best.1, best.2)
    }
}

pub fn run(config: &SimConfig) -> Result<SimReport, SimError> {
    config.validate()?;
    let net = &*config.net;
    let map = net.map();
    let n_types = config.distribution.n_types();

    let stations = Targets {
        cells: map.stations().to_vec(),
        bins: vec![None; map.stations().len()],
    };
    let by_type: Vec<Targets> = (0..n_types)
        .map(|j| {
            let mut pairs: Vec<(Cell, usize)> = config
                .assignment
                .bins_of(j)
                .flat_map(|b| map.access_cells(b).into_iter().map(move |c| (c, b)))
                .collect();
            pairs.sort();
            Targets {
                cells: pairs.iter().map(|p| p.0).collect(),
                bins: pairs.iter().map(|p| Some(p.1)).collect(),
            }
        })
        .collect();
    let samplers: Vec<WeightedIndex<f64>> = (0..map.stations().len())
        .map(|k| WeightedIndex::new(config.distribution.row(k)).expect("validated row"))
        .collect();

    let mut parcel_rng = ChaCha8Rng::seed_from_u64(config.seeds.parcel);
    let mut planner_rng = ChaCha8Rng::seed_from_u64(config.seeds.planner);
    let mut placement_rng = ChaCha8Rng::seed_from_u64(config.seeds.placement);

    let free: Vec<Cell> = map.traversable_cells().collect();
    let mut starts: Vec<usize> = sample(&mut placement_rng, free.len(), config.robots).into_vec();
    starts.sort_unstable();
    let mut robots: Vec<RobotState> = starts
        .iter()
        .enumerate()
        .map(|(id, &i)| RobotState::new(id, free[i]))
        .collect();
    let n = robots.len();
    let mut target_bin: Vec<Option<usize>> = vec![None; n];
    let mut task_start = vec![0usize; n];
    let mut leg_start = vec![0usize; n];
    let mut fresh = vec![true; n];
    for (r, robot) in robots.iter_mut().enumerate() {
        let (goal, _) = stations.nearest(net, robot.position);
        robot.goal = goal;
        target_bin[r] = None;
    }

    let bound = (config.liveness_factor as usize) * (net.diameter().max(1) as usize);
    let mut metrics = Metrics {
        robots: n,
        horizon: config.horizon,
        warmup: config.warmup,
        per_type_deliveries: vec![0; n_types],
        ..Metrics::default()
    };
    let (mut delivery_legs, mut return_legs) = ((0u64, 0u64), (0u64, 0u64));
    let mut trace = config.record_trace.then(Vec::new);
    let record = |rows: &mut Vec<TraceRow>, t: usize, robots: &[RobotState]| {
        rows.extend(robots.iter().enumerate().map(|(i, r)| TraceRow {
            step: t,
            robot: i,
            row: r.position.row,
            col: r.position.col,
            carried: r.carried.map(|j| j + 1),
        }));
    };
    if let Some(rows) = trace.as_mut() {
        record(rows, 0, &robots);
    }
    let mut step_ms = Vec::with_capacity(config.horizon);
    let started = Instant::now();

    for t in 0..config.horizon {
        let tick = Instant::now();
        let mut reservations = matches!(config.mode, PlannerMode::Focal { .. })
            .then(|| ReservationTable::from_robots(&robots, net));

        for r in 0..n {
            if !robots[r].path.is_empty() {
                continue;
            }
            let counted = t >= config.warmup;
            while robots[r].position == robots[r].goal {
                let robot = &mut robots[r];
                match robot.carried {
                    Some(j) => {
                        let bin = target_bin[r].expect("a carrier targets a bin");
                        assert_eq!(config.assignment.type_of(bin), j, "parcel dropped in a wrong bin");
                        if counted {
                            metrics.deliveries += 1;
                            metrics.per_type_deliveries[j] += 1;
                        }
                        delivery_legs.0 += (t - leg_start[r]) as u64;
                        delivery_legs.1 += 1;
                        robot.carried = None;
                        let (goal, _) = stations.nearest(net, robot.position);
                        robot.goal = goal;
                        target_bin[r] = None;
                    }
                    None => {
                        let k = map
                            .station_index(robot.position)
                            .expect("an empty robot's goal is a station");
                        let j = samplers[k].sample(&mut parcel_rng);
                        if !fresh[r] {
                            return_legs.0 += (t - leg_start[r]) as u64;
                            return_legs.1 += 1;
                        }
                        robot.carried = Some(j);
                        let (goal, bin) = by_type[j].nearest(net, robot.position);
                        robot.goal = goal;
                        target_bin[r] = bin;
                    }
                }
                fresh[r] = false;
                leg_start[r] = t;
                task_start[r] = t;
            }
            let robot = &mut robots[r];
            robot.path = plan_path(
                net,
                robot.position,
                robot.goal,
                config.mode,
                reservations.as_ref(),
                &mut planner_rng,
            )?;
            metrics.replans += 1;
            if let Some(table) = reservations.as_mut() {
                table.add_path(&robot.path, net);
            }
        }

        for r in 0..n {
            let age = t - task_start[r];
            metrics.max_task_age = metrics.max_task_age.max(age);
            if age > bound {
                let at = robots[r].position;
                return Err(SimError::Deadlock(Box::new(DeadlockReport {
                    step: t,
                    robot: r,
                    position: at,
                    goal: robots[r].goal,
                    task_age: age,
                    bound,
                    neighbourhood: robots
                        .iter()
                        .enumerate()
                        .filter(|(q, o)| *q != r && o.position.chebyshev(at) <= 2)
                        .map(|(q, o)| (q, o.position))
                        .collect(),
                })));
            }
        }

        let before: Vec<Cell> = robots.iter().map(|r| r.position).collect();
        let outcome = step(&mut robots, net, &mut planner_rng);
        metrics.waits += outcome.waits.len() as u64;
        metrics.conflicts_resolved += outcome.conflicts_resolved as u64;
        metrics.cycles_detected += outcome.cycles_detected as u64;
        audit(&robots, &before, net, &mut metrics);

        if let Some(rows) = trace.as_mut() {
            record(rows, t + 1, &robots);
        }
        step_ms.push(tick.elapsed().as_secs_f64() * 1e3);
    }

    let window = config.horizon - config.warmup;
    metrics.throughput = if window == 0 {
        0.0
    } else {
        metrics.deliveries as f64 / window as f64
    };
    let mean = |(sum, count): (u64, u64)| if count == 0 { 0.0 } else { sum as f64 / count as f64 };
    metrics.mean_delivery_leg = mean(delivery_legs);
    metrics.mean_return_leg = mean(return_legs);
    metrics.mean_task_distance = metrics.mean_delivery_leg + metrics.mean_return_leg;

    let timing = Timing {
        total_ms: started.elapsed().as_secs_f64() * 1e3,
        mean_step_ms: if step_ms.is_empty() {
            0.0
        } else {
            step_ms.iter().sum::<f64>() / step_ms.len() as f64
        },
        max_step_ms: step_ms.iter().copied().fold(0.0, f64::max),
    };
    Ok(SimReport {
        metrics,
        timing,
        trace,
    })
}

/// Counts meet collisions, swaps across an edge and robots on bins.
fn audit(robots: &[RobotState], before: &[Cell], net: &RoadNetwork, m: &mut Metrics) {
    let map = net.map();
    let mut seen = HashSet::with_capacity(robots.len());
    for r in robots {
        if !seen.insert(r.position) {
            m.meet_collisions += 1;
        }
        if !map.is_traversable(r.position) {
            m.bin_occupancies += 1;
        }
    }
    let moved: HashSet<(Cell, Cell)> = robots
        .iter()
        .zip(before)
        .filter(|(r, b)| r.position != **b)
        .map(|(r, b)| (*b, r.position))
        .collect();
    m.swap_collisions += moved.iter().filter(|(a, b)| moved.contains(&(*b, *a))).count() as u64 / 2;
}

#[cfg(test)]
mod tests;
