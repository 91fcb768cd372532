//! Multi-robot parcel sorting.
//!
//! The crate covers the whole pipeline of a robotic sortation floor:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`gridworld`] | Block warehouse maps, text format, undirected distances, type distributions |
//! | [`roadnet`] | Alternating-street orientation and directed distance tables |
//! | [`assignment`] | Bin-to-type assignment: random, Hungarian, greedy, genetic and exact solvers |
//! | [`planner`] | Decentralized prioritized recursive yielding with optional path diversification |
//! | [`simulator`] | Lifelong pickup/delivery loop and throughput metrics |
//! | [`bench`] | Experiment harness producing CSV/JSON result tables |
//!
//! A minimal end-to-end run:
//!
//! ```
//! use std::sync::Arc;
//! use mrps::prelude::*;
//!
//! let map = Arc::new(generate_map(2, 3, &StationPlacement::Count(4)).unwrap());
//! let net = Arc::new(orient(&map).unwrap());
//! let dist = TypeDistribution::dirichlet(map.stations().len(), 3, 7);
//! let cost = CostModel::from_map(&map, &dist).unwrap();
//! let assignment = assign_greedy(&cost, 7).unwrap();
//! let config = SimConfig::new(net, dist, assignment, 5, 100);
//! let report = run(&config).unwrap();
//! assert!(report.metrics.deliveries > 0);
//! ```

pub mod assignment;
pub mod bench;
pub mod gridworld;
pub mod planner;
pub mod roadnet;
pub mod seed;
pub mod simulator;

pub mod prelude {
    pub use crate::assignment::{
        assign_exact, assign_genetic, assign_greedy, assign_hungarian, assign_random,
        average_cost, AssignError, BinAssignment, CostModel, ExactOutcome, GaParams, Solver,
    };
    pub use crate::gridworld::{
        generate_map, load_map, save_map, Cell, CellKind, MapError, StationPlacement,
        TypeDistribution, WarehouseMap,
    };
    pub use crate::planner::{PlannerMode, RobotState};
    pub use crate::roadnet::{orient, RoadNetwork};
    pub use crate::simulator::{run, Metrics, SimConfig, SimReport};
}
