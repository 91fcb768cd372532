use super::*;
use crate::assignment::{assign_greedy, assign_random, CostModel};
use crate::gridworld::{generate_map, StationPlacement};
use crate::roadnet::orient;

fn net(a: usize, b: usize, s: usize) -> Arc<RoadNetwork> {
    let map = Arc::new(generate_map(a, b, &StationPlacement::Count(s)).unwrap());
    Arc::new(orient(&map).unwrap())
}

/// Directed round trip from `station` to the nearest access cell of `ty`
/// and back to the nearest station.
fn round_trip(net: &RoadNetwork, station: Cell, assignment: &BinAssignment, ty: usize) -> u32 {
    let map = net.map();
    let cells: Vec<Cell> = assignment.bins_of(ty).flat_map(|b| map.access_cells(b)).collect();
    let goal = nearest_goal(station, &cells, net).unwrap();
    let back_to = nearest_goal(goal, map.stations(), net).unwrap();
    net.directed_distance(station, goal).unwrap().unwrap() + net.directed_distance(goal, back_to).unwrap().unwrap()
}

#[test]
fn lone_robot_cycles_at_the_round_trip_rate() {
    let net = net(1, 1, 1);
    let station = net.map().stations()[0];
    let a = BinAssignment::new(vec![0], 1).unwrap();
    let trip = round_trip(&net, station, &a, 0) as usize;
    let warmup = 50;
    let cycles = 40;
    let mut config = SimConfig::new(net.clone(), TypeDistribution::uniform(1, 1), a, 1, warmup + cycles * trip);
    config.warmup = warmup;
    let m = run(&config).unwrap().metrics;
    assert!(m.deliveries.abs_diff(cycles as u64) <= 1, "{} deliveries", m.deliveries);
    assert_eq!(m.mean_task_distance, trip as f64);
    assert_eq!(m.waits, 0);
}

#[test]
fn zero_horizon_delivers_nothing() {
    let net = net(1, 1, 1);
    let a = BinAssignment::new(vec![0], 1).unwrap();
    let m = run(&SimConfig::new(net, TypeDistribution::uniform(1, 1), a, 1, 0)).unwrap().metrics;
    assert_eq!(m.deliveries, 0);
    assert_eq!(m.throughput, 0.0);
}

fn busy_config(mode: PlannerMode, seed: u64) -> SimConfig {
    let net = net(4, 9, 12);
    let dist = TypeDistribution::dirichlet(12, 10, 5);
    let cost = CostModel::from_map(net.map(), &dist).unwrap();
    let a = assign_greedy(&cost, 1).unwrap();
    SimConfig::new(net, dist, a, 40, 300).with_mode(mode).with_seed(seed)
}

#[test]
fn runs_are_deterministic_and_safe() {
    for mode in [
        PlannerMode::Plain,
        PlannerMode::Diversified,
        PlannerMode::Focal { w: 1.5 },
    ] {
        let a = run(&busy_config(mode, 3)).unwrap().metrics;
        let b = run(&busy_config(mode, 3)).unwrap().metrics;
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.meet_collisions + a.swap_collisions + a.bin_occupancies, 0);
        assert!(a.deliveries > 0);
        assert_eq!(a.deliveries, a.per_type_deliveries.iter().sum::<u64>());
        assert!((a.throughput * 300.0 - a.deliveries as f64).abs() < 1e-9);
    }
    let c = run(&busy_config(PlannerMode::Plain, 4)).unwrap().metrics;
    let d = run(&busy_config(PlannerMode::Plain, 3)).unwrap().metrics;
    assert_ne!(c, d);
}

#[test]
fn trace_has_one_row_per_robot_and_step() {
    let config = busy_config(PlannerMode::Plain, 0).with_trace(true);
    let report = run(&SimConfig { horizon: 7, ..config }).unwrap();
    let rows = report.trace.unwrap();
    assert_eq!(rows.len(), 8 * 40);
    assert!(rows[..40].iter().all(|r| r.step == 0 && r.carried.is_none()));
    let mut buf = Vec::new();
    write_trace(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("step,robot,row,col,carried\n"));
    assert_eq!(text.lines().count(), 8 * 40 + 1);
}

#[test]
fn invalid_configs_are_rejected() {
    let net = net(1, 1, 1);
    let a = BinAssignment::new(vec![0], 1).unwrap();
    let free = net.map().traversable_count();
    let too_many = SimConfig::new(net.clone(), TypeDistribution::uniform(1, 1), a.clone(), free, 10);
    assert!(matches!(run(&too_many), Err(SimError::InvalidConfig(_))));
    let wrong_dist = SimConfig::new(net.clone(), TypeDistribution::uniform(2, 1), a.clone(), 1, 10);
    assert!(run(&wrong_dist).is_err());
    let bad_w = SimConfig::new(net, TypeDistribution::uniform(1, 1), a, 1, 10).with_mode(PlannerMode::Focal { w: 0.9 });
    assert!(run(&bad_w).is_err());
}

#[test]
fn tiny_liveness_bound_reports_a_deadlock() {
    let mut config = busy_config(PlannerMode::Plain, 1);
    config.liveness_factor = 0;
    match run(&config) {
        Err(SimError::Deadlock(report)) => assert!(report.task_age > report.bound),
        other => panic!("expected a deadlock report, got {other:?}"),
    }
}

#[test]
fn parcel_sampling_follows_the_row() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let one_hot = TypeDistribution::new(vec![vec![0.0, 1.0, 0.0]]).unwrap();
    assert!((0..100).all(|_| sample_parcel(0, &one_hot, &mut rng) == 1));

    let uniform = TypeDistribution::uniform(1, 4);
    let draws = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..draws {
        counts[sample_parcel(0, &uniform, &mut rng)] += 1;
    }
    let expected = draws as f64 / 4.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 99.9th percentile of chi-square with 3 degrees of freedom.
    assert!(chi2 < 16.27, "chi2 = {chi2}");
    for c in counts {
        assert!((c as f64 / draws as f64 - 0.25).abs() < 0.01);
    }
}

#[test]
fn nearest_goal_matches_a_linear_scan() {
    let net = net(4, 9, 12);
    let map = net.map();
    let goals: Vec<Cell> = net.goal_cells().iter().copied().step_by(7).collect();
    for from in map.traversable_cells().step_by(13) {
        let want = goals
            .iter()
            .map(|&g| (net.directed_distance(from, g).unwrap().unwrap(), g))
            .min()
            .unwrap()
            .1;
        assert_eq!(nearest_goal(from, &goals, &net), Some(want));
    }
    let only = [Cell::new(0, 1)];
    assert_eq!(nearest_goal(Cell::new(4, 4), &only, &net), Some(only[0]));
}

#[test]
fn random_assignment_runs_too() {
    let net = net(2, 3, 4);
    let dist = TypeDistribution::dirichlet(4, 3, 2);
    let a = assign_random(6, 3, 9).unwrap();
    let m = run(&SimConfig::new(net, dist, a, 8, 200).with_mode(PlannerMode::Diversified)).unwrap().metrics;
    assert!(m.deliveries > 0);
}

#[test]
fn deterministic_station_loops_are_rejected() {
    let net = net(1, 1, 1);
    let a = BinAssignment::new(vec![0], 1).unwrap();
    let one_hot = |robots| SimConfig::new(net.clone(), TypeDistribution::uniform(1, 1), a.clone(), robots, 10);
    assert!(run(&one_hot(1)).is_ok());
    assert!(matches!(run(&one_hot(2)), Err(SimError::InvalidConfig(m)) if m.contains("circle")));

    let net = self::net(2, 2, 3);
    let a = BinAssignment::new(vec![0, 1, 1, 0], 2).unwrap();
    let mixed = SimConfig::new(net, TypeDistribution::uniform(3, 2), a, 4, 10);
    assert!(run(&mixed).is_ok());
}
