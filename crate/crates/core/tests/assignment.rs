use mrps::assignment::{
    assign_exact, assign_genetic, assign_greedy, assign_hungarian, assign_random, average_cost, solve,
    BinAssignment, CostModel, GaParams, SolveOptions, Solver,
};
use mrps::gridworld::{generate_map, StationPlacement, TypeDistribution};
use proptest::prelude::*;

fn instance(n_p: usize, n_b: usize, n_c: usize, dist_seed: u64) -> CostModel {
    let mut s = dist_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s % 20 + 1) as f64
    };
    let dist: Vec<Vec<f64>> = (0..n_p).map(|_| (0..n_b).map(|_| next()).collect()).collect();
    CostModel::new(&dist, &TypeDistribution::dirichlet(n_p, n_c, dist_seed)).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

const SMALL_GA: GaParams = GaParams {
    iterations: 150,
    population: 40,
    mutation_rate: 0.08,
};

#[test]
fn hungarian_matches_factorial_enumeration_at_seven() {
    let perms = permutations(7);
    for seed in 0..5 {
        let c = instance(4, 7, 7, seed);
        let best = perms
            .iter()
            .map(|p| average_cost(&BinAssignment::new(p.clone(), 7).unwrap(), &c).unwrap())
            .fold(f64::INFINITY, f64::min);
        let got = average_cost(&assign_hungarian(&c).unwrap(), &c).unwrap();
        assert_eq!(got, best, "seed {seed}");
    }
}

#[test]
fn solvers_run_on_a_generated_map() {
    let map = generate_map(2, 3, &StationPlacement::Count(4)).unwrap();
    let dist = TypeDistribution::dirichlet(4, 3, 5);
    let c = CostModel::from_map(&map, &dist).unwrap();
    assert_eq!((c.n_bins(), c.n_types(), c.n_stations()), (6, 3, 4));
    let opts = SolveOptions {
        ga: SMALL_GA,
        ..SolveOptions::default()
    };
    let exact = solve(&c, Solver::Exact, &opts).unwrap();
    assert!(exact.1);
    let opt = average_cost(&exact.0, &c).unwrap();
    for s in [Solver::Random, Solver::Greedy, Solver::Genetic] {
        let (a, _) = solve(&c, s, &opts).unwrap();
        assert!(average_cost(&a, &c).unwrap() >= opt, "{s}");
    }
    assert!(solve(&c, Solver::Hungarian, &opts).is_err());
}

#[test]
fn relabelling_types_preserves_cost() {
    let c = instance(3, 8, 4, 11);
    let a = assign_random(8, 4, 2).unwrap();
    let perm = [2, 0, 3, 1];
    let rows: Vec<Vec<f64>> = (0..3)
        .map(|k| {
            let mut row = vec![0.0; 4];
            for j in 0..4 {
                row[perm[j]] = c.prob(k, j);
            }
            row
        })
        .collect();
    let dist: Vec<Vec<f64>> = (0..3).map(|k| (0..8).map(|i| c.dist(k, i)).collect()).collect();
    let relabelled = CostModel::new(&dist, &TypeDistribution::new(rows).unwrap()).unwrap();
    let b = BinAssignment::new(a.types().iter().map(|&t| perm[t]).collect(), 4).unwrap();
    let (x, y) = (average_cost(&a, &c).unwrap(), average_cost(&b, &relabelled).unwrap());
    assert!((x - y).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn every_solver_returns_a_surjection(
        n_p in 1usize..5, n_b in 1usize..10, c_frac in 0.0f64..1.0, seed in any::<u64>()
    ) {
        let n_c = 1 + ((n_b - 1) as f64 * c_frac) as usize;
        let c = instance(n_p, n_b, n_c, seed);
        let outs = [
            assign_random(n_b, n_c, seed).unwrap(),
            assign_greedy(&c, seed).unwrap(),
            assign_genetic(&c, &SMALL_GA, seed).unwrap(),
            assign_exact(&c, None).unwrap().assignment,
        ];
        for a in &outs {
            prop_assert_eq!(a.n_bins(), n_b);
            prop_assert!(BinAssignment::new(a.types().to_vec(), n_c).is_ok());
        }
        let opt = average_cost(&outs[3], &c).unwrap();
        for a in &outs[..3] {
            prop_assert!(opt <= average_cost(a, &c).unwrap());
        }
        if n_b == n_c {
            prop_assert!(opt <= average_cost(&assign_hungarian(&c).unwrap(), &c).unwrap() + 1e-12);
        }
    }

    #[test]
    fn stochastic_solvers_are_seed_deterministic(seed in any::<u64>()) {
        let c = instance(3, 9, 4, seed);
        prop_assert_eq!(assign_greedy(&c, seed).unwrap(), assign_greedy(&c, seed).unwrap());
        prop_assert_eq!(
            assign_genetic(&c, &SMALL_GA, seed).unwrap(),
            assign_genetic(&c, &SMALL_GA, seed).unwrap()
        );
    }
}
