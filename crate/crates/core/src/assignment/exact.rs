use std::time::{Duration, Instant};

use super::{assign_greedy, AssignError, BinAssignment, CostModel};

#[derive(Debug, Clone)]
pub struct ExactOutcome {
    pub assignment: BinAssignment,
    pub cost: f64,
    /// False when the time limit stopped the search early.
    pub optimal: bool,
    pub nodes: u64,
}

/// Depth-first branch and bound over per-bin type choices.
///
/// The bound lets every undecided bin serve every type at once, so it is
/// the cost of the decided bins plus free use of all remaining bins. The
/// greedy solution is the initial incumbent, which is returned (with
/// `optimal == false`) if `time_limit` expires.
pub fn assign_exact(cost: &CostModel, time_limit: Option<Duration>) -> Result<ExactOutcome, AssignError> {
    let (n_b, n_c, n_p) = (cost.n_bins(), cost.n_types(), cost.n_stations());

    // Branch first on bins whose type matters most.
    let gap = |i: usize| {
        let (lo, hi) = (0..n_c).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), j| {
            (lo.min(cost.w(i, j)), hi.max(cost.w(i, j)))
        });
        hi - lo
    };
    let mut order: Vec<usize> = (0..n_b).collect();
    order.sort_by(|&a, &b| gap(b).total_cmp(&gap(a)).then(a.cmp(&b)));

    // suffix[t * n_p + k]: nearest of the bins order[t..] to station k.
    let mut suffix = vec![f64::INFINITY; (n_b + 1) * n_p];
    for t in (0..n_b).rev() {
        for k in 0..n_p {
            suffix[t * n_p + k] = suffix[(t + 1) * n_p + k].min(cost.dist(k, order[t]));
        }
    }

    let incumbent = assign_greedy(cost, 0)?;
    let mut search = Search {
        cost,
        order,
        suffix,
        best_total: cost.total(incumbent.types()),
        best: incumbent.types().to_vec(),
        genes: vec![0; n_b],
        count: vec![0; n_c],
        nearest: vec![f64::INFINITY; n_c * n_p],
        nodes: 0,
        deadline: time_limit.map(|d| Instant::now() + d),
        timed_out: false,
    };
    search.descend(0);

    let optimal = !search.timed_out;
    let nodes = search.nodes;
    let assignment = BinAssignment::new(search.best, n_c)?;
    Ok(ExactOutcome {
        cost: search.best_total / n_p as f64,
        assignment,
        optimal,
        nodes,
    })
}

struct Search<'a> {
    cost: &'a CostModel,
    order: Vec<usize>,
    suffix: Vec<f64>,
    best_total: f64,
    best: Vec<usize>,
    genes: Vec<usize>,
    count: Vec<usize>,
    /// `nearest[j * n_p + k]` over decided bins.
    nearest: Vec<f64>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize) {
        let (n_b, n_c, n_p) = (self.cost.n_bins(), self.cost.n_types(), self.cost.n_stations());
        self.nodes += 1;
        if (self.nodes == 1 || self.nodes % 4096 == 0) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        if depth == n_b {
            let total = self.cost.total(&self.genes);
            if total < self.best_total {
                self.best_total = total;
                self.best.clone_from(&self.genes);
            }
            return;
        }
        let missing = self.count.iter().filter(|&&c| c == 0).count();
        if missing > n_b - depth {
            return;
        }
        // Slack against rounding so equal-cost branches are still explored;
        // leaves only replace the incumbent on strict improvement.
        if self.bound(depth) > self.best_total * (1.0 + 1e-12) {
            return;
        }
        let bin = self.order[depth];
        let mut choices: Vec<(f64, usize)> = (0..n_c)
            .map(|j| {
                let gain: f64 = (0..n_p)
                    .map(|k| {
                        let cur = self.nearest[j * n_p + k];
                        let d = self.cost.dist(k, bin);
                        if d < cur {
                            self.cost.prob(k, j) * if cur.is_finite() { d - cur } else { d }
                        } else {
                            0.0
                        }
                    })
                    .sum();
                (gain, j)
            })
            .collect();
        choices.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        // With exactly as many bins left as missing types, only missing types fit.
        let forced = missing == n_b - depth;
        for (_, j) in choices {
            if forced && self.count[j] > 0 {
                continue;
            }
            let saved: Vec<f64> = self.nearest[j * n_p..(j + 1) * n_p].to_vec();
            for k in 0..n_p {
                let slot = &mut self.nearest[j * n_p + k];
                *slot = slot.min(self.cost.dist(k, bin));
            }
            self.genes[bin] = j;
            self.count[j] += 1;
            self.descend(depth + 1);
            self.count[j] -= 1;
            self.nearest[j * n_p..(j + 1) * n_p].copy_from_slice(&saved);
            if self.timed_out {
                return;
            }
        }
    }

    fn bound(&self, depth: usize) -> f64 {
        let (n_c, n_p) = (self.cost.n_types(), self.cost.n_stations());
        let mut sum = 0.0;
        for k in 0..n_p {
            let free = self.suffix[depth * n_p + k];
            for j in 0..n_c {
                sum += self.cost.prob(k, j) * self.nearest[j * n_p + k].min(free);
            }
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::assignment::{assign_hungarian, average_cost};
    use crate::gridworld::TypeDistribution;

    fn instance(n_p: usize, n_b: usize, n_c: usize, seed: u64) -> CostModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist: Vec<Vec<f64>> = (0..n_p)
            .map(|_| (0..n_b).map(|_| rng.random_range(1..25) as f64).collect())
            .collect();
        CostModel::new(&dist, &TypeDistribution::dirichlet(n_p, n_c, seed ^ 77)).unwrap()
    }

    /// All `n_c^n_b` type vectors, skipping non-surjective ones.
    fn enumerate(cost: &CostModel) -> f64 {
        let (n_b, n_c) = (cost.n_bins(), cost.n_types());
        let mut best = f64::INFINITY;
        let mut genes = vec![0usize; n_b];
        loop {
            if let Ok(a) = BinAssignment::new(genes.clone(), n_c) {
                best = best.min(average_cost(&a, cost).unwrap());
            }
            let mut pos = 0;
            loop {
                if pos == n_b {
                    return best;
                }
                genes[pos] += 1;
                if genes[pos] < n_c {
                    break;
                }
                genes[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn six_bins_three_types_match_enumeration() {
        for seed in 0..30 {
            let c = instance(3, 6, 3, seed);
            let out = assign_exact(&c, None).unwrap();
            assert!(out.optimal);
            assert_eq!(out.cost, average_cost(&out.assignment, &c).unwrap());
            assert_eq!(out.cost, enumerate(&c), "seed {seed}");
        }
    }

    #[test]
    fn square_instances_match_hungarian() {
        for seed in 0..10 {
            let c = instance(4, 6, 6, seed);
            let exact = assign_exact(&c, None).unwrap().cost;
            let hung = average_cost(&assign_hungarian(&c).unwrap(), &c).unwrap();
            assert!((exact - hung).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn zero_time_limit_returns_flagged_incumbent() {
        let c = instance(6, 30, 8, 1);
        let out = assign_exact(&c, Some(Duration::ZERO)).unwrap();
        assert!(!out.optimal);
        assert!(BinAssignment::new(out.assignment.types().to_vec(), 8).is_ok());
    }
}
