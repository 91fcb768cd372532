use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hungarian::{min_cost_matching, type_by_bin};
use super::{AssignError, BinAssignment, CostModel};

/// Greedy allocation.
///
/// A min-cost matching gives every type one bin. Then, repeatedly, the type
/// with the largest current cost is offered each unallocated bin and takes
/// the one that lowers its cost the most. As soon as no bin lowers the cost
/// of that type, the remaining bins get uniformly random types.
pub fn assign_greedy(cost: &CostModel, seed: u64) -> Result<BinAssignment, AssignError> {
    let (n_b, n_c, n_p) = (cost.n_bins(), cost.n_types(), cost.n_stations());
    let matrix = type_by_bin(cost);
    let seed_bins = min_cost_matching(&matrix, n_c, n_b);

    const FREE: usize = usize::MAX;
    let mut types = vec![FREE; n_b];
    // nearest[j * n_p + k]: distance from station k to the closest bin of type j.
    let mut nearest = vec![0.0; n_c * n_p];
    let mut type_cost = vec![0.0; n_c];
    for (j, &i) in seed_bins.iter().enumerate() {
        types[i] = j;
        for k in 0..n_p {
            nearest[j * n_p + k] = cost.dist(k, i);
        }
        type_cost[j] = cost.type_cost(j, std::iter::once(i));
    }
    let mut unallocated: Vec<usize> = (0..n_b).filter(|&i| types[i] == FREE).collect();

    while !unallocated.is_empty() {
        let worst = (0..n_c)
            .max_by(|&a, &b| type_cost[a].total_cmp(&type_cost[b]).then(b.cmp(&a)))
            .expect("at least one type");
        let near = &nearest[worst * n_p..(worst + 1) * n_p];
        let (slot, new_cost) = unallocated
            .iter()
            .enumerate()
            .map(|(slot, &i)| {
                let c: f64 = (0..n_p)
                    .map(|k| cost.prob(k, worst) * near[k].min(cost.dist(k, i)))
                    .sum();
                (slot, c)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("unallocated is not empty");
        if new_cost < type_cost[worst] {
            let i = unallocated.remove(slot);
            types[i] = worst;
            type_cost[worst] = new_cost;
            for k in 0..n_p {
                let d = &mut nearest[worst * n_p + k];
                *d = d.min(cost.dist(k, i));
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in unallocated.drain(..) {
                types[i] = rng.random_range(0..n_c);
            }
        }
    }
    BinAssignment::new(types, n_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{assign_hungarian, average_cost};
    use crate::gridworld::TypeDistribution;

    #[test]
    fn square_instance_is_the_matching() {
        let d = TypeDistribution::dirichlet(3, 4, 1);
        let dist = vec![
            vec![1.0, 4.0, 6.0, 3.0],
            vec![5.0, 2.0, 2.0, 7.0],
            vec![3.0, 3.0, 8.0, 1.0],
        ];
        let c = CostModel::new(&dist, &d).unwrap();
        assert_eq!(assign_greedy(&c, 0).unwrap(), assign_hungarian(&c).unwrap());
    }

    #[test]
    fn one_type_takes_every_useful_bin() {
        let d = TypeDistribution::new(vec![vec![1.0], vec![1.0]]).unwrap();
        let c = CostModel::new(&[vec![2.0, 6.0], vec![9.0, 1.0]], &d).unwrap();
        let a = assign_greedy(&c, 3).unwrap();
        assert_eq!(a.types(), &[0, 0]);
        assert_eq!(average_cost(&a, &c).unwrap(), 1.5);
    }

    #[test]
    fn never_worse_than_the_seed_matching() {
        for seed in 0..20 {
            let d = TypeDistribution::dirichlet(4, 3, seed);
            let dist: Vec<Vec<f64>> = (0..4)
                .map(|k| (0..8).map(|i| ((k * 7 + i * 5 + seed as usize) % 11) as f64 + 1.0).collect())
                .collect();
            let c = CostModel::new(&dist, &d).unwrap();
            let greedy = average_cost(&assign_greedy(&c, seed).unwrap(), &c).unwrap();
            let m = min_cost_matching(&type_by_bin(&c), 3, 8);
            let matched = (0..4)
                .map(|k| (0..3).map(|j| c.prob(k, j) * c.dist(k, m[j])).sum::<f64>())
                .sum::<f64>()
                / 4.0;
            assert!(greedy <= matched + 1e-12, "seed {seed}: {greedy} > {matched}");
        }
    }
}
