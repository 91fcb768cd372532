use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{assign_greedy, random_with, AssignError, BinAssignment, CostModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub iterations: usize,
    pub population: usize,
    /// Chance that a child gets one bin's type resampled.
    pub mutation_rate: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            iterations: 800,
            population: 100,
            mutation_rate: 0.08,
        }
    }
}

impl GaParams {
    fn validate(&self) -> Result<(), AssignError> {
        if self.iterations == 0 || self.population == 0 {
            return Err(AssignError::InvalidConfig(
                "GA iterations and population must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(AssignError::InvalidConfig(format!(
                "mutation rate {} outside [0, 1]",
                self.mutation_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GaRun {
    pub best: BinAssignment,
    pub best_cost: f64,
    /// Best average cost before the first generation and after each one.
    pub history: Vec<f64>,
    pub population: Vec<BinAssignment>,
}

/// Genetic search seeded 20% greedy, 80% random. Returns the best individual found.
pub fn assign_genetic(cost: &CostModel, params: &GaParams, seed: u64) -> Result<BinAssignment, AssignError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_greedy = params.population.div_ceil(5).min(params.population);
    let mut initial = Vec::with_capacity(params.population);
    for _ in 0..n_greedy {
        let mut genes = assign_greedy(cost, rng.random())?.types().to_vec();
        resample_one(&mut genes, cost.n_types(), &mut rng);
        repair(&mut genes, cost);
        initial.push(BinAssignment::new(genes, cost.n_types())?);
    }
    while initial.len() < params.population {
        initial.push(random_with(cost.n_bins(), cost.n_types(), &mut rng)?);
    }
    Ok(evolve(cost, params, rng.random(), initial)?.best)
}

/// Evolves `population` for `params.iterations` generations with binary
/// tournament selection, multiset PMX, mutation, repair and one elite.
pub fn evolve(
    cost: &CostModel,
    params: &GaParams,
    seed: u64,
    population: Vec<BinAssignment>,
) -> Result<GaRun, AssignError> {
    params.validate()?;
    if population.is_empty() {
        return Err(AssignError::InvalidConfig("empty initial population".into()));
    }
    for a in &population {
        cost.check(a)?;
    }
    let n_c = cost.n_types();
    let norm = cost.n_stations() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pop: Vec<Vec<usize>> = population.into_iter().map(|a| a.types).collect();
    let mut fit: Vec<f64> = pop.iter().map(|g| cost.total(g)).collect();
    let argmin = |fit: &[f64]| {
        (0..fit.len())
            .min_by(|&a, &b| fit[a].total_cmp(&fit[b]).then(a.cmp(&b)))
            .expect("population is not empty")
    };
    let mut best = argmin(&fit);
    let mut history = vec![fit[best] / norm];

    for _ in 0..params.iterations {
        let mut next = Vec::with_capacity(pop.len());
        next.push(pop[best].clone());
        while next.len() < pop.len() {
            let a = tournament(&fit, &mut rng);
            let b = tournament(&fit, &mut rng);
            let mut child = pmx(&pop[a], &pop[b], &mut rng);
            if rng.random_bool(params.mutation_rate) {
                resample_one(&mut child, n_c, &mut rng);
            }
            repair(&mut child, cost);
            next.push(child);
        }
        pop = next;
        fit = pop.iter().map(|g| cost.total(g)).collect();
        best = argmin(&fit);
        history.push(fit[best] / norm);
    }

    let best_cost = fit[best] / norm;
    let population = pop
        .into_iter()
        .map(|g| BinAssignment::new(g, n_c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GaRun {
        best: population[best].clone(),
        best_cost,
        history,
        population,
    })
}

fn tournament(fit: &[f64], rng: &mut impl Rng) -> usize {
    let a = rng.random_range(0..fit.len());
    let b = rng.random_range(0..fit.len());
    if fit[b] < fit[a] {
        b
    } else {
        a
    }
}

fn resample_one(genes: &mut [usize], n_types: usize, rng: &mut impl Rng) {
    let i = rng.random_range(0..genes.len());
    genes[i] = rng.random_range(0..n_types);
}

/// Partially mapped crossover on type vectors. The child takes `a` inside a
/// random segment and `b` outside it; an outside value that also occurs in
/// `a`'s segment is replaced by following the segment mapping `a[i] -> b[i]`
/// as in the permutation operator. Repeated values keep their first mapping.
fn pmx(a: &[usize], b: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let n = a.len();
    let lo = rng.random_range(0..n);
    let hi = rng.random_range(lo + 1..=n);
    let mut mapping: HashMap<usize, usize> = HashMap::with_capacity(hi - lo);
    for i in lo..hi {
        mapping.entry(a[i]).or_insert(b[i]);
    }
    let mut child = b.to_vec();
    child[lo..hi].copy_from_slice(&a[lo..hi]);
    for (i, gene) in child.iter_mut().enumerate() {
        if (lo..hi).contains(&i) {
            continue;
        }
        let mut v = *gene;
        for _ in 0..hi - lo {
            match mapping.get(&v) {
                Some(&u) if u != v => v = u,
                _ => break,
            }
        }
        *gene = v;
    }
    child
}

/// Gives every missing type the bin where switching costs least, taking
/// bins only from types that keep at least one other bin.
pub(crate) fn repair(genes: &mut [usize], cost: &CostModel) {
    let (n_b, n_c, n_p) = (cost.n_bins(), cost.n_types(), cost.n_stations());
    let mut count = vec![0usize; n_c];
    for &t in genes.iter() {
        count[t] += 1;
    }
    let missing: Vec<usize> = (0..n_c).filter(|&j| count[j] == 0).collect();
    if missing.is_empty() {
        return;
    }
    // Per (station, type): nearest distance, its bin, runner-up distance.
    let mut first = vec![f64::INFINITY; n_p * n_c];
    let mut first_bin = vec![usize::MAX; n_p * n_c];
    let mut second = vec![f64::INFINITY; n_p * n_c];
    for j in missing {
        first.fill(f64::INFINITY);
        first_bin.fill(usize::MAX);
        second.fill(f64::INFINITY);
        for (i, &t) in genes.iter().enumerate() {
            for k in 0..n_p {
                let s = k * n_c + t;
                let d = cost.dist(k, i);
                if d < first[s] {
                    second[s] = first[s];
                    first[s] = d;
                    first_bin[s] = i;
                } else if d < second[s] {
                    second[s] = d;
                }
            }
        }
        let pick = (0..n_b)
            .filter(|&i| count[genes[i]] > 1)
            .map(|i| {
                let t = genes[i];
                let delta: f64 = (0..n_p)
                    .map(|k| {
                        let s = k * n_c + t;
                        let without = if first_bin[s] == i { second[s] } else { first[s] };
                        cost.prob(k, j) * cost.dist(k, i) + cost.prob(k, t) * (without - first[s])
                    })
                    .sum();
                (i, delta)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
            .expect("some type has a spare bin while another is missing");
        count[genes[pick]] -= 1;
        genes[pick] = j;
        count[j] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{assign_hungarian, average_cost};
    use crate::gridworld::TypeDistribution;

    fn instance(n_p: usize, n_b: usize, n_c: usize, seed: u64) -> CostModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist: Vec<Vec<f64>> = (0..n_p)
            .map(|_| (0..n_b).map(|_| rng.random_range(1..30) as f64).collect())
            .collect();
        CostModel::new(&dist, &TypeDistribution::dirichlet(n_p, n_c, seed)).unwrap()
    }

    #[test]
    fn pmx_on_permutations_gives_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = vec![0, 1, 2, 3, 4, 5, 6];
        let b = vec![3, 6, 0, 5, 1, 4, 2];
        for _ in 0..50 {
            let mut c = pmx(&a, &b, &mut rng);
            c.sort();
            assert_eq!(c, a);
        }
    }

    #[test]
    fn repair_restores_every_type() {
        let c = instance(3, 8, 5, 2);
        let mut genes = vec![0, 0, 0, 1, 1, 1, 1, 0];
        repair(&mut genes, &c);
        assert!(BinAssignment::new(genes, 5).is_ok());
    }

    #[test]
    fn tiny_square_instance_finds_the_optimum() {
        for seed in 0..5 {
            let c = instance(3, 4, 4, seed);
            let opt = average_cost(&assign_hungarian(&c).unwrap(), &c).unwrap();
            let params = GaParams {
                iterations: 100,
                population: 30,
                mutation_rate: 0.08,
            };
            let ga = average_cost(&assign_genetic(&c, &params, seed).unwrap(), &c).unwrap();
            assert!((ga - opt).abs() < 1e-9, "seed {seed}: {ga} vs {opt}");
        }
    }

    #[test]
    fn best_cost_never_increases() {
        let c = instance(5, 12, 4, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let init: Vec<_> = (0..20).map(|_| random_with(12, 4, &mut rng).unwrap()).collect();
        let params = GaParams {
            iterations: 60,
            population: 20,
            mutation_rate: 0.2,
        };
        let run = evolve(&c, &params, 3, init).unwrap();
        assert_eq!(run.history.len(), 61);
        assert!(run.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(run.best_cost, *run.history.last().unwrap());
    }

    #[test]
    fn identical_population_without_mutation_is_stationary() {
        let c = instance(4, 10, 3, 4);
        let a = BinAssignment::new(vec![0, 1, 2, 0, 1, 2, 0, 1, 2, 2], 3).unwrap();
        let params = GaParams {
            iterations: 25,
            population: 8,
            mutation_rate: 0.0,
        };
        let run = evolve(&c, &params, 8, vec![a.clone(); 8]).unwrap();
        assert!(run.population.iter().all(|x| *x == a));
        assert_eq!(run.best, a);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let c = instance(2, 4, 2, 0);
        let mut p = GaParams::default();
        p.mutation_rate = 1.5;
        assert!(assign_genetic(&c, &p, 0).is_err());
        p = GaParams {
            population: 0,
            ..GaParams::default()
        };
        assert!(assign_genetic(&c, &p, 0).is_err());
    }
}
