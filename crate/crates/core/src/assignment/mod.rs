//! Bin-to-type assignment.
//!
//! Every solver returns a [`BinAssignment`], a surjection from bins onto
//! parcel types, scored by [`average_cost`]: the expected distance from a
//! station to the nearest bin of the parcel's type, averaged over stations.
//!
//! Types are 0-based in the API. [`BinAssignment::to_one_based`] gives the
//! `1..=n_c` labelling used in reports.

mod exact;
mod genetic;
mod greedy;
mod hungarian;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridworld::{MapError, TypeDistribution, WarehouseMap};

pub use exact::{assign_exact, ExactOutcome};
pub use genetic::{assign_genetic, evolve, GaParams, GaRun};
pub use greedy::assign_greedy;
pub use hungarian::{assign_hungarian, min_cost_matching};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssignError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("{0}")]
    WrongSolver(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Type of every bin, with every type used at least once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinAssignment {
    n_types: usize,
    types: Vec<usize>,
}

impl BinAssignment {
    /// `types[i]` is the 0-based type of bin `i`.
    pub fn new(types: Vec<usize>, n_types: usize) -> Result<Self, AssignError> {
        if n_types == 0 {
            return Err(AssignError::InvalidAssignment("no parcel types".into()));
        }
        let mut seen = vec![false; n_types];
        for (i, &t) in types.iter().enumerate() {
            if t >= n_types {
                return Err(AssignError::InvalidAssignment(format!(
                    "bin {i} has type {t}, but only {n_types} types exist"
                )));
            }
            seen[t] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(AssignError::InvalidAssignment(format!(
                "type {missing} is not assigned to any bin"
            )));
        }
        Ok(BinAssignment { n_types, types })
    }

    /// Builds an assignment from `1..=n_types` labels.
    pub fn from_one_based(labels: &[usize], n_types: usize) -> Result<Self, AssignError> {
        let types = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                l.checked_sub(1).ok_or_else(|| {
                    AssignError::InvalidAssignment(format!("bin {i} has label 0; labels start at 1"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(types, n_types)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.types.iter().map(|t| t + 1).collect()
    }

    pub fn types(&self) -> &[usize] {
        &self.types
    }

    pub fn type_of(&self, bin: usize) -> usize {
        self.types[bin]
    }

    pub fn n_bins(&self) -> usize {
        self.types.len()
    }

    pub fn n_types(&self) -> usize {
        self.n_types
    }

    /// Bins sorting type `ty`, ascending.
    pub fn bins_of(&self, ty: usize) -> impl Iterator<Item = usize> + '_ {
        self.types
            .iter()
            .enumerate()
            .filter(move |(_, &t)| t == ty)
            .map(|(i, _)| i)
    }
}

/// Station-to-bin distances together with the station type distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    n_stations: usize,
    n_bins: usize,
    n_types: usize,
    /// `dist[k * n_bins + i]`
    dist: Vec<f64>,
    /// `prob[k * n_types + j]`
    prob: Vec<f64>,
    /// `w[i * n_types + j] = sum_k prob(k, j) * dist(k, i)`
    w: Vec<f64>,
}

impl CostModel {
    /// `dist[k][i]` is the distance from station `k` to bin `i`.
    pub fn new(dist: &[Vec<f64>], types: &TypeDistribution) -> Result<Self, AssignError> {
        let n_stations = dist.len();
        if n_stations == 0 {
            return Err(AssignError::InvalidConfig("no stations".into()));
        }
        if types.n_stations() != n_stations {
            return Err(AssignError::InvalidConfig(format!(
                "{} distance rows but {} distribution rows",
                n_stations,
                types.n_stations()
            )));
        }
        let n_bins = dist[0].len();
        let n_types = types.n_types();
        if n_bins == 0 {
            return Err(AssignError::InvalidConfig("no bins".into()));
        }
        if n_types > n_bins {
            return Err(AssignError::InvalidConfig(format!(
                "{n_types} types cannot cover only {n_bins} bins"
            )));
        }
        let mut flat = Vec::with_capacity(n_stations * n_bins);
        for (k, row) in dist.iter().enumerate() {
            if row.len() != n_bins {
                return Err(AssignError::InvalidConfig(format!(
                    "distance row {k} has {} entries, expected {n_bins}",
                    row.len()
                )));
            }
            if let Some(d) = row.iter().find(|d| !d.is_finite() || **d < 0.0) {
                return Err(AssignError::InvalidConfig(format!(
                    "distance {d} in row {k} is not finite and nonnegative"
                )));
            }
            flat.extend_from_slice(row);
        }
        let prob: Vec<f64> = types.rows().iter().flatten().copied().collect();
        let mut w = vec![0.0; n_bins * n_types];
        for i in 0..n_bins {
            for j in 0..n_types {
                w[i * n_types + j] = (0..n_stations)
                    .map(|k| prob[k * n_types + j] * flat[k * n_bins + i])
                    .sum();
            }
        }
        Ok(CostModel {
            n_stations,
            n_bins,
            n_types,
            dist: flat,
            prob,
            w,
        })
    }

    /// Uses undirected station-to-bin distances of `map`.
    pub fn from_map(map: &WarehouseMap, types: &TypeDistribution) -> Result<Self, AssignError> {
        types.validate_for(map)?;
        let dist = (0..map.stations().len())
            .map(|k| {
                (0..map.bins().len())
                    .map(|i| {
                        map.station_bin_distance(k, i).map(f64::from).ok_or_else(|| {
                            AssignError::InvalidConfig(format!("bin {i} unreachable from station {k}"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&dist, types)
    }

    #[inline]
    pub fn n_stations(&self) -> usize {
        self.n_stations
    }

    #[inline]
    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    #[inline]
    pub fn n_types(&self) -> usize {
        self.n_types
    }

    #[inline]
    pub fn dist(&self, k: usize, i: usize) -> f64 {
        self.dist[k * self.n_bins + i]
    }

    #[inline]
    pub fn prob(&self, k: usize, j: usize) -> f64 {
        self.prob[k * self.n_types + j]
    }

    /// Expected cost of bin `i` serving type `j` alone.
    #[inline]
    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n_types + j]
    }

    /// Unnormalized objective `sum_k sum_j m_kj d_kj` of a raw type vector.
    /// A missing type contributes infinity.
    pub(crate) fn total(&self, types: &[usize]) -> f64 {
        let mut nearest = vec![f64::INFINITY; self.n_types];
        let mut sum = 0.0;
        for k in 0..self.n_stations {
            nearest.fill(f64::INFINITY);
            let row = &self.dist[k * self.n_bins..(k + 1) * self.n_bins];
            for (d, &t) in row.iter().zip(types) {
                if *d < nearest[t] {
                    nearest[t] = *d;
                }
            }
            let probs = &self.prob[k * self.n_types..(k + 1) * self.n_types];
            for (p, d) in probs.iter().zip(&nearest) {
                sum += p * d;
            }
        }
        sum
    }

    /// Cost `sum_k m_kj min_{i in bins} dist(k, i)` of type `j` served by `bins`.
    pub(crate) fn type_cost(&self, j: usize, bins: impl Iterator<Item = usize> + Clone) -> f64 {
        (0..self.n_stations)
            .map(|k| {
                let d = bins
                    .clone()
                    .map(|i| self.dist(k, i))
                    .fold(f64::INFINITY, f64::min);
                self.prob(k, j) * d
            })
            .sum()
    }

    fn check(&self, a: &BinAssignment) -> Result<(), AssignError> {
        if a.n_bins() != self.n_bins || a.n_types() != self.n_types {
            return Err(AssignError::InvalidAssignment(format!(
                "assignment covers {} bins and {} types, cost model has {} and {}",
                a.n_bins(),
                a.n_types(),
                self.n_bins,
                self.n_types
            )));
        }
        Ok(())
    }
}

/// Expected travel distance per parcel:
/// `1/n_p * sum_k sum_j m_kj * min_{i: f(i) = j} dist(p_k, b_i)`.
pub fn average_cost(assignment: &BinAssignment, cost: &CostModel) -> Result<f64, AssignError> {
    cost.check(assignment)?;
    Ok(cost.total(assignment.types()) / cost.n_stations as f64)
}

/// A random permutation of the bins in which the first `n_types` bins get
/// distinct types; every other bin draws its type uniformly.
pub fn assign_random(n_bins: usize, n_types: usize, seed: u64) -> Result<BinAssignment, AssignError> {
    if n_types == 0 || n_types > n_bins {
        return Err(AssignError::InvalidConfig(format!(
            "need 1 <= n_c <= n_b, got n_c = {n_types}, n_b = {n_bins}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_with(n_bins, n_types, &mut rng)
}

fn random_with(n_bins: usize, n_types: usize, rng: &mut impl Rng) -> Result<BinAssignment, AssignError> {
    let mut order: Vec<usize> = (0..n_bins).collect();
    order.shuffle(rng);
    let mut types = vec![0; n_bins];
    for (pos, &bin) in order.iter().enumerate() {
        types[bin] = if pos < n_types {
            pos
        } else {
            rng.random_range(0..n_types)
        };
    }
    BinAssignment::new(types, n_types)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Random,
    Hungarian,
    Greedy,
    #[serde(rename = "ga")]
    Genetic,
    Exact,
}

impl Solver {
    pub const ALL: [Solver; 5] = [
        Solver::Random,
        Solver::Hungarian,
        Solver::Greedy,
        Solver::Genetic,
        Solver::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Solver::Random => "random",
            Solver::Hungarian => "hungarian",
            Solver::Greedy => "greedy",
            Solver::Genetic => "ga",
            Solver::Exact => "exact",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = AssignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Solver::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| AssignError::InvalidConfig(format!("unknown solver `{s}`")))
    }
}

/// Knobs shared by [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub seed: u64,
    pub ga: GaParams,
    pub time_limit: Option<Duration>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            ga: GaParams::default(),
            time_limit: None,
        }
    }
}

/// Runs `solver` on `cost`. The flag is false only when the exact solver
/// hit its time limit and returned its incumbent.
pub fn solve(cost: &CostModel, solver: Solver, opts: &SolveOptions) -> Result<(BinAssignment, bool), AssignError> {
    Ok(match solver {
        Solver::Random => (assign_random(cost.n_bins, cost.n_types, opts.seed)?, true),
        Solver::Hungarian => (assign_hungarian(cost)?, true),
        Solver::Greedy => (assign_greedy(cost, opts.seed)?, true),
        Solver::Genetic => (assign_genetic(cost, &opts.ga, opts.seed)?, true),
        Solver::Exact => {
            let out = assign_exact(cost, opts.time_limit)?;
            (out.assignment, out.optimal)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(dist: Vec<Vec<f64>>, probs: Vec<Vec<f64>>) -> CostModel {
        CostModel::new(&dist, &TypeDistribution::new(probs).unwrap()).unwrap()
    }

    #[test]
    fn single_bin_single_type() {
        let c = model(vec![vec![4.0]], vec![vec![1.0]]);
        let a = BinAssignment::new(vec![0], 1).unwrap();
        assert_eq!(average_cost(&a, &c).unwrap(), 4.0);
    }

    #[test]
    fn surjectivity_is_enforced() {
        assert!(BinAssignment::new(vec![0, 0], 2).is_err());
        assert!(BinAssignment::new(vec![0, 2], 2).is_err());
        assert!(BinAssignment::from_one_based(&[0, 1], 2).is_err());
        let a = BinAssignment::from_one_based(&[2, 1, 2], 2).unwrap();
        assert_eq!(a.types(), &[1, 0, 1]);
        assert_eq!(a.to_one_based(), vec![2, 1, 2]);
        assert_eq!(a.bins_of(1).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn extra_closer_bin_never_hurts() {
        let probs = vec![vec![0.3, 0.7], vec![0.6, 0.4]];
        let two = model(vec![vec![5.0, 2.0], vec![1.0, 6.0]], probs.clone());
        let three = model(vec![vec![5.0, 2.0, 1.0], vec![1.0, 6.0, 3.0]], probs);
        let base = average_cost(&BinAssignment::new(vec![0, 1], 2).unwrap(), &two).unwrap();
        for t in 0..2 {
            let more = BinAssignment::new(vec![0, 1, t], 2).unwrap();
            assert!(average_cost(&more, &three).unwrap() <= base);
        }
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let c = model(vec![vec![1.0, 2.0]], vec![vec![1.0]]);
        let a = BinAssignment::new(vec![0, 0, 0], 1).unwrap();
        assert!(average_cost(&a, &c).is_err());
        let d = TypeDistribution::uniform(1, 3);
        assert!(CostModel::new(&[vec![1.0, 2.0]], &d).is_err());
        assert!(CostModel::new(&[vec![1.0, -2.0, 3.0]], &d).is_err());
    }

    #[test]
    fn random_assignment_is_seeded_and_valid() {
        let a = assign_random(9, 4, 3).unwrap();
        assert_eq!(a, assign_random(9, 4, 3).unwrap());
        assert_eq!(a.n_bins(), 9);
        let single = assign_random(5, 1, 1).unwrap();
        assert!(single.types().iter().all(|&t| t == 0));
        let mut bij = assign_random(6, 6, 2).unwrap().types().to_vec();
        bij.sort();
        assert_eq!(bij, (0..6).collect::<Vec<_>>());
        assert!(assign_random(2, 3, 0).is_err());
    }

    #[test]
    fn solver_names_round_trip() {
        for s in Solver::ALL {
            assert_eq!(s.name().parse::<Solver>().unwrap(), s);
        }
        assert!("mip".parse::<Solver>().is_err());
    }
}
