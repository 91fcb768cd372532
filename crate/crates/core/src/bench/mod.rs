//! Experiment harness.
//!
//! An [`ExperimentSpec`] names a map, a parcel-type sweep, solvers, planners
//! and robot counts. Every table cell is an independent job seeded from
//! `base_seed` through [`derive_seed`], so any cell can be rerun alone.
//!
//! Output files for an experiment called `NAME`:
//!
//! | File | Columns |
//! |------|---------|
//! | `NAME_runs.csv` | one row per seed; assignment: `solver,n_types,seed_index,seed,cost,optimal`; throughput: `planner,solver,n_types,robots,seed_index,seed,aborted,deliveries,throughput,mean_task_distance,waits,conflicts_resolved,cycles_detected,max_task_age` |
//! | `NAME_summary.csv` | assignment: `solver,n_types,runs,mean_cost,std_cost,timeouts`; throughput: `planner,solver,n_types,robots,runs,aborted,mean_throughput,std_throughput` |
//! | `NAME_timing.csv` | wall-clock columns keyed like the summary: `mean_ms,std_ms` or `mean_step_ms,max_step_ms` |
//! | `NAME.json` | the spec, its SHA-256 config hash, the commit, and the file list |
//!
//! Runs and summary files depend only on the spec; timings do not.
//! Standard deviations are sample deviations (`n - 1`), zero for one run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::assignment::{average_cost, solve, AssignError, CostModel, GaParams, SolveOptions, Solver};
use crate::gridworld::{generate_map, MapError, StationPlacement, TypeDistribution};
use crate::planner::PlannerMode;
use crate::roadnet::{orient, RoadError, RoadNetwork};
use crate::seed::{derive_seed, SeedSet};
use crate::simulator::{run, SimConfig, SimError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Road(#[from] RoadError),
    #[error(transparent)]
    Assign(#[from] AssignError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed experiment file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Assignment,
    Throughput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub block_rows: usize,
    pub block_cols: usize,
    pub stations: usize,
}

/// One scenario. Loaded from JSON with the field names below; omitted
/// optional fields take the defaults shown in [`ExperimentSpec::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub kind: ExperimentKind,
    pub map: MapSpec,
    /// Parcel-type counts swept by assignment experiments; throughput
    /// experiments use every entry too.
    pub n_types: Vec<usize>,
    pub solvers: Vec<Solver>,
    /// `pry`, `epry-random` or `epry-focal`.
    pub planners: Vec<String>,
    pub focal_w: f64,
    pub robots: Vec<usize>,
    pub seeds: usize,
    pub steps: usize,
    pub warmup: usize,
    pub ga: GaParams,
    /// Exact-solver budget per instance; a timeout is recorded, not fatal.
    pub exact_time_limit_s: Option<f64>,
    pub base_seed: u64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            name: "custom".into(),
            kind: ExperimentKind::Throughput,
            map: MapSpec {
                block_rows: 4,
                block_cols: 9,
                stations: 12,
            },
            n_types: vec![20],
            solvers: vec![Solver::Genetic],
            planners: vec!["pry".into(), "epry-focal".into()],
            focal_w: PlannerMode::DEFAULT_FOCAL_W,
            robots: vec![20],
            seeds: 5,
            steps: 500,
            warmup: 0,
            ga: GaParams::default(),
            exact_time_limit_s: Some(10.0),
            base_seed: 0,
        }
    }
}

impl ExperimentSpec {
    /// `fig5` to `fig8` at desk scale (five seeds per point).
    pub fn preset(name: &str) -> Option<Self> {
        let d = ExperimentSpec::default();
        let all_planners = vec!["pry".to_string(), "epry-random".into(), "epry-focal".into()];
        Some(match name {
            "fig5" => ExperimentSpec {
                name: "fig5".into(),
                kind: ExperimentKind::Assignment,
                n_types: vec![6, 12, 18, 24, 30, 36],
                solvers: Solver::ALL.to_vec(),
                planners: vec![],
                robots: vec![],
                ..d
            },
            "fig6" => ExperimentSpec {
                name: "fig6".into(),
                solvers: vec![Solver::Random, Solver::Greedy, Solver::Genetic],
                planners: all_planners,
                robots: (1..=10).map(|k| 10 * k).collect(),
                ..d
            },
            "fig7" => ExperimentSpec {
                name: "fig7".into(),
                map: MapSpec {
                    block_rows: 10,
                    block_cols: 20,
                    stations: 20,
                },
                n_types: vec![100],
                planners: all_planners,
                robots: (1..=8).map(|k| 50 * k).collect(),
                ..d
            },
            "fig8" => ExperimentSpec {
                name: "fig8".into(),
                map: MapSpec {
                    block_rows: 15,
                    block_cols: 30,
                    stations: 30,
                },
                n_types: vec![200],
                planners: all_planners,
                robots: (1..=6).map(|k| 100 * k).collect(),
                ..d
            },
            _ => return None,
        })
    }

    pub const PRESETS: [&'static str; 4] = ["fig5", "fig6", "fig7", "fig8"];

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn planner_modes(&self) -> Result<Vec<PlannerMode>, BenchError> {
        self.planners
            .iter()
            .map(|p| {
                PlannerMode::from_name(p, self.focal_w)
                    .ok_or_else(|| BenchError::InvalidSpec(format!("unknown planner `{p}`")))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidSpec(m));
        if self.seeds == 0 {
            return bad("seeds per point must be at least 1".into());
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_".contains(c)) {
            return bad(format!("name `{}` must be non-empty ASCII letters, digits, `-` or `_`", self.name));
        }
        if self.solvers.is_empty() || self.n_types.is_empty() {
            return bad("at least one solver and one type count are required".into());
        }
        let n_bins = self.map.block_rows * self.map.block_cols;
        if let Some(&c) = self.n_types.iter().find(|&&c| c == 0 || c > n_bins) {
            return bad(format!("{c} parcel types cannot be spread over {n_bins} bins"));
        }
        if !(self.focal_w >= 1.0 && self.focal_w.is_finite()) {
            return bad(format!("focal bound {} must be at least 1", self.focal_w));
        }
        if let Some(t) = self.exact_time_limit_s {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("exact time limit {t} must be positive"));
            }
        }
        self.planner_modes()?;
        if self.kind == ExperimentKind::Throughput {
            if self.planners.is_empty() || self.robots.is_empty() {
                return bad("throughput experiments need planners and robot counts".into());
            }
            if self.warmup >= self.steps {
                return bad("warmup must be shorter than the run".into());
            }
            let free = (3 * self.map.block_rows + 2) * (3 * self.map.block_cols + 2) - n_bins;
            if let Some(&n) = self.robots.iter().find(|&&n| n == 0 || n >= free) {
                return bad(format!("{n} robots do not fit on {free} free cells"));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the spec's JSON encoding.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("specs always serialize");
        Sha256::digest(json).iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    fn build_network(&self) -> Result<Arc<RoadNetwork>, BenchError> {
        let map = generate_map(
            self.map.block_rows,
            self.map.block_cols,
            &StationPlacement::Count(self.map.stations),
        )?;
        Ok(Arc::new(orient(&Arc::new(map))?))
    }

    /// Seed of the type distribution shared by every solver at one point.
    pub fn distribution_seed(&self, n_types: usize, seed_index: usize) -> u64 {
        derive_seed(self.base_seed, &format!("bench/dist/{n_types}/{seed_index}"))
    }

    pub fn solver_seed(&self, solver: Solver, n_types: usize, seed_index: usize) -> u64 {
        derive_seed(self.base_seed, &format!("bench/assign/{solver}/{n_types}/{seed_index}"))
    }

    /// Simulation seed, shared across planners and solvers so that they face
    /// the same placements and parcel streams.
    pub fn run_seed(&self, robots: usize, n_types: usize, seed_index: usize) -> u64 {
        derive_seed(self.base_seed, &format!("bench/sim/{n_types}/{robots}/{seed_index}"))
    }

    fn solve_options(&self, seed: u64) -> SolveOptions {
        SolveOptions {
            seed,
            ga: self.ga,
            time_limit: self.exact_time_limit_s.map(Duration::from_secs_f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentRun {
    pub solver: Solver,
    pub n_types: usize,
    pub seed_index: usize,
    pub seed: u64,
    pub cost: f64,
    /// False when the exact solver ran out of time.
    pub optimal: bool,
    #[serde(skip)]
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentSummary {
    pub solver: Solver,
    pub n_types: usize,
    pub runs: usize,
    pub mean_cost: f64,
    pub std_cost: f64,
    pub timeouts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputRun {
    pub planner: String,
    pub solver: Solver,
    pub n_types: usize,
    pub robots: usize,
    pub seed_index: usize,
    pub seed: u64,
    pub aborted: bool,
    pub deliveries: u64,
    pub throughput: f64,
    pub mean_task_distance: f64,
    pub waits: u64,
    pub conflicts_resolved: u64,
    pub cycles_detected: u64,
    pub max_task_age: usize,
    #[serde(skip)]
    pub mean_step_ms: f64,
    #[serde(skip)]
    pub max_step_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputSummary {
    pub planner: String,
    pub solver: Solver,
    pub n_types: usize,
    pub robots: usize,
    pub runs: usize,
    pub aborted: usize,
    /// Over runs that completed.
    pub mean_throughput: f64,
    pub std_throughput: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResultTable {
    Assignment(Vec<AssignmentRun>),
    Throughput(Vec<ThroughputRun>),
}

/// Sample mean and standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Whether `solver` is defined at this point: Hungarian needs one bin per type.
fn applies(solver: Solver, n_types: usize, n_bins: usize) -> bool {
    solver != Solver::Hungarian || n_types == n_bins
}

/// Runs one assignment cell.
pub fn run_assignment_cell(
    spec: &ExperimentSpec,
    net: &RoadNetwork,
    solver: Solver,
    n_types: usize,
    seed_index: usize,
) -> Result<AssignmentRun, BenchError> {
    let map = net.map();
    let dist = TypeDistribution::dirichlet(map.stations().len(), n_types, spec.distribution_seed(n_types, seed_index));
    let cost = CostModel::from_map(map, &dist)?;
    let seed = spec.solver_seed(solver, n_types, seed_index);
    let start = Instant::now();
    let (assignment, optimal) = solve(&cost, solver, &spec.solve_options(seed))?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(AssignmentRun {
        solver,
        n_types,
        seed_index,
        seed,
        cost: average_cost(&assignment, &cost)?,
        optimal,
        wall_ms,
    })
}

/// Every (solver, type count, seed) cell. Hungarian appears only where the
/// type count equals the bin count.
pub fn run_assignment_benchmark(spec: &ExperimentSpec) -> Result<Vec<AssignmentRun>, BenchError> {
    spec.validate()?;
    let net = spec.build_network()?;
    let n_bins = net.map().bins().len();
    let mut jobs = Vec::new();
    for &c in &spec.n_types {
        for &solver in &spec.solvers {
            if applies(solver, c, n_bins) {
                jobs.extend((0..spec.seeds).map(|s| (solver, c, s)));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(solver, c, s)| run_assignment_cell(spec, &net, solver, c, s))
        .collect()
}

pub fn summarize_assignment(runs: &[AssignmentRun]) -> Vec<AssignmentSummary> {
    group(runs, |r| (r.solver, r.n_types))
        .into_iter()
        .map(|rs| {
            let (mean_cost, std_cost) = mean_std(&rs.iter().map(|r| r.cost).collect::<Vec<_>>());
            AssignmentSummary {
                solver: rs[0].solver,
                n_types: rs[0].n_types,
                runs: rs.len(),
                mean_cost,
                std_cost,
                timeouts: rs.iter().filter(|r| !r.optimal).count(),
            }
        })
        .collect()
}

/// Runs one simulation cell with a precomputed assignment.
fn simulate_cell(
    spec: &ExperimentSpec,
    net: &Arc<RoadNetwork>,
    inputs: &(TypeDistribution, crate::assignment::BinAssignment),
    planner: (&str, PlannerMode),
    solver: Solver,
    n_types: usize,
    robots: usize,
    seed_index: usize,
) -> Result<ThroughputRun, BenchError> {
    let seed = spec.run_seed(robots, n_types, seed_index);
    let mut config = SimConfig::new(net.clone(), inputs.0.clone(), inputs.1.clone(), robots, spec.steps)
        .with_mode(planner.1);
    config.seeds = SeedSet::from_global(seed);
    config.warmup = spec.warmup;
    let mut row = ThroughputRun {
        planner: planner.0.to_string(),
        solver,
        n_types,
        robots,
        seed_index,
        seed,
        aborted: false,
        deliveries: 0,
        throughput: 0.0,
        mean_task_distance: 0.0,
        waits: 0,
        conflicts_resolved: 0,
        cycles_detected: 0,
        max_task_age: 0,
        mean_step_ms: 0.0,
        max_step_ms: 0.0,
    };
    match run(&config) {
        Ok(report) => {
            let m = report.metrics;
            row.deliveries = m.deliveries;
            row.throughput = m.throughput;
            row.mean_task_distance = m.mean_task_distance;
            row.waits = m.waits;
            row.conflicts_resolved = m.conflicts_resolved;
            row.cycles_detected = m.cycles_detected;
            row.max_task_age = m.max_task_age;
            row.mean_step_ms = report.timing.mean_step_ms;
            row.max_step_ms = report.timing.max_step_ms;
        }
        Err(SimError::Deadlock(report)) => {
            row.aborted = true;
            row.max_task_age = report.task_age;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(row)
}

/// Every (planner, solver, type count, robot count, seed) cell. The
/// distribution and assignment for a given (solver, type count, seed) are
/// computed once and shared across planners and robot counts.
pub fn run_throughput_benchmark(spec: &ExperimentSpec) -> Result<Vec<ThroughputRun>, BenchError> {
    spec.validate()?;
    let net = spec.build_network()?;
    let n_bins = net.map().bins().len();
    let modes = spec.planner_modes()?;

    let mut keys = Vec::new();
    for &c in &spec.n_types {
        for &solver in spec.solvers.iter().filter(|&&s| applies(s, c, n_bins)) {
            keys.extend((0..spec.seeds).map(|s| (solver, c, s)));
        }
    }
    let inputs: Vec<(TypeDistribution, crate::assignment::BinAssignment)> = keys
        .par_iter()
        .map(|&(solver, c, s)| {
            let dist = TypeDistribution::dirichlet(net.map().stations().len(), c, spec.distribution_seed(c, s));
            let cost = CostModel::from_map(net.map(), &dist)?;
            let (a, _) = solve(&cost, solver, &spec.solve_options(spec.solver_seed(solver, c, s)))?;
            Ok((dist, a))
        })
        .collect::<Result<_, BenchError>>()?;

    let mut jobs = Vec::new();
    for (p, &mode) in spec.planners.iter().zip(&modes) {
        for (k, &(solver, c, s)) in keys.iter().enumerate() {
            for &n in &spec.robots {
                jobs.push((p.as_str(), mode, k, solver, c, n, s));
            }
        }
    }
    let mut rows: Vec<ThroughputRun> = jobs
        .into_par_iter()
        .map(|(p, mode, k, solver, c, n, s)| simulate_cell(spec, &net, &inputs[k], (p, mode), solver, c, n, s))
        .collect::<Result<_, _>>()?;
    let order = |r: &ThroughputRun| {
        (
            spec.planners.iter().position(|p| *p == r.planner),
            spec.solvers.iter().position(|s| *s == r.solver),
            r.n_types,
            r.robots,
            r.seed_index,
        )
    };
    rows.sort_by_key(order);
    Ok(rows)
}

pub fn summarize_throughput(runs: &[ThroughputRun]) -> Vec<ThroughputSummary> {
    group(runs, |r| (r.planner.clone(), r.solver, r.n_types, r.robots))
        .into_iter()
        .map(|rs| {
            let done: Vec<f64> = rs.iter().filter(|r| !r.aborted).map(|r| r.throughput).collect();
            let (mean_throughput, std_throughput) = mean_std(&done);
            ThroughputSummary {
                planner: rs[0].planner.clone(),
                solver: rs[0].solver,
                n_types: rs[0].n_types,
                robots: rs[0].robots,
                runs: rs.len(),
                aborted: rs.len() - done.len(),
                mean_throughput,
                std_throughput,
            }
        })
        .collect()
}

/// Consecutive runs sharing a key; inputs are already in key order.
fn group<T, K: PartialEq>(rows: &[T], key: impl Fn(&T) -> K) -> Vec<&[T]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=rows.len() {
        if i == rows.len() || key(&rows[i]) != key(&rows[start]) {
            if i > start {
                out.push(&rows[start..i]);
            }
            start = i;
        }
    }
    out
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultTable, BenchError> {
    Ok(match spec.kind {
        ExperimentKind::Assignment => ResultTable::Assignment(run_assignment_benchmark(spec)?),
        ExperimentKind::Throughput => ResultTable::Throughput(run_throughput_benchmark(spec)?),
    })
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Rendered output files, keyed by file name.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub runs_csv: String,
    pub summary_csv: String,
    pub timing_csv: String,
}

pub fn render(table: &ResultTable) -> Result<Rendered, BenchError> {
    #[derive(Serialize)]
    struct AssignTiming {
        solver: Solver,
        n_types: usize,
        mean_ms: f64,
        std_ms: f64,
    }
    #[derive(Serialize)]
    struct SimTiming {
        planner: String,
        solver: Solver,
        n_types: usize,
        robots: usize,
        mean_step_ms: f64,
        max_step_ms: f64,
    }
    Ok(match table {
        ResultTable::Assignment(runs) => {
            let timing: Vec<AssignTiming> = group(runs, |r| (r.solver, r.n_types))
                .into_iter()
                .map(|rs| {
                    let (mean_ms, std_ms) = mean_std(&rs.iter().map(|r| r.wall_ms).collect::<Vec<_>>());
                    AssignTiming {
                        solver: rs[0].solver,
                        n_types: rs[0].n_types,
                        mean_ms,
                        std_ms,
                    }
                })
                .collect();
            Rendered {
                runs_csv: to_csv(runs)?,
                summary_csv: to_csv(&summarize_assignment(runs))?,
                timing_csv: to_csv(&timing)?,
            }
        }
        ResultTable::Throughput(runs) => {
            let timing: Vec<SimTiming> = group(runs, |r| (r.planner.clone(), r.solver, r.n_types, r.robots))
                .into_iter()
                .map(|rs| {
                    let done: Vec<&ThroughputRun> = rs.iter().filter(|r| !r.aborted).collect();
                    SimTiming {
                        planner: rs[0].planner.clone(),
                        solver: rs[0].solver,
                        n_types: rs[0].n_types,
                        robots: rs[0].robots,
                        mean_step_ms: mean_std(&done.iter().map(|r| r.mean_step_ms).collect::<Vec<_>>()).0,
                        max_step_ms: done.iter().map(|r| r.max_step_ms).fold(0.0, f64::max),
                    }
                })
                .collect();
            Rendered {
                runs_csv: to_csv(runs)?,
                summary_csv: to_csv(&summarize_throughput(runs))?,
                timing_csv: to_csv(&timing)?,
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub experiment: String,
    pub config_hash: String,
    pub commit: String,
    pub base_seed: u64,
    pub seeds_per_point: usize,
    pub spec: ExperimentSpec,
    pub files: Vec<String>,
}

/// Writes the three CSV files and the JSON index into `dir`, returning the
/// paths written.
pub fn write_outputs(
    spec: &ExperimentSpec,
    table: &ResultTable,
    commit: &str,
    dir: &Path,
) -> Result<Vec<PathBuf>, BenchError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| BenchError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let r = render(table)?;
    let name = &spec.name;
    let files = [
        (format!("{name}_runs.csv"), r.runs_csv),
        (format!("{name}_summary.csv"), r.summary_csv),
        (format!("{name}_timing.csv"), r.timing_csv),
    ];
    let mut written = Vec::new();
    for (file, body) in &files {
        let path = dir.join(file);
        fs::write(&path, body).map_err(io(&path))?;
        written.push(path);
    }
    let index = Provenance {
        experiment: name.clone(),
        config_hash: spec.config_hash(),
        commit: commit.to_string(),
        base_seed: spec.base_seed,
        seeds_per_point: spec.seeds,
        spec: spec.clone(),
        files: files.iter().map(|(f, _)| f.clone()).collect(),
    };
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, serde_json::to_string_pretty(&index)? + "\n").map_err(io(&path))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(kind: ExperimentKind) -> ExperimentSpec {
        ExperimentSpec {
            name: "tiny".into(),
            kind,
            map: MapSpec {
                block_rows: 2,
                block_cols: 3,
                stations: 4,
            },
            n_types: vec![3, 6],
            solvers: Solver::ALL.to_vec(),
            planners: vec!["pry".into(), "epry-focal".into()],
            robots: vec![4, 8],
            seeds: 2,
            steps: 60,
            ga: GaParams {
                iterations: 20,
                population: 10,
                mutation_rate: 0.08,
            },
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn presets_validate() {
        for name in ExperimentSpec::PRESETS {
            let spec = ExperimentSpec::preset(name).unwrap();
            spec.validate().unwrap();
            assert_eq!(spec.name, name);
        }
        assert!(ExperimentSpec::preset("fig9").is_none());
    }

    #[test]
    fn hungarian_rows_only_where_types_match_bins() {
        let runs = run_assignment_benchmark(&tiny(ExperimentKind::Assignment)).unwrap();
        let summary = summarize_assignment(&runs);
        let hungarian: Vec<usize> = summary.iter().filter(|s| s.solver == Solver::Hungarian).map(|s| s.n_types).collect();
        assert_eq!(hungarian, vec![6]);
        assert_eq!(summary.len(), 4 + 5);
        for s in &summary {
            assert_eq!(s.runs, 2);
        }
    }

    #[test]
    fn throughput_tables_are_reproducible() {
        let spec = ExperimentSpec {
            solvers: vec![Solver::Greedy],
            n_types: vec![3],
            ..tiny(ExperimentKind::Throughput)
        };
        let a = render(&run_experiment(&spec).unwrap()).unwrap();
        let b = render(&run_experiment(&spec).unwrap()).unwrap();
        assert_eq!(a.runs_csv, b.runs_csv);
        assert_eq!(a.summary_csv, b.summary_csv);
        assert_eq!(a.runs_csv.lines().count(), 1 + 2 * 2 * 2);
        assert!(a.summary_csv.starts_with("planner,solver,n_types,robots,runs,aborted,mean_throughput,std_throughput\n"));
    }

    #[test]
    fn bad_specs_are_rejected() {
        let ok = tiny(ExperimentKind::Throughput);
        let cases = [
            ExperimentSpec { seeds: 0, ..ok.clone() },
            ExperimentSpec { planners: vec!["cbs".into()], ..ok.clone() },
            ExperimentSpec { n_types: vec![7], ..ok.clone() },
            ExperimentSpec { robots: vec![1000], ..ok.clone() },
            ExperimentSpec { name: "../x".into(), ..ok.clone() },
            ExperimentSpec { warmup: 60, ..ok.clone() },
        ];
        for c in cases {
            assert!(matches!(c.validate(), Err(BenchError::InvalidSpec(_))), "{c:?}");
        }
        assert!(ExperimentSpec::from_json(r#"{"seeds": 2, "bogus": 1}"#).is_err());
        let parsed = ExperimentSpec::from_json(r#"{"name": "mine", "robots": [5]}"#).unwrap();
        assert_eq!(parsed.robots, vec![5]);
        assert_eq!(parsed.steps, 500);
    }

    #[test]
    fn mean_std_matches_hand_values() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn config_hash_tracks_every_field() {
        let a = tiny(ExperimentKind::Assignment);
        let b = ExperimentSpec { base_seed: 1, ..a.clone() };
        assert_eq!(a.config_hash(), a.clone().config_hash());
        assert_ne!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 64);
    }
}
